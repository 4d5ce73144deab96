"""Experiment harness: run replicated estimates, fit rates and reduction
factors, run the exit-angle discrepancy study, estimate vector-wise Sobol'
indices, and export scenes.

All outputs are CSV plus gnuplot-ready plain-text plot data; every number
is a pure function of the master seed, independent of --threads.
"""

import argparse
import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import analysis, engine, scenes
from .points import spawn_seeds

_CLI_PURPOSE = 7

METHOD_TAGS = {"mc": "MC", "rqmc": "RQMC", "array_rqmc": "ArrayRQMC",
               "array_mc": "ArrayMC"}
POINT_TAGS = {"mc": "MC", "sobol": "Sobol", "lattice": "Lattice",
              "fibonacci": "Fibonacci"}
VARIANT_TAGS = {"move_to_end": "MoveToEnd", "interleave": "Interleave",
                "hammersley_fly": "HammersleyOnFly",
                "fibonacci_fly": "FibonacciOnFly",
                "stratified_fly": "StratifiedOnFly"}

_METHOD_IN = {v.lower(): k for k, v in METHOD_TAGS.items()}
_METHOD_IN.update({k: k for k in METHOD_TAGS})
_POINT_IN = {v.lower(): k for k, v in POINT_TAGS.items()}
_POINT_IN.update({k: k for k in POINT_TAGS})
_POINT_IN["kuolattice"] = "lattice"
_VARIANT_IN = {v.lower(): k for k, v in VARIANT_TAGS.items()}
_VARIANT_IN.update({k: k for k in VARIANT_TAGS})
_VARIANT_IN.update({"hammersley": "hammersley_fly", "fibonacci": "fibonacci_fly",
                    "stratified": "stratified_fly"})

RESULT_COLUMNS = ["scene", "method", "points", "variant", "n", "replicate",
                  "seed", "estimate", "mean_steps", "max_steps", "wall_ms"]
RATE_COLUMNS = ["scene", "method", "points", "n", "variance", "mse", "slope",
                "intercept", "vrf_vs_mc"]
KS_COLUMNS = ["t", "method", "points", "n", "mean_ks", "se_ks", "ref_mc",
              "ref_opt"]
SOBOL_COLUMNS = ["scene", "method", "points", "k", "tau2", "tau2_norm",
                 "sigma2", "nu_partial"]


def _parse_list(text, conv=str):
    return [conv(tok) for tok in str(text).split(",") if tok != ""]


def _combos(methods, constructions):
    out = []
    for m in methods:
        if m in ("mc", "array_mc"):
            out.append((m, "mc"))
        else:
            out.extend((m, p) for p in constructions if p != "mc")
    return out


def _write_csv(path, columns, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        w.writerows(rows)


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


# ---------------------------------------------------------------------------
# run

def _timed_run(scene, cfg):
    t0 = time.perf_counter()
    rec = engine.run(scene, cfg)
    return rec, (time.perf_counter() - t0) * 1e3


def cmd_run(args):
    scene = scenes.by_name(args.scene)
    methods = [_METHOD_IN[m.lower()] for m in _parse_list(args.method)]
    constructions = [_POINT_IN[p.lower()] for p in _parse_list(args.points)]
    ns = _parse_list(args.n, int)
    variant = _VARIANT_IN[args.variant.lower()]
    rows = []
    for ci, (method, pts) in enumerate(_combos(methods, constructions)):
        for ni, n in enumerate(ns):
            if pts != "fibonacci" and n & (n - 1):
                raise SystemExit("sample sizes must be powers of two (got %d)" % n)
            base = engine.RunConfig(
                method=method, points=pts, n=n, eps=args.eps,
                z0=tuple(args.z0) if args.z0 else None,
                variant=variant,
                stopping="fixed_k" if args.fixed_k else "epsilon",
                max_steps=args.fixed_k if args.fixed_k else None,
                scope="one_large_set" if args.one_large_set else "fresh",
                seed=int(spawn_seeds(args.seed, 1, _CLI_PURPOSE, ci, ni)[0]))
            seeds = engine.replicate_seeds(base.seed, args.reps)
            cfgs = [replace(base, seed=int(s)) for s in seeds]
            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                recs = list(pool.map(lambda c: _timed_run(scene, c), cfgs))
            for rep, (rec, ms) in enumerate(recs):
                rows.append([args.scene, METHOD_TAGS[method], POINT_TAGS[pts],
                             VARIANT_TAGS[variant], n, rep, rec.seed,
                             _fmt(rec.estimate), _fmt(rec.mean_steps),
                             rec.max_steps_taken, _fmt(round(ms, 3))])
    out = os.path.join(args.out, "results.csv")
    _write_csv(out, RESULT_COLUMNS, rows)
    print("wrote %s (%d rows)" % (out, len(rows)))
    return out


# ---------------------------------------------------------------------------
# rates

def _load_results(path):
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        return list(rd)


def cmd_rates(args):
    rows = _load_results(args.results)
    if not rows:
        raise SystemExit("empty results file")
    scene_names = sorted({r["scene"] for r in rows})
    out_rows = []
    plot_paths = []
    for scene_name in scene_names:
        scene = scenes.by_name(scene_name)
        exact = (float(scene.exact_solution(np.atleast_2d(scene.default_start))[0])
                 if scene.has_exact_solution else None)
        sub = [r for r in rows if r["scene"] == scene_name]
        groups = sorted({(r["method"], r["points"]) for r in sub})
        per_group = {}
        for g in groups:
            by_n = {}
            for r in sub:
                if (r["method"], r["points"]) == g:
                    by_n.setdefault(int(r["n"]), []).append(float(r["estimate"]))
            per_group[g] = {n: analysis.summarize(v, exact)
                            for n, v in sorted(by_n.items())}
        mc_group = next((g for g in groups if g[0] == "MC"), None)
        metric = "mse" if exact is not None else "variance"
        for g in groups:
            stats = per_group[g]
            pairs = [(n, s[metric]) for n, s in stats.items()]
            try:
                slope, intercept = analysis.fit_loglog(pairs)
            except ValueError:
                slope, intercept = float("nan"), float("nan")
            for n, s in stats.items():
                vrf = ""
                if mc_group and g != mc_group and n in per_group[mc_group]:
                    vrf = _fmt(per_group[mc_group][n][metric] / s[metric])
                out_rows.append([scene_name, g[0], g[1], n, _fmt(s["variance"]),
                                 _fmt(s.get("mse", "")) if exact is not None else "",
                                 _fmt(slope), _fmt(intercept), vrf])
        plot_paths.append(_write_plot_data(args.out, scene_name, metric,
                                           groups, per_group))
    out = os.path.join(args.out, "rates.csv")
    _write_csv(out, RATE_COLUMNS, out_rows)
    print("wrote %s and %s" % (out, ", ".join(plot_paths)))
    return out


def _write_plot_data(outdir, scene_name, metric, groups, per_group):
    """Gnuplot-ready columns: n then one value column per method."""
    ns = sorted({n for g in groups for n in per_group[g]})
    path = os.path.join(outdir, "plot_%s_%s.dat" % (scene_name, metric))
    os.makedirs(os.path.abspath(outdir), exist_ok=True)
    with open(path, "w") as fh:
        fh.write("# %s %s vs n\n" % (scene_name, metric))
        fh.write("# n " + " ".join("%s-%s" % g for g in groups) + "\n")
        for n in ns:
            vals = [per_group[g].get(n, {}).get(metric, float("nan"))
                    for g in groups]
            fh.write("%d %s\n" % (n, " ".join("%.10e" % v for v in vals)))
    return path


# ---------------------------------------------------------------------------
# ks study

def cmd_ks(args):
    if args.scene != "disk":
        raise SystemExit("the discrepancy study runs on the unit disk")
    scene = scenes.by_name("disk")
    methods = [_METHOD_IN[m.lower()] for m in _parse_list(args.method)]
    constructions = [_POINT_IN[p.lower()] for p in _parse_list(args.points)]
    ns = _parse_list(args.n, int)
    ts = _parse_list(args.t, float)
    rows = []
    for ti, t in enumerate(ts):
        z = (t, 0.0)
        for ci, (method, pts) in enumerate(_combos(methods, constructions)):
            for ni, n in enumerate(ns):
                base = engine.RunConfig(
                    method=method, points=pts, n=n, eps=args.eps, z0=z,
                    seed=int(spawn_seeds(args.seed, 1, _CLI_PURPOSE,
                                         ti, ci, ni)[0]))
                seeds = engine.replicate_seeds(base.seed, args.reps)
                cfgs = [replace(base, seed=int(s)) for s in seeds]
                with ThreadPoolExecutor(max_workers=args.threads) as pool:
                    recs = list(pool.map(lambda c: engine.run(scene, c), cfgs))
                ks = np.array([analysis.ks_distance(engine.terminal_angles(r), z)
                               for r in recs])
                rows.append([_fmt(t), METHOD_TAGS[method], POINT_TAGS[pts], n,
                             _fmt(ks.mean()),
                             _fmt(float(ks.std(ddof=1) / math.sqrt(len(ks)))),
                             _fmt(analysis.ks_mc_reference(n)),
                             _fmt(analysis.ks_best_possible(n))])
    out = os.path.join(args.out, "ks.csv")
    _write_csv(out, KS_COLUMNS, rows)
    print("wrote %s (%d rows)" % (out, len(rows)))
    return out


# ---------------------------------------------------------------------------
# vector-wise Sobol' indices

def cmd_sobol(args):
    scene = scenes.by_name(args.scene)
    methods = [_METHOD_IN[m.lower()] for m in _parse_list(args.method)]
    constructions = [_POINT_IN[p.lower()] for p in _parse_list(args.points)]
    n = _parse_list(args.n, int)[0]
    rows = []
    summary = []
    for ci, (method, pts) in enumerate(_combos(methods, constructions)):
        cfg = engine.RunConfig(
            method=method, points=pts, n=n, eps=args.eps,
            seed=int(spawn_seeds(args.seed, 1, _CLI_PURPOSE, ci)[0]))
        _, _, k_max = cfg.resolve(scene)
        if args.kprime > k_max:
            raise SystemExit("kprime %d exceeds the %d-step cap"
                             % (args.kprime, k_max))

        def runner(schedule, _cfg=cfg):
            return engine.run_with_schedule(scene, _cfg, schedule).estimate

        report = _parallel_jansen(runner, args.kprime, args.reps, k_max,
                                  cfg.seed, args.threads)
        tag_m, tag_p = METHOD_TAGS[method], POINT_TAGS[pts]
        for k in range(args.kprime):
            rows.append([args.scene, tag_m, tag_p, k + 1,
                         _fmt(float(report.tau2_raw[k])),
                         _fmt(float(report.tau2[k] / report.sigma2)),
                         _fmt(report.sigma2), _fmt(report.nu)])
        summary.append((tag_m, tag_p, report.nu, report.nu_se))
    out = os.path.join(args.out, "sobol.csv")
    _write_csv(out, SOBOL_COLUMNS, rows)
    print("wrote %s" % out)
    print("estimated vector-wise mean dimensions (nu, se):")
    for tag_m, tag_p, nu, se in summary:
        print("  %-10s %-8s %6.2f  %.2f" % (tag_m, tag_p, nu, se))
    return out


def _parallel_jansen(runner, k_prime, reps, schedule_len, seed, threads):
    """jansen_study with replicates fanned over a thread pool."""
    rng = engine.points.derive_rng(seed, analysis._JANSEN_PURPOSE)
    tasks = []
    for _ in range(reps):
        sched = rng.integers(0, 2 ** 63, size=schedule_len)
        refresh = rng.integers(0, 2 ** 63, size=k_prime)
        tasks.append((sched, refresh))

    def one(task):
        sched, refresh = task
        base = runner(sched)
        sq = np.empty(k_prime)
        for k in range(k_prime):
            sq[k] = analysis.jansen_total_index(runner, sched, k + 1,
                                                refresh[k], base_value=base)
        return base, sq

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = list(pool.map(one, tasks))
    else:
        done = [one(t) for t in tasks]
    base_vals = np.array([b for b, _ in done])
    sq = np.vstack([s for _, s in done])
    return analysis._report_from_samples(base_vals, sq)


# ---------------------------------------------------------------------------
# export

def cmd_export_scene(args):
    scene = scenes.by_name(args.scene)
    out = args.out or ("%s.json" % args.scene)
    scene.save(out)
    print("wrote %s (%d primitives)" % (out, len(scene.primitives)))
    return out


# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--scene", default="disk",
                   help="built-in scene name or scene file path")
    p.add_argument("--method", default="mc",
                   help="comma list: mc,rqmc,array_rqmc,array_mc")
    p.add_argument("--points", default="sobol",
                   help="comma list: sobol,lattice,fibonacci (mc methods "
                        "always use mc points)")
    p.add_argument("--n", default="1024", help="comma list of walker counts")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--eps", type=float, default=None,
                   help="stopping distance (scene default when omitted)")
    p.add_argument("--variant", default="move_to_end",
                   help="inactive handling: move_to_end,interleave,"
                        "hammersley,fibonacci,stratified")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="out")
    p.add_argument("--fixed-k", type=int, default=None,
                   help="run exactly K steps instead of the eps rule")
    p.add_argument("--one-large-set", action="store_true",
                   help="one sK-dimensional randomization instead of fresh "
                        "per-step randomizations (array methods)")
    p.add_argument("--threads", type=int, default=os.cpu_count(),
                   help="replicate parallelism; results are independent of it")
    p.add_argument("--z0", type=float, nargs="+", default=None,
                   help="evaluation point override")


def _apply_config_file(args, parser):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            defaults = json.load(fh)
        for key, val in defaults.items():
            key = key.replace("-", "_")
            if not hasattr(args, key):
                parser.error("unknown config key %r" % key)
            # explicit command-line flags win over file values
            if parser.get_default(key) == getattr(args, key):
                setattr(args, key, val)
    return args


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="wosqmc",
        description="Walk-on-spheres Dirichlet solvers under MC, RQMC and "
                    "Hilbert-sorted Array-RQMC sampling")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="replicated estimates to results.csv")
    _add_common(p_run)
    p_run.add_argument("--config", default=None, help="JSON config file")
    p_run.set_defaults(func=cmd_run)

    p_rates = sub.add_parser("rates", help="variance/MSE rate report from a "
                                           "results.csv")
    p_rates.add_argument("results")
    p_rates.add_argument("--out", default="out")
    p_rates.set_defaults(func=cmd_rates)

    p_ks = sub.add_parser("ks", help="exit-angle discrepancy study (unit disk)")
    _add_common(p_ks)
    p_ks.add_argument("--t", default="0.3333333333333333,0.5",
                      help="comma list of start offsets z0=(t,0)")
    p_ks.add_argument("--config", default=None)
    p_ks.set_defaults(func=cmd_ks)

    p_sob = sub.add_parser("sobol", help="vector-wise Sobol' indices and "
                                         "mean dimension")
    _add_common(p_sob)
    p_sob.add_argument("--kprime", type=int, default=20,
                       help="number of leading step blocks to analyze")
    p_sob.add_argument("--config", default=None)
    p_sob.set_defaults(func=cmd_sobol)

    p_exp = sub.add_parser("export-scene", help="write a built-in scene as JSON")
    p_exp.add_argument("scene")
    p_exp.add_argument("--out", default=None)
    p_exp.set_defaults(func=cmd_export_scene)

    args = parser.parse_args(argv)
    if hasattr(args, "config"):
        _apply_config_file(args, parser)
    if hasattr(args, "n"):
        args.scene = str(args.scene)
    return args.func(args)


if __name__ == "__main__":
    main()
