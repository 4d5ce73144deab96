"""Walk-on-spheres drivers: plain MC, RQMC (one big point set), and the
Hilbert-sorted array methods (Array-RQMC / Array-MC), with the variants for
partially converged ensembles, fixed-step stopping and one-large-set
randomization.

Every run is a pure function of (scene, config, schedule); the schedule is
one seed per step, so refreshing a single step's randomization (as the
sensitivity analysis needs) replaces one entry.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import hilbert, points, samplers

METHODS = ("mc", "rqmc", "array_rqmc", "array_mc")
CONSTRUCTIONS = ("sobol", "lattice", "fibonacci", "mc")
VARIANTS = ("move_to_end", "interleave", "hammersley_fly", "fibonacci_fly",
            "stratified_fly")

_SCHEDULE_PURPOSE = 1
_REPLICATE_PURPOSE = 2


@dataclass(frozen=True)
class RunConfig:
    """Method, construction and stopping choices for one ensemble run."""

    method: str = "mc"
    points: str = "mc"
    n: int = 1024
    eps: float | None = None          # None: scene default
    z0: tuple | None = None           # None: scene default
    max_steps: int | None = None
    variant: str = "move_to_end"
    stopping: str = "epsilon"         # or "fixed_k"
    scope: str = "fresh"              # or "one_large_set"
    seed: int = 0
    hilbert_bits: int | None = None

    def resolve(self, scene):
        eps = scene.default_eps if self.eps is None else self.eps
        z0 = scene.default_start if self.z0 is None else np.asarray(self.z0, float)
        if self.stopping == "fixed_k":
            k = 20 if self.max_steps is None else self.max_steps
        else:
            k = self.max_steps or 20 * max(int(math.ceil(math.log10(1.0 / eps))), 1)
        return eps, z0, k

    def validate(self, scene):
        if self.method not in METHODS:
            raise ValueError("unknown method %r" % self.method)
        if self.points not in CONSTRUCTIONS:
            raise ValueError("unknown construction %r" % self.points)
        if self.variant not in VARIANTS:
            raise ValueError("unknown variant %r" % self.variant)
        if self.n < 1:
            raise ValueError("need n >= 1")
        if self.points == "fibonacci":
            if scene.d != 2 or scene.source_mode == "general":
                raise ValueError("Fibonacci lattices need d=2 without sampled source")
            if not self.method.startswith("array"):
                raise ValueError("Fibonacci construction is an array-method option")
            points.fibonacci_index(self.n)
        if self.variant != "move_to_end":
            if not self.method.startswith("array"):
                raise ValueError("inactive-handling variants apply to array methods")
        if self.variant == "stratified_fly" and (scene.d != 2 or
                                                 scene.source_mode == "general"):
            raise ValueError("stratified variant needs one cube input per step")
        if self.variant == "fibonacci_fly" and (scene.d != 2 or
                                                scene.source_mode == "general"):
            raise ValueError("Fibonacci variant needs one cube input per step")


@dataclass
class EstimateRecord:
    """One replicate: the estimate plus per-walker diagnostics."""

    estimate: float
    payoffs: np.ndarray
    terminal: np.ndarray
    steps: np.ndarray
    active_counts: list
    k_used: int
    seed: int

    @property
    def mean_steps(self):
        return float(self.steps.mean())

    @property
    def max_steps_taken(self):
        return int(self.steps.max())


def default_schedule(seed, k_max):
    return points.derive_rng(seed, _SCHEDULE_PURPOSE).integers(
        0, 2 ** 63, size=k_max)


def handle_inactive(variant, n, m_active):
    """Consumption plan for one step with ``m_active`` unconverged walkers.

    ``rows``: how many prepared rows the step consumes; ``assignment``:
    "prefix" (sorted active walkers take the leading rows) or "positional"
    (row i belongs to the walker at position i); ``build``: which point set
    the step needs.
    """
    if m_active == 0:
        return {"rows": 0, "assignment": "none", "build": None}
    if variant == "move_to_end":
        return {"rows": n, "assignment": "prefix", "build": "base"}
    if variant == "interleave":
        return {"rows": n, "assignment": "positional", "build": "base"}
    if variant == "hammersley_fly":
        return {"rows": m_active, "assignment": "prefix", "build": "hammersley"}
    if variant == "fibonacci_fly":
        return {"rows": m_active, "assignment": "prefix", "build": "fibonacci"}
    if variant == "stratified_fly":
        return {"rows": m_active, "assignment": "prefix", "build": "stratified"}
    raise ValueError("unknown variant %r" % variant)


class _RowSource:
    """Prepared, matching-column-aligned point rows for each step."""

    def __init__(self, scene, cfg, s_step, k_max):
        self.n = cfg.n
        self.s = s_step
        self.cfg = cfg
        self.method = cfg.method
        self.variant = cfg.variant
        self._cache = None
        if self.method == "rqmc":
            total = s_step * k_max
            if cfg.points == "sobol":
                self.vectors = points._direction_vectors(
                    points.default_direction_table(), total,
                    max(self.n.bit_length() - 1, 1))
                _require_pow2(self.n)
            elif cfg.points == "lattice":
                gv = points.default_generating_vector()
                if total > gv.shape[0]:
                    raise ValueError("run needs %d lattice columns, vector has %d"
                                     % (total, gv.shape[0]))
                self.gv = gv
            else:
                raise ValueError("rqmc method needs sobol or lattice points")
        elif self.method == "array_rqmc":
            cols = s_step + 1
            if cfg.scope == "one_large_set":
                cols = s_step * k_max + 1
            if cfg.points == "sobol":
                _require_pow2(self.n)
                self.vectors = points._direction_vectors(
                    points.default_direction_table(), cols,
                    max(self.n.bit_length() - 1, 1))
            elif cfg.points == "lattice":
                gv = points.default_generating_vector()
                if cols > gv.shape[0]:
                    raise ValueError("run needs %d lattice columns, vector has %d"
                                     % (cols, gv.shape[0]))
                i = np.arange(self.n, dtype=np.int64)[:, None]
                self.base = (i * gv[None, :cols] % self.n) / float(self.n)
            elif cfg.points == "fibonacci":
                r = points.fibonacci_index(self.n)
                self.base = points.fibonacci_lattice(r)
            else:
                raise ValueError("array_rqmc needs sobol, lattice or fibonacci points")

    def step_rows(self, k, seed, plan):
        build = plan["build"]
        if build == "hammersley":
            return points.hammersley(plan["rows"], self.s + 1, seed).values[:, 1:]
        if build == "stratified":
            return points.stratified_shifted_1d(plan["rows"], seed).values
        if build == "fibonacci":
            m = plan["rows"]
            r, fib = points.smallest_fibonacci_at_least(m)
            lat = points.fibonacci_lattice(r)
            delta = points.derive_rng(seed).random()
            return np.mod(lat[:m, 1:2] + delta, 1.0)
        return self._base_rows(k, seed)

    def _base_rows(self, k, seed):
        n, s = self.n, self.s
        if self.method == "mc" or self.method == "array_mc":
            return points.derive_rng(seed).random((n, s))
        if self.method == "rqmc":
            lo, hi = (k - 1) * s, k * s
            if self.cfg.points == "sobol":
                svec, shift = points.scramble_vectors(self.vectors[lo:hi],
                                                      points.derive_rng(seed))
                return points.fill_scrambled(svec, shift, n)
            block = (np.arange(n, dtype=np.int64)[:, None]
                     * self.gv[None, lo:hi] % n) / float(n)
            delta = points.derive_rng(seed).random(s)
            return np.mod(block + delta, 1.0)
        # array_rqmc: matching column 0 plus s driving columns
        if self.cfg.scope == "one_large_set":
            if self._cache is None:
                self._cache = self._randomize_all_columns(seed)
            return self._cache[:, 1 + (k - 1) * s: 1 + k * s]
        return self._randomize_all_columns(seed)[:, 1:]

    def _randomize_all_columns(self, seed):
        """One randomized point set, rows aligned with the matching column."""
        n = self.n
        if self.cfg.points == "sobol":
            svec, shift = points.scramble_vectors(self.vectors,
                                                  points.derive_rng(seed))
            pts = points.fill_scrambled(svec, shift, n)
            return pts[np.argsort(pts[:, 0], kind="stable")]
        # lattice or fibonacci: column 0 is (i-1)/n, already in row order
        delta = points.derive_rng(seed).random(self.base.shape[1])
        return np.mod(self.base + delta, 1.0)


def _require_pow2(n):
    if n & (n - 1):
        raise ValueError("digital nets need n to be a power of two, got %d" % n)


def run(scene, cfg):
    """One replicate with the schedule derived from cfg.seed."""
    _, _, k_max = cfg.resolve(scene)
    return run_with_schedule(scene, cfg, default_schedule(cfg.seed, k_max))


def run_with_schedule(scene, cfg, schedule):
    """One replicate driven by an explicit per-step seed schedule."""
    cfg.validate(scene)
    eps, z0, k_max = cfg.resolve(scene)
    if len(schedule) < k_max:
        raise ValueError("schedule has %d entries, run needs %d"
                         % (len(schedule), k_max))
    d = scene.d
    with_source = scene.source_mode == "general"
    s0, s1, s_step = samplers.step_layout(d, with_source)
    shortcut = scene.source_mode == "shortcut"
    rows_src = _RowSource(scene, cfg, s_step, k_max)
    is_array = cfg.method.startswith("array")
    hcfg = hilbert.HilbertConfig(d, cfg.hilbert_bits or hilbert.DEFAULT_BITS[d])

    n = cfg.n
    pos = np.tile(np.asarray(z0, float), (n, 1))
    alive = np.ones(n, dtype=bool)
    payoff = np.zeros(n)
    acc = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    ident = np.arange(n)
    active_counts = []
    epsilon_mode = cfg.stopping == "epsilon"

    k = 0
    while alive.any() and k < k_max:
        k += 1
        m = int(alive.sum())
        active_counts.append(m)
        plan = handle_inactive(cfg.variant if is_array else "move_to_end", n, m)
        if not is_array:
            plan = {"rows": n, "assignment": "positional", "build": "base"}
        rows = rows_src.step_rows(k, int(schedule[k - 1]), plan)

        act = np.flatnonzero(alive)
        if plan["assignment"] == "prefix":
            # sorted inactive walkers sit past position m-1
            xr = rows[:m]
        else:
            xr = rows[act]

        p_act = pos[act]
        r, _ = scene.nearest(p_act)
        conv = r < eps if epsilon_mode else np.zeros(m, dtype=bool)
        mov = ~conv
        if mov.any():
            ridx = act[mov]
            if with_source:
                w = p_act[mov] + r[mov, None] * samplers.ball_map(
                    d, xr[mov, s0:s0 + s1])
                acc[ridx] += samplers.source_increment(
                    d, r[mov], p_act[mov], w, scene.source_values(w))
            elif shortcut:
                acc[ridx] += samplers.constant_source_shortcut_increment(r[mov])
            pos[ridx] = p_act[mov] + r[mov, None] * samplers.sphere_map(
                d, xr[mov, :s0])
            steps[ridx] += 1

        fin = conv | (k == k_max)
        if fin.any():
            fidx = act[fin]
            fpos = pos[fidx]
            _, prim = scene.nearest(fpos)
            proj = scene.project(fpos, prim)
            payoff[fidx] = scene.boundary_value_unchecked(proj, prim) + acc[fidx]
            pos[fidx] = proj
            alive[fidx] = False

        if is_array and alive.any():
            if cfg.variant == "interleave":
                q = hilbert.sort_key(scene.to_unit_cube(pos), hcfg)
            else:
                q = np.full(n, np.inf)
                live = np.flatnonzero(alive)
                q[live] = hilbert.sort_key(scene.to_unit_cube(pos[live]), hcfg)
            order = np.lexsort((ident, q))
            pos = pos[order]
            alive = alive[order]
            payoff = payoff[order]
            acc = acc[order]
            steps = steps[order]
            ident = ident[order]

    assert not alive.any()
    back = np.argsort(ident)
    payoff = payoff[back]
    return EstimateRecord(float(payoff.mean()), payoff, pos[back], steps[back],
                          active_counts, k, cfg.seed)


def replicate_seeds(master_seed, reps):
    return points.spawn_seeds(master_seed, reps, _REPLICATE_PURPOSE)


def run_replicates(scene, cfg, reps, threads=1):
    """Independent replicates; results do not depend on the thread count."""
    seeds = replicate_seeds(cfg.seed, reps)
    configs = [replace(cfg, seed=int(s)) for s in seeds]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: run(scene, c), configs))
    return [run(scene, c) for c in configs]


def terminal_angles(record):
    """Terminal boundary angles over 2*pi, in [0,1); for unit-disk studies."""
    t = record.terminal
    return np.mod(np.arctan2(t[:, 1], t[:, 0]) / (2.0 * math.pi), 1.0)
