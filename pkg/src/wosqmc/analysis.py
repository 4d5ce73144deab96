"""Replicate statistics, log-log rate fits, the Poisson-kernel discrepancy
study, and the vector-wise Sobol' index / mean dimension estimator."""

import math
from dataclasses import dataclass

import numpy as np

from . import points

SQRT_PI_OVER_2_LN2 = math.sqrt(math.pi / 2.0) * math.log(2.0)

RATE_FIT_MIN_N = 128  # regressions use sample sizes n >= 2^7


def fit_loglog(pairs, min_n=RATE_FIT_MIN_N):
    """OLS slope and intercept of log(value) on log(n), n >= min_n only."""
    pts = [(n, v) for n, v in pairs if n >= min_n]
    if len(pts) < 2:
        raise ValueError("need at least two pairs with n >= %d" % min_n)
    ln = np.log([p[0] for p in pts])
    lv = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(ln, lv, 1)
    return float(slope), float(intercept)


def summarize(estimates, exact=None):
    """Replicate variance (unbiased) and, when the truth is known, MSE."""
    e = np.asarray(estimates, dtype=float)
    if e.size < 2:
        raise ValueError("need at least two replicates")
    out = {"mean": float(e.mean()), "variance": float(e.var(ddof=1)),
           "reps": int(e.size)}
    if exact is not None:
        out["mse"] = float(((e - exact) ** 2).mean())
    return out


def _jackknife_var_of_spread(values, exact=None):
    """Jackknife variance of the variance (or MSE) estimator."""
    v = np.asarray(values, dtype=float)
    n = v.size
    stats = np.empty(n)
    for i in range(n):
        rest = np.delete(v, i)
        stats[i] = rest.var(ddof=1) if exact is None else ((rest - exact) ** 2).mean()
    return (n - 1) / n * ((stats - stats.mean()) ** 2).sum()


def reduction_factor(method_estimates, mc_estimates, exact=None):
    """Var_MC / Var_method (MSE ratio when ``exact`` is given), with a
    delta-method standard error from jackknifed spread estimates."""
    me = np.asarray(method_estimates, float)
    mc = np.asarray(mc_estimates, float)
    if me.size < 2 or mc.size < 2:
        raise ValueError("need at least two replicates per method")
    if exact is None:
        v1, v0 = mc.var(ddof=1), me.var(ddof=1)
    else:
        v1 = ((mc - exact) ** 2).mean()
        v0 = ((me - exact) ** 2).mean()
    if v0 == 0.0:
        raise ZeroDivisionError("method spread is exactly zero")
    ratio = v1 / v0
    rel2 = (_jackknife_var_of_spread(mc, exact) / v1 ** 2
            + _jackknife_var_of_spread(me, exact) / v0 ** 2)
    return ratio, ratio * math.sqrt(rel2)


# ---------------------------------------------------------------------------
# Poisson kernel discrepancy study (unit disk)

def poisson_kernel(z, x):
    """Exit-angle density (1 - |z|^2) / |z - theta(x)|^2 on the unit disk."""
    z = np.asarray(z, dtype=float)
    nz2 = float(z @ z)
    if nz2 >= 1.0:
        raise ValueError("needs an interior point, |z| < 1")
    x = np.asarray(x, dtype=float)
    a = 2.0 * math.pi * x
    dx = z[0] - np.cos(a)
    dy = z[1] - np.sin(a)
    return (1.0 - nz2) / (dx * dx + dy * dy)


def _cdf_axis(t, x):
    """CDF of the exit angle for z = (t, 0), t >= 0, on x in [0, 1)."""
    if t == 0.0:
        return np.asarray(x, dtype=float).copy()
    c = (1.0 + t) / (1.0 - t)
    x = np.asarray(x, dtype=float)
    val = np.arctan(c * np.tan(math.pi * x)) / math.pi
    return np.where(x < 0.5, val, np.where(x == 0.5, 0.5, 1.0 + val))


def poisson_cdf(z, x):
    """P_z(x) = integral of the Poisson kernel from 0 to x."""
    z = np.asarray(z, dtype=float)
    t = float(np.sqrt(z @ z))
    if t >= 1.0:
        raise ValueError("needs an interior point, |z| < 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = math.atan2(z[1], z[0]) / (2.0 * math.pi)

    def lifted(y):
        f = np.floor(y)
        return f + _cdf_axis(t, y - f)

    out = lifted(x - a) - lifted(np.asarray(-a))
    return np.clip(out, 0.0, 1.0)


def ks_distance(angles, z):
    """One-sample Kolmogorov-Smirnov distance of exit angles against the
    Poisson law from z; equals the star discrepancy in one dimension."""
    x = np.sort(np.asarray(angles, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    f = poisson_cdf(z, x)
    i = np.arange(1, n + 1)
    return float(np.maximum(i / n - f, f - (i - 1) / n).max())


def ks_mc_reference(n):
    """Expected KS distance of an IID n-sample, sqrt(pi/2) ln2 / sqrt(n)."""
    return SQRT_PI_OVER_2_LN2 / math.sqrt(n)


def ks_best_possible(n):
    return 1.0 / (2.0 * n)


# ---------------------------------------------------------------------------
# vector-wise Sobol' indices (Jansen pivot estimator over step blocks)

_JANSEN_PURPOSE = 3


@dataclass
class SobolReport:
    """Total indices per step block, raw and clamped at zero, with the
    replicate variance and the partial mean dimension."""

    tau2_raw: np.ndarray
    tau2: np.ndarray
    se_tau2: np.ndarray
    sigma2: float
    nu: float
    nu_raw: float
    nu_se: float
    reps: int
    k_prime: int
    convention: str = "step-block"


def jansen_total_index(runner, base_schedule, k, refresh_seed, base_value=None):
    """One replicate's squared Jansen pivot for step block k:
    (1/2) (F(X) - F(X with block k refreshed))^2."""
    base_schedule = np.asarray(base_schedule)
    if not 1 <= k <= len(base_schedule):
        raise ValueError("column %d out of schedule range" % k)
    if base_value is None:
        base_value = runner(base_schedule)
    alt = base_schedule.copy()
    alt[k - 1] = refresh_seed
    return 0.5 * (base_value - runner(alt)) ** 2


def jansen_study(runner, k_prime, reps, schedule_len, seed):
    """Vector-wise total indices for step blocks 1..k_prime.

    runner(schedule) must be a deterministic map from a per-step seed
    schedule to the estimator value. Every replicate draws a fresh base
    schedule, evaluates the base run once and k_prime refreshed runs.
    """
    if schedule_len < k_prime:
        raise ValueError("schedule shorter than k_prime")
    rng = points.derive_rng(seed, _JANSEN_PURPOSE)
    base_vals = np.empty(reps)
    sq = np.empty((reps, k_prime))
    for r in range(reps):
        sched = rng.integers(0, 2 ** 63, size=schedule_len)
        refresh = rng.integers(0, 2 ** 63, size=k_prime)
        base = runner(sched)
        base_vals[r] = base
        for k in range(k_prime):
            sq[r, k] = jansen_total_index(runner, sched, k + 1, refresh[k],
                                          base_value=base)
    return _report_from_samples(base_vals, sq)


def _report_from_samples(base_vals, sq):
    reps, k_prime = sq.shape
    tau2_raw = sq.mean(axis=0)
    se_tau2 = sq.std(axis=0, ddof=1) / math.sqrt(reps)
    tau2 = np.maximum(tau2_raw, 0.0)
    sigma2 = float(base_vals.var(ddof=1))
    if sigma2 <= 0.0:
        raise ZeroDivisionError("estimator variance is zero")
    nu = float(tau2.sum() / sigma2)
    nu_raw = float(tau2_raw.sum() / sigma2)
    # bootstrap over replicates for the mean-dimension uncertainty
    brng = np.random.default_rng(1234)
    boot = np.empty(200)
    for b in range(boot.size):
        idx = brng.integers(0, reps, size=reps)
        s2 = base_vals[idx].var(ddof=1)
        boot[b] = np.maximum(sq[idx].mean(axis=0), 0.0).sum() / s2 if s2 > 0 else np.nan
    nu_se = float(np.nanstd(boot))
    return SobolReport(tau2_raw, tau2, se_tau2, sigma2, nu, nu_raw, nu_se,
                       reps, k_prime)


def mean_dimension(report):
    """Partial mean dimension: sum of clamped total indices over sigma^2."""
    return report.nu
