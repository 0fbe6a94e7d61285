"""Error norms, convergence studies, and statistical checks.

Houses the relative L^p error, least-squares slope fits, the fixed-vs
optimal mesh convergence harness, the mesh-size rule dx proportional to
N^(-1/3), the empirical-CDF binomial variance check, and per-cell variance
comparisons between estimators.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ZeroReference

__all__ = [
    "ErrorReport",
    "lp_error",
    "fit_slope",
    "mean_field",
    "convergence_study",
    "optimal_dx",
    "estimate_c1",
    "cdf_variance_check",
    "error_ratio_table",
    "cellwise_variance_fraction",
]


@dataclass
class ErrorReport:
    """Per-N mean-field errors for one or more methods plus fitted slopes."""

    ns: np.ndarray
    errors: dict[str, np.ndarray]
    slopes: dict[str, float]
    p: float = 2.0
    runs: int = 5
    runtimes: dict[str, np.ndarray] = field(default_factory=dict)

    def ratio(self, num: str = "mc", den: str = "gbmc") -> np.ndarray:
        return np.asarray(self.errors[num]) / np.asarray(self.errors[den])


def lp_error(numerical, reference, p: float = 2.0, dx: float = 1.0) -> float:
    """Relative L^p distance on a common uniform grid (midpoint rule).

    The cell width cancels in the ratio for finite p but is kept so the
    absolute norms are meaningful if inspected.
    """
    num = np.asarray(numerical, dtype=float).ravel()
    ref = np.asarray(reference, dtype=float).ravel()
    if num.shape != ref.shape:
        raise ValueError(f"shape mismatch: {num.shape} vs {ref.shape}")
    diff = num - ref
    if np.isinf(p):
        ref_norm = float(np.max(np.abs(ref)))
        err = float(np.max(np.abs(diff)))
    else:
        ref_norm = float((np.abs(ref) ** p).sum() * dx) ** (1.0 / p)
        err = float((np.abs(diff) ** p).sum() * dx) ** (1.0 / p)
    if ref_norm == 0.0:
        raise ZeroReference("reference field has zero norm")
    return err / ref_norm


def fit_slope(ns, errors) -> float:
    """Least-squares slope of log(error) against log(N)."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ns.size < 2:
        raise ValueError("need at least two points to fit a slope")
    return float(np.polyfit(np.log(ns), np.log(errors), 1)[0])


def mean_field(runner: Callable, n: int, seeds: Sequence[int], workers: int = 1):
    """Average the fields returned by runner(n, seed) -> (x, field) over
    the seeds; all repetitions must share the evaluation points."""
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(lambda s: runner(n, int(s)), seeds))
    else:
        outs = [runner(n, int(s)) for s in seeds]
    x = np.asarray(outs[0][0], dtype=float)
    fields = np.stack([np.asarray(f, dtype=float) for _, f in outs])
    return x, fields.mean(axis=0)


def convergence_study(
    runners: Mapping[str, Callable],
    ns: Sequence[int],
    reference: Callable[[np.ndarray], np.ndarray],
    runs: int = 5,
    p: float = 2.0,
    seed: int = 0,
    timeit: bool = False,
    workers: int = 1,
) -> ErrorReport:
    """Per-N relative error of the mean of ``runs`` independent fields.

    ``runners`` maps a method id to a callable (n, seed) -> (x, field);
    evaluation points may differ between methods and particle counts (the
    optimal-mesh track refines its grid with N), so the reference is a
    callable evaluated wherever each method reports its field.  All
    methods at a given (n, repetition) share a seed, pairing comparisons.
    """
    ns = np.asarray(ns, dtype=int)
    if ns.size == 0:
        raise ValueError("empty particle-count list")
    if runs < 2:
        raise ValueError("need at least two runs per point")
    seed_table = np.random.SeedSequence(seed).generate_state(ns.size * runs) >> 1
    seed_table = seed_table.reshape(ns.size, runs)
    errors = {m: np.empty(ns.size) for m in runners}
    runtimes = {m: np.empty(ns.size) for m in runners}
    for i, n in enumerate(ns):
        for method, runner in runners.items():
            t0 = _time.perf_counter()
            x, mean = mean_field(runner, int(n), seed_table[i], workers=workers)
            runtimes[method][i] = (_time.perf_counter() - t0) / runs
            errors[method][i] = lp_error(mean, reference(x), p=p)
    slopes = {m: fit_slope(ns, errors[m]) for m in runners}
    return ErrorReport(
        ns=ns,
        errors=errors,
        slopes=slopes,
        p=p,
        runs=runs,
        runtimes=runtimes if timeit else {},
    )


def optimal_dx(n: int, c1: float, norm_u: float = 1.0) -> float:
    """Mesh size balancing histogram bias against sampling noise,
    dx = (norm / (4 c1^2 n))^(1/3)."""
    if c1 <= 0 or n < 1:
        raise ValueError("need c1 > 0 and n >= 1")
    return float((norm_u / (4.0 * c1**2 * n)) ** (1.0 / 3.0))


def estimate_c1(
    error_at_dx: Callable[[float], float], dx_coarse: float, dx_fine: float
) -> float:
    """Pilot estimate of the first-order mesh-bias coefficient from errors
    at two mesh sizes, assuming error ~ c0 + c1 dx at large N."""
    e1 = error_at_dx(dx_coarse)
    e2 = error_at_dx(dx_fine)
    c1 = (e1 - e2) / (dx_coarse - dx_fine)
    return float(max(c1, 1e-12))


def cdf_variance_check(
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    cdf: Callable[[np.ndarray], np.ndarray],
    n: int,
    points: np.ndarray,
    reps: int,
    rng: np.random.Generator,
    n_se: float = 5.0,
) -> dict:
    """Check that the empirical CDF of n i.i.d. samples has the binomial
    variance p(1-p)/n at each query point.

    The tolerance band is ``n_se`` standard errors of the sample variance,
    computed from the exact fourth central moment of a binomial mean (a
    normal approximation is far too loose in the CDF tails).
    """
    points = np.asarray(points, dtype=float)
    p_true = np.clip(np.asarray(cdf(points), dtype=float), 0.0, 1.0)
    counts = np.zeros((reps, points.size))
    chunk = max(1, int(5_000_000 // max(n, 1)))
    done = 0
    while done < reps:
        b = min(chunk, reps - done)
        samples = np.stack([sampler(rng, n) for _ in range(b)])
        counts[done:done + b] = (samples[:, :, None] <= points[None, None, :]).sum(axis=1)
        done += b
    u_hat = counts / n
    s2 = u_hat.var(axis=0, ddof=1)
    sigma2 = p_true * (1.0 - p_true) / n
    q_true = 1.0 - p_true
    mu4 = p_true * q_true * (1.0 + 3.0 * (n - 2) * p_true * q_true) / n**3
    var_s2 = mu4 / reps - sigma2**2 * (reps - 3) / (reps * (reps - 1))
    se = np.sqrt(np.maximum(var_s2, 0.0))
    passed = np.abs(s2 - sigma2) <= n_se * se + 1e-300
    return {
        "points": points,
        "p": p_true,
        "sample_variance": s2,
        "predicted_variance": sigma2,
        "standard_error": se,
        "passed": passed,
        "pass_fraction": float(np.mean(passed)),
    }


def error_ratio_table(report: ErrorReport) -> dict[str, np.ndarray]:
    """MC over GBMC error ratios per particle count."""
    out: dict[str, np.ndarray] = {"N": np.asarray(report.ns)}
    if "mc" in report.errors and "gbmc" in report.errors:
        out["ratio"] = report.ratio("mc", "gbmc")
    if "mc_opt" in report.errors and "gbmc" in report.errors:
        out["ratio_opt"] = report.ratio("mc_opt", "gbmc")
    return out


def cellwise_variance_fraction(samples_a: np.ndarray, samples_b: np.ndarray) -> float:
    """Fraction of cells where estimator A has strictly smaller variance
    across replications (rows) than estimator B."""
    va = np.var(np.asarray(samples_a, dtype=float), axis=0, ddof=1)
    vb = np.var(np.asarray(samples_b, dtype=float), axis=0, ddof=1)
    return float(np.mean(va < vb))
