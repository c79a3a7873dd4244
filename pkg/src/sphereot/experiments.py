"""Expected max-diameter scaling experiment over random direction sets.

For each L in a grid, builds `trials` independent equal-area partitions
from i.i.d. uniform directions, records the sampled max cell diameter,
and fits the decay rate of the trial-mean against L. The theoretical
reference exponent splits on p versus n/2 (with a log factor at p = n/2).

Trials are independent jobs keyed by (L, trial) with per-key derived
seeds, so results are byte-identical for any thread count.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import sample_uniform
from .partition import build_partition, cell_diameters
from .transport import CostKind, NonConvergenceError

__all__ = ["ScalingRun", "theoretical_exponent", "scaling_experiment", "report"]

_BOOTSTRAP_REPS = 200


def theoretical_exponent(n: int, p: float) -> tuple[float, bool]:
    """Reference decay exponent of the expected max diameter in L.

    Returns (exponent, has_log_factor).
    """
    if p > n / 2:
        return -1.0 / (2 * (n - 1 + p)), False
    if p == n / 2:
        return -1.0 / (2 * (n - 1 + p)), True
    return -p / (2 * n * (n - 1 + p)), False


@dataclass(frozen=True)
class ScalingRun:
    n: int
    p: float
    cost_kind: str
    L_grid: tuple[int, ...]
    trials_per_L: int
    quad_size: int
    seed: int
    tol: float
    max_diams: np.ndarray  # (len(L_grid), trials), sampled max diameter
    failed: np.ndarray  # bool, same shape; True if retry also failed
    fitted_slope: float
    slope_ci: tuple[float, float]
    theoretical_exponent: float
    has_log_factor: bool


def _trial_seed(seed: int, L: int, trial: int) -> int:
    # fixed mixing so the seed depends only on (seed, L, trial)
    return (seed * 0x9E3779B1 + L * 0x85EBCA77 + trial * 0xC2B2AE3D) & 0x7FFFFFFFFFFF


def _run_trial(n, p, cost_kind, L, trial, quad_size, tol, seed):
    base = _trial_seed(seed, L, trial)
    directions = sample_uniform(n, L, base).points
    quad_count = max(quad_size, 50 * L)
    for attempt in range(2):
        quad = sample_uniform(n, quad_count, base + 1 + attempt)
        try:
            part = build_partition(directions, cost_kind, quad, tol)
        except NonConvergenceError:
            quad_count *= 2
            continue
        geo, euc = cell_diameters(part)
        diam = float(geo.max()) if cost_kind.is_intrinsic else float(euc.max())
        return diam, False
    return math.nan, True


def scaling_experiment(
    n: int,
    p: float,
    L_grid,
    trials: int,
    quad_size: int,
    seed: int,
    cost_kind: CostKind | None = None,
    tol: float = 5e-3,
    threads: int = 1,
) -> ScalingRun:
    """Run the full grid and fit the decay slope of the mean max diameter."""
    L_grid = tuple(int(L) for L in L_grid)
    if any(b <= a for a, b in zip(L_grid, L_grid[1:])):
        raise ValueError("L_grid must be strictly increasing")
    if any(L < 2 for L in L_grid):
        raise ValueError("all grid entries must be >= 2")
    if trials < 3:
        raise ValueError("need at least 3 trials per L")
    if cost_kind is None:
        cost_kind = CostKind.intrinsic(p)

    jobs = [(i, L, t) for i, L in enumerate(L_grid) for t in range(trials)]
    diams = np.full((len(L_grid), trials), math.nan)
    failed = np.zeros((len(L_grid), trials), dtype=bool)

    def work(job):
        i, L, t = job
        return i, t, _run_trial(n, p, cost_kind, L, t, quad_size, tol, seed)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(job) for job in jobs]
    for i, t, (diam, fail) in results:
        diams[i, t] = diam
        failed[i, t] = fail

    means = np.nanmean(diams, axis=1)
    logL = np.log(np.asarray(L_grid, dtype=float))
    slope = float(np.polyfit(logL, np.log(means), 1)[0])

    # bootstrap the slope, resampling only among the successful trials
    valid = [np.flatnonzero(np.isfinite(diams[i])) for i in range(len(L_grid))]
    if all(v.size for v in valid):
        rng = np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFF))
        boot = np.empty(_BOOTSTRAP_REPS)
        resampled = np.empty(len(L_grid))
        for r in range(_BOOTSTRAP_REPS):
            for i, v in enumerate(valid):
                resampled[i] = diams[i, v[rng.integers(0, v.size, size=trials)]].mean()
            boot[r] = np.polyfit(logL, np.log(resampled), 1)[0]
        ci = (float(np.quantile(boot, 0.025)), float(np.quantile(boot, 0.975)))
    else:  # a grid row with no successful trial: no meaningful fit
        ci = (math.nan, math.nan)

    expo, has_log = theoretical_exponent(n, p)
    return ScalingRun(
        n=n, p=float(p), cost_kind=cost_kind.kind, L_grid=L_grid,
        trials_per_L=trials, quad_size=quad_size, seed=seed, tol=tol,
        max_diams=diams, failed=failed, fitted_slope=slope, slope_ci=ci,
        theoretical_exponent=expo, has_log_factor=has_log,
    )


def report(run: ScalingRun, csv_path, json_path) -> dict:
    """Write per-L statistics (CSV) and the fit summary (JSON)."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["L", "mean", "std", "min", "max", "n_failed"])
        for i, L in enumerate(run.L_grid):
            row = run.max_diams[i]
            writer.writerow([
                L,
                repr(float(np.nanmean(row))),
                repr(float(np.nanstd(row))),
                repr(float(np.nanmin(row))),
                repr(float(np.nanmax(row))),
                int(run.failed[i].sum()),
            ])
    summary = {
        "n": run.n,
        "p": run.p,
        "cost_kind": run.cost_kind,
        "L_grid": list(run.L_grid),
        "trials_per_L": run.trials_per_L,
        "quad_size": run.quad_size,
        "seed": run.seed,
        "tol": run.tol,
        "fitted_slope": run.fitted_slope,
        "slope_ci_lower": run.slope_ci[0],
        "slope_ci_upper": run.slope_ci[1],
        "theoretical_exponent": run.theoretical_exponent,
        "has_log_factor": run.has_log_factor,
        "slope_below_theory": run.fitted_slope <= run.theoretical_exponent + 0.05,
        "n_failed": int(run.failed.sum()),
    }
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
