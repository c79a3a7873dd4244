"""Semi-discrete optimal transport on the sphere.

Finds dual weights lambda so that the power cells of the cost
c(omega, omega_l) + lambda_l (chordal^p or geodesic^p) each carry mass 1/L
under the uniform measure, discretized by Monte-Carlo quadrature. The
concave dual

    G(lambda) = mean_omega min_l [c(omega, omega_l) + lambda_l]
                - (1/L) sum_l lambda_l

has gradient dG/dlambda_l = m_l - 1/L, where m_l is the mass of cell l, so
mass balancing is gradient ascent on G. A backtracking line search with
the usual semi-discrete damping safeguard (no cell mass may fall below
half the smaller of the initial minimum mass and 1/L) keeps every iterate
in the region where the masses behave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import SphereSample, sample_uniform

__all__ = [
    "CostKind",
    "DualWeights",
    "SolveReport",
    "NonConvergenceError",
    "EmptyCellError",
    "assign",
    "assign_all",
    "cell_masses",
    "solve_dual",
    "mk_distance",
]

_HELDOUT_SEED_OFFSET = 0x5DEECE66D  # fixed offset deriving the validation stream


class NonConvergenceError(RuntimeError):
    """Solver failed to reach the mass tolerance within max_iter."""

    def __init__(self, max_mass_error: float, iterations: int):
        super().__init__(
            f"mass error {max_mass_error:.3e} after {iterations} iterations"
        )
        self.max_mass_error = max_mass_error
        self.iterations = iterations


class EmptyCellError(RuntimeError):
    """A cell has zero quadrature mass at lambda = 0 (quadrature too small)."""


@dataclass(frozen=True)
class CostKind:
    """Ground cost: |omega - omega_l|^p (extrinsic) or geodesic^p (intrinsic)."""

    kind: str
    p: float

    def __post_init__(self):
        if self.kind not in ("extrinsic", "intrinsic"):
            raise ValueError(f"unknown cost kind {self.kind!r}")
        if not self.p > 1:
            raise ValueError(f"need p > 1, got {self.p}")

    @classmethod
    def extrinsic(cls, p: float) -> "CostKind":
        return cls("extrinsic", float(p))

    @classmethod
    def intrinsic(cls, p: float) -> "CostKind":
        return cls("intrinsic", float(p))

    @property
    def is_intrinsic(self) -> bool:
        return self.kind == "intrinsic"


@dataclass(frozen=True)
class DualWeights:
    """Gauge-fixed Kantorovich potentials defining the power cells.

    Shifting every lambda_l by a constant leaves the cells unchanged, so
    weights are stored with min(lambda) = 0.
    """

    directions: np.ndarray  # (L, n)
    lam: np.ndarray  # (L,)
    cost: CostKind

    def __post_init__(self):
        dirs = np.ascontiguousarray(self.directions, dtype=np.float64)
        lam = np.asarray(self.lam, dtype=np.float64)
        if dirs.ndim != 2 or lam.shape != (dirs.shape[0],):
            raise ValueError("directions must be (L, n) with matching lambda")
        lam = lam - lam.min()
        dirs.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "lam", lam)

    @property
    def L(self) -> int:
        return self.directions.shape[0]

    @property
    def n(self) -> int:
        return self.directions.shape[1]


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    max_mass_error: float
    dual_value: float
    transport_cost_p: float
    quadrature_size: int


def assign(omega, w: DualWeights) -> int:
    """Cell index of a single point; smallest index wins ties."""
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (w.n,):
        raise ValueError(f"dimension mismatch: point {omega.shape}, sites n={w.n}")
    idx, _ = _kernels.assign_points(
        omega[None, :], w.directions, w.lam, w.cost.p, w.cost.is_intrinsic
    )
    return int(idx[0])


def assign_all(points, w: DualWeights) -> np.ndarray:
    """Cell indices for an array of points, shape (count,)."""
    points = np.asarray(points, dtype=np.float64)
    idx, _ = _kernels.assign_points(
        points, w.directions, w.lam, w.cost.p, w.cost.is_intrinsic
    )
    return idx


def cell_masses(w: DualWeights, quad: SphereSample) -> np.ndarray:
    """Fraction of quadrature points in each cell; sums to 1 exactly."""
    if quad.count < 1:
        raise ValueError("empty quadrature")
    idx = assign_all(quad.points, w)
    counts = np.bincount(idx, minlength=w.L)
    return counts / quad.count


def _masses_and_dual(points, sites, lam, cost: CostKind):
    idx, minval = _kernels.assign_points(
        points, sites, lam, cost.p, cost.is_intrinsic
    )
    counts = np.bincount(idx, minlength=sites.shape[0])
    m = counts / points.shape[0]
    dual = float(minval.mean()) - float(lam.mean())
    return idx, m, dual


def _ascend(points, sites, lam, cost, target, max_iter, mass_floor, step):
    """Gradient ascent with backtracking on the concave dual.

    Returns (lam, iterations, step); stops when the max mass residual on
    `points` is <= target or the iteration budget runs out.
    """
    L = sites.shape[0]
    nu = 1.0 / L
    _, m, dual = _masses_and_dual(points, sites, lam, cost)
    it = 0
    while it < max_iter:
        g = m - nu
        err = float(np.abs(g).max())
        if err <= target:
            break
        it += 1
        gnorm2 = float(g @ g)
        accepted = False
        t = step
        for _ in range(60):
            cand = lam + t * g
            _, m_c, dual_c = _masses_and_dual(points, sites, cand, cost)
            if dual_c >= dual + 0.25 * t * gnorm2 and m_c.min() >= mass_floor:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            # quadrature-level kink: no measurable ascent direction left
            break
        lam = cand - cand.min()
        m, dual = m_c, dual_c
        step = t * 2.0
    return lam, it, step, m, dual


def solve_dual(
    directions,
    cost_kind: CostKind,
    quad: SphereSample,
    tol: float,
    max_iter: int = 5000,
    validate: bool = True,
    warm_start: bool = True,
):
    """Solve for dual weights equalizing cell masses to 1/L.

    Parameters
    ----------
    directions : (L, n) array of pairwise-distinct unit vectors.
    cost_kind : ground cost (extrinsic or intrinsic) with its exponent p.
    quad : Monte-Carlo quadrature; needs count >= 50 L.
    tol : target max |m_l - 1/L|, measured on a held-out sample of the
        same size with a seed derived from quad.seed (set validate=False
        to treat the quadrature itself as the target measure, e.g. for
        discrete oracle comparisons).
    max_iter : total accepted-iteration budget.
    warm_start : pre-solve on nested subsamples of the quadrature before
        refining on the full set (pure speedup, deterministic).

    Returns
    -------
    (DualWeights, SolveReport)

    Raises
    ------
    EmptyCellError : a cell is empty at lambda = 0.
    NonConvergenceError : tolerance not met within max_iter.
    """
    sites = np.ascontiguousarray(directions, dtype=np.float64)
    if sites.ndim != 2 or sites.shape[0] < 1:
        raise ValueError("directions must be a nonempty (L, n) array")
    L = sites.shape[0]
    if quad.count < 50 * L:
        raise ValueError(f"quadrature size {quad.count} < 50 L = {50 * L}")
    if tol <= 0:
        raise ValueError("need tol > 0")
    _check_distinct(sites)
    points = quad.points

    lam = np.zeros(L)
    _, m0, _ = _masses_and_dual(points, sites, lam, cost_kind)
    if m0.min() == 0.0:
        raise EmptyCellError(
            f"empty cell at lambda=0 for L={L}, quad={quad.count}; enlarge quadrature"
        )
    mass_floor = 0.5 * min(float(m0.min()), 1.0 / L)

    # train slightly below tol so quadrature noise does not spoil validation
    target = 0.5 * tol
    quantum = 1.0 / quad.count
    target = max(target, 0.4 * quantum)  # cannot resolve below one atom

    step = 1.0
    iters = 0
    if warm_start and quad.count >= 400 * L:
        for frac in (16, 4):
            sub = points[: quad.count // frac]
            lam, it, step, _, _ = _ascend(
                sub, sites, lam, cost_kind, max(target, 2.0 / sub.shape[0]),
                max_iter // 4, 0.0 if L == 1 else mass_floor, step,
            )
            iters += it

    held = None
    if validate and L > 1:
        held = sample_uniform(
            quad.n, quad.count, (quad.seed + _HELDOUT_SEED_OFFSET) & 0x7FFFFFFFFFFFFFFF
        ).points

    max_mass_error = math.inf
    while True:
        lam, it, step, m, dual = _ascend(
            points, sites, lam, cost_kind, target, max_iter - iters,
            mass_floor, step,
        )
        iters += it
        if held is not None:
            counts = np.bincount(assign_all(held, DualWeights(sites, lam, cost_kind)),
                                 minlength=L)
            max_mass_error = float(np.abs(counts / held.shape[0] - 1.0 / L).max())
        else:
            max_mass_error = float(np.abs(m - 1.0 / L).max())
        if max_mass_error <= tol:
            break
        if iters >= max_iter or target <= 0.4 * quantum:
            raise NonConvergenceError(max_mass_error, iters)
        target = max(0.5 * target, 0.4 * quantum)

    weights = DualWeights(sites, lam, cost_kind)
    idx, minval = _kernels.assign_points(
        points, sites, weights.lam, cost_kind.p, cost_kind.is_intrinsic
    )
    cost_vals = minval - weights.lam[idx]
    report = SolveReport(
        iterations=iters,
        max_mass_error=max_mass_error,
        dual_value=float(minval.mean()) - float(weights.lam.mean()),
        transport_cost_p=float(cost_vals.mean()),
        quadrature_size=quad.count,
    )
    return weights, report


def mk_distance(report: SolveReport, p: float) -> float:
    """Monge-Kantorovich distance, the p-th root of the transport cost."""
    return report.transport_cost_p ** (1.0 / p)


def _check_distinct(sites: np.ndarray) -> None:
    L = sites.shape[0]
    if L > 1:
        gram = sites @ sites.T
        np.fill_diagonal(gram, -np.inf)
        if gram.max() >= 1.0 - 1e-12:
            raise ValueError("directions must be pairwise distinct")
