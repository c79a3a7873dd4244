"""Exact one-dimensional Monge-Kantorovich distances between projections.

The inner kernel of the sliced distances: project an empirical measure
onto a direction, then integrate the quantile gap between the two
projected measures. The quantile-merge form handles unequal supports and
masses; equal-size uniform inputs reduce to sorted pairing automatically.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "EmpiricalMeasure",
    "Projected1D",
    "empirical_measure",
    "project",
    "w_p_1d",
    "w_p_values",
    "moment",
]

from dataclasses import dataclass

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted point cloud in R^n; masses are positive and sum to 1."""

    points: np.ndarray  # (m, n)
    masses: np.ndarray  # (m,)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        w = np.ascontiguousarray(self.masses, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a nonempty (m, n) array")
        if w.shape != (pts.shape[0],):
            raise ValueError("masses must match the number of points")
        if (w <= 0).any():
            raise ValueError("masses must be positive")
        if abs(w.sum() - 1.0) > _MASS_TOL:
            raise ValueError(f"masses sum to {w.sum()}, not 1")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", w)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def uniform(self) -> bool:
        return bool(np.allclose(self.masses, 1.0 / self.m, atol=_MASS_TOL, rtol=0.0))

    @classmethod
    def from_csv(cls, path, mass_column: str = "mass") -> "EmpiricalMeasure":
        """Read points from CSV; a `mass` column is optional (else uniform)."""
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if mass_column in header:
            j = header.index(mass_column)
            masses = data[:, j]
            pts = np.delete(data, j, axis=1)
            return empirical_measure(pts, masses)
        return empirical_measure(data)


def empirical_measure(points, masses=None) -> EmpiricalMeasure:
    """Build an EmpiricalMeasure, normalizing masses (uniform if omitted)."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if masses is None:
        masses = np.full(points.shape[0], 1.0 / points.shape[0])
    else:
        masses = np.asarray(masses, dtype=np.float64)
        total = masses.sum()
        if total <= 0:
            raise ValueError("total mass must be positive")
        masses = masses / total
    return EmpiricalMeasure(points=points, masses=masses)


@dataclass(frozen=True)
class Projected1D:
    """Pushforward of an empirical measure under x -> <x, direction>."""

    values: np.ndarray
    masses: np.ndarray
    direction: np.ndarray


def project(mu: EmpiricalMeasure, omega) -> Projected1D:
    """Project onto a direction: values_i = <x_i, omega>, masses kept."""
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (mu.n,):
        raise ValueError(f"dimension mismatch: measure n={mu.n}, omega {omega.shape}")
    return Projected1D(values=mu.points @ omega, masses=mu.masses, direction=omega)


def _quantile_cost(av, aw, bv, bw, p: float) -> float:
    """Integral of |F_a^{-1} - F_b^{-1}|^p over the merged quantile grid."""
    ia = np.argsort(av, kind="stable")
    ib = np.argsort(bv, kind="stable")
    av, aw = av[ia], aw[ia]
    bv, bw = bv[ib], bw[ib]
    ca = np.cumsum(aw)
    cb = np.cumsum(bw)
    grid = np.union1d(ca, cb)
    grid = grid[grid <= 1.0 + 1e-15]
    grid[-1] = min(grid[-1], 1.0)
    widths = np.diff(np.concatenate(([0.0], grid)))
    # quantile on the half-open interval left of each grid point
    qa = av[np.searchsorted(ca, grid - 0.5 * widths, side="right").clip(0, av.size - 1)]
    qb = bv[np.searchsorted(cb, grid - 0.5 * widths, side="right").clip(0, bv.size - 1)]
    return float(np.sum(widths * np.abs(qa - qb) ** p))


def w_p_1d(a: Projected1D, b: Projected1D, p: float) -> float:
    """Exact 1D p-Monge-Kantorovich distance via the co-monotone coupling."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    av = np.asarray(a.values, dtype=np.float64)
    bv = np.asarray(b.values, dtype=np.float64)
    aw = np.asarray(a.masses, dtype=np.float64)
    bw = np.asarray(b.masses, dtype=np.float64)
    if av.size == bv.size and np.allclose(aw, bw[0], atol=_MASS_TOL, rtol=0.0) \
            and np.allclose(bw, bw[0], atol=_MASS_TOL, rtol=0.0):
        # equal-size uniform case: sorted pairing
        cost = float(np.mean(np.abs(np.sort(av, kind="stable")
                                    - np.sort(bv, kind="stable")) ** p))
    else:
        cost = _quantile_cost(av, aw, bv, bw, p)
    return cost ** (1.0 / p)


def w_p_values(values1, values2, p: float) -> np.ndarray:
    """Batched uniform equal-size w_p along axis 1.

    values1, values2: (n_dirs, m) projections of two uniform m-point
    measures; returns the per-direction distances, shape (n_dirs,).
    """
    v1 = np.sort(np.asarray(values1, dtype=np.float64), axis=1, kind="stable")
    v2 = np.sort(np.asarray(values2, dtype=np.float64), axis=1, kind="stable")
    return np.mean(np.abs(v1 - v2) ** p, axis=1) ** (1.0 / p)


def moment(mu: EmpiricalMeasure, p: float) -> float:
    """p-th moment sum_i mass_i |x_i|^p (caller takes the root)."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    return float(np.sum(mu.masses * np.linalg.norm(mu.points, axis=1) ** p))
