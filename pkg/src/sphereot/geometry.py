"""Sphere primitives: points, distances, uniform sampling, cap volumes.

All randomness in the package flows through counter-based Philox
generators keyed by an integer seed, so every sampling operation is
bit-reproducible across runs and thread counts.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "SphereSample",
    "unit_vector",
    "geodesic_distance",
    "chordal_distance",
    "sample_uniform",
    "sphere_area",
    "cap_measure",
    "cap_lower_bound",
]

_NORM_TOL = 1e-12


def unit_vector(coords) -> np.ndarray:
    """Renormalize coords to a point on S^{n-1}; requires n >= 2."""
    v = np.asarray(coords, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("a unit vector needs at least 2 ambient coordinates")
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not math.isfinite(norm):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return v / norm


def _check_dims(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")


def geodesic_distance(u, v) -> float:
    """Riemannian distance on the sphere, in [0, pi].

    Uses 2*atan2(|u-v|, |u+v|) rather than arccos of the dot product, so
    nearly-coincident and nearly-antipodal pairs keep full precision.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    _check_dims(u, v)
    return 2.0 * math.atan2(float(np.linalg.norm(u - v)), float(np.linalg.norm(u + v)))


def chordal_distance(u, v) -> float:
    """Ambient Euclidean distance between two sphere points, in [0, 2]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    _check_dims(u, v)
    return float(np.linalg.norm(u - v))


@dataclass(frozen=True)
class SphereSample:
    """Immutable i.i.d. uniform sample on S^{n-1}.

    ``points`` has shape (count, n) with unit rows; ``seed`` regenerates it.
    """

    points: np.ndarray
    seed: int
    n: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def to_csv(self, path) -> None:
        header = [f"x{i}" for i in range(self.n)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in self.points:
                writer.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path, seed: int = -1) -> "SphereSample":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(points=data, seed=seed, n=data.shape[1])


def rng_for_seed(seed: int) -> np.random.Generator:
    """Counter-based generator; distinct seeds give independent streams."""
    return np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))


def sample_uniform(n: int, count: int, seed: int) -> SphereSample:
    """Sample `count` uniform points on S^{n-1} by Gaussian normalization."""
    if n < 2:
        raise ValueError("need ambient dimension n >= 2")
    if count < 1:
        raise ValueError("need count >= 1")
    rng = rng_for_seed(seed)
    pts = rng.standard_normal((count, n))
    norms = np.linalg.norm(pts, axis=1)
    # a zero row has probability 0 but would poison the normalization
    bad = norms < 1e-300
    while bad.any():  # pragma: no cover - astronomically unlikely
        pts[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(pts, axis=1)
        bad = norms < 1e-300
    return SphereSample(points=pts / norms[:, None], seed=seed, n=n)


def sphere_area(m: int) -> float:
    """Surface measure |S^m| = 2 pi^{(m+1)/2} / Gamma((m+1)/2); |S^0| = 2."""
    if m < 0:
        raise ValueError("need m >= 0")
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def cap_measure(n: int, r: float) -> float:
    """Probability of a geodesic cap of radius r under the uniform measure.

    Evaluates (|S^{n-2}|/|S^{n-1}|) * int_0^r sin^{n-2} t dt by adaptive
    quadrature (relative error 1e-10); the division by |S^{n-1}| makes it a
    probability, so cap_measure(n, pi) == 1.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if r < -1e-15 or r > math.pi + 1e-15:
        raise ValueError(f"cap radius {r} outside [0, pi]")
    r = min(max(r, 0.0), math.pi)
    if r == 0.0:
        return 0.0
    if n == 2:
        return r / math.pi
    val, _ = integrate.quad(lambda t: math.sin(t) ** (n - 2), 0.0, r,
                            epsrel=1e-10, epsabs=1e-14, limit=200)
    return sphere_area(n - 2) / sphere_area(n - 1) * val


def cap_lower_bound(n: int, a: float, r: float) -> float:
    """Concavity lower bound on cap_measure(n, r), valid for r <= a*pi.

    Normalized the same way as cap_measure (probability units).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0.0 < a <= 0.25:
        raise ValueError(f"a={a} outside (0, 1/4]")
    if r < 0.0 or r > a * math.pi + 1e-15:
        raise ValueError(f"r={r} outside [0, a*pi]")
    slope = math.sin(a * math.pi) / (a * math.pi)
    return (sphere_area(n - 2) / (n - 1)) * slope ** (n - 2) * r ** (n - 1) \
        / sphere_area(n - 1)
