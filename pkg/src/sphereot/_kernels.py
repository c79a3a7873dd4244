"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set the environment variable ``SPHEREOT_PURE=1`` to force the numpy
fallback even when the compiled extension is importable (used by the
benchmark and the backend-agreement tests).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _fastcore

    _HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-environment dependent
    _fastcore = None
    _HAVE_COMPILED = False

_FORCE_PURE = bool(os.environ.get("SPHEREOT_PURE"))

# chunk sizes keep the fallback's temporaries inside L2-ish footprints
_ASSIGN_CHUNK = 16384
_PAIR_CHUNK = 512


def backend_name() -> str:
    if _HAVE_COMPILED and not _FORCE_PURE:
        return "compiled"
    return "numpy"


def _geodesic_from_dot(dot: np.ndarray) -> np.ndarray:
    # 2*atan2(|u-v|, |u+v|): stable at both ends, unlike arccos(dot)
    minus = np.sqrt(np.clip(2.0 - 2.0 * dot, 0.0, None))
    plus = np.sqrt(np.clip(2.0 + 2.0 * dot, 0.0, None))
    return 2.0 * np.arctan2(minus, plus)


def _assign_points_numpy(points, sites, lam, p, intrinsic):
    npts = points.shape[0]
    idx = np.empty(npts, dtype=np.int64)
    minval = np.empty(npts, dtype=np.float64)
    for start in range(0, npts, _ASSIGN_CHUNK):
        stop = min(start + _ASSIGN_CHUNK, npts)
        dot = points[start:stop] @ sites.T
        if intrinsic:
            cost = _geodesic_from_dot(dot) ** p
        else:
            cost = np.clip(2.0 - 2.0 * dot, 0.0, None) ** (0.5 * p)
        cost += lam
        block = np.argmin(cost, axis=1)
        idx[start:stop] = block
        minval[start:stop] = cost[np.arange(stop - start), block]
    return idx, minval


def _pair_diameter_numpy(points):
    npts = points.shape[0]
    if npts < 2:
        return 0.0, 0.0
    mindot = np.inf
    for start in range(0, npts, _PAIR_CHUNK):
        stop = min(start + _PAIR_CHUNK, npts)
        dot = points[start:stop] @ points.T
        # mask the diagonal block's self-pairs
        for i in range(start, stop):
            dot[i - start, i] = np.inf
        mindot = min(mindot, float(dot.min()))
    mindot = min(mindot, 1.0)
    chord2 = max(2.0 - 2.0 * mindot, 0.0)
    geo = 2.0 * np.arctan2(np.sqrt(chord2), np.sqrt(max(2.0 + 2.0 * mindot, 0.0)))
    return float(geo), float(np.sqrt(chord2))


def assign_points(points, sites, lam, p, intrinsic, force_pure=False):
    """Per-point argmin of cost(point, site) + lam[site], first-index ties.

    Returns ``(idx, minval)`` with the winning site index and the attained
    minimum for every point.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    sites = np.ascontiguousarray(sites, dtype=np.float64)
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if _HAVE_COMPILED and not _FORCE_PURE and not force_pure:
        return _fastcore.assign_points(points, sites, lam, float(p), bool(intrinsic))
    return _assign_points_numpy(points, sites, lam, float(p), bool(intrinsic))


def pair_diameter(points, force_pure=False):
    """Max pairwise (geodesic, Euclidean) distance over unit vectors."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if _HAVE_COMPILED and not _FORCE_PURE and not force_pure:
        return _fastcore.pair_diameter(points)
    return _pair_diameter_numpy(points)
