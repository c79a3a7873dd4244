# cython: language_level=3
"""Compiled kernels for the hot inner loops.

Two loops dominate runtime: assigning quadrature points to power cells
(every solver iteration re-scans the full quadrature) and the pairwise
diameter scan inside each cell. The assignment loop exploits that the
chord length lower-bounds the geodesic distance: a cheap chord-based
cost bound prunes almost every site before the expensive atan2 call,
which is what lets the scalar C loop beat the vectorized numpy fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, atan2, pow, sqrt

cnp.import_array()


def assign_points(
    cnp.ndarray[cnp.float64_t, ndim=2] points,
    cnp.ndarray[cnp.float64_t, ndim=2] sites,
    cnp.ndarray[cnp.float64_t, ndim=1] lam,
    double p,
    bint intrinsic,
):
    """Assign each point to the power cell minimizing cost + weight.

    Returns (idx, minval) where idx[i] is the first index attaining the
    minimum of c(points[i], sites[l]) + lam[l] and minval[i] that minimum.
    """
    cdef Py_ssize_t npts = points.shape[0]
    cdef Py_ssize_t dim = points.shape[1]
    cdef Py_ssize_t nsites = sites.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(npts, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] minval = np.empty(npts, dtype=np.float64)
    cdef Py_ssize_t i, l, k
    cdef bint p_is_2 = p == 2.0
    cdef double half_p = 0.5 * p
    cdef double dot, chord2, plus2, chord_cost, geo, cost, best
    cdef double x0 = 0.0, x1 = 0.0, x2 = 0.0
    cdef Py_ssize_t besti

    for i in range(npts):
        if dim == 3:
            x0 = points[i, 0]
            x1 = points[i, 1]
            x2 = points[i, 2]
        best = INFINITY
        besti = 0
        for l in range(nsites):
            if dim == 3:
                dot = x0 * sites[l, 0] + x1 * sites[l, 1] + x2 * sites[l, 2]
            else:
                dot = 0.0
                for k in range(dim):
                    dot += points[i, k] * sites[l, k]
            chord2 = 2.0 - 2.0 * dot
            if chord2 < 0.0:
                chord2 = 0.0
            if p_is_2:
                chord_cost = chord2
            else:
                chord_cost = pow(chord2, half_p)
            if intrinsic:
                # chord <= geodesic, so this cost can only be optimistic;
                # skipping when it already loses avoids the atan2
                if chord_cost + lam[l] >= best:
                    continue
                plus2 = 2.0 + 2.0 * dot
                if plus2 < 0.0:
                    plus2 = 0.0
                geo = 2.0 * atan2(sqrt(chord2), sqrt(plus2))
                if p_is_2:
                    cost = geo * geo + lam[l]
                else:
                    cost = pow(geo, p) + lam[l]
            else:
                cost = chord_cost + lam[l]
            if cost < best:
                best = cost
                besti = l
        idx[i] = besti
        minval[i] = best
    return idx, minval


def pair_diameter(cnp.ndarray[cnp.float64_t, ndim=2] points):
    """Max pairwise geodesic and Euclidean distance over unit vectors."""
    cdef Py_ssize_t npts = points.shape[0]
    cdef Py_ssize_t dim = points.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double dot, chord2, geo, plus2, mindot = 2.0
    cdef double x0, x1, x2

    if npts < 2:
        return 0.0, 0.0
    # both distances are decreasing in the dot product, so the max pair
    # is the min-dot pair for either metric
    if dim == 3:
        for i in range(npts):
            x0 = points[i, 0]
            x1 = points[i, 1]
            x2 = points[i, 2]
            for j in range(i + 1, npts):
                dot = x0 * points[j, 0] + x1 * points[j, 1] + x2 * points[j, 2]
                if dot < mindot:
                    mindot = dot
    else:
        for i in range(npts):
            for j in range(i + 1, npts):
                dot = 0.0
                for k in range(dim):
                    dot += points[i, k] * points[j, k]
                if dot < mindot:
                    mindot = dot
    chord2 = 2.0 - 2.0 * mindot
    if chord2 < 0.0:
        chord2 = 0.0
    plus2 = 2.0 + 2.0 * mindot
    if plus2 < 0.0:
        plus2 = 0.0
    geo = 2.0 * atan2(sqrt(chord2), sqrt(plus2))
    return geo, sqrt(chord2)
