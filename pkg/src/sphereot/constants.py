"""Explicit constants behind the intrinsic and extrinsic diameter bounds.

Each constant is recomputed per (n, p); nothing is interpolated or assumed
monotone in p. Because the cap-volume display the bounds are derived from
omits the probability normalization of the uniform measure, every
prefactor is exposed in two variants: ``*_printed`` exactly as stated, and
``*_normalized`` multiplied by |S^{n-1}|^{1/(n-1+p)} to compensate.
Verification defaults to the normalized (larger, safe) variant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

from scipy import optimize

from .geometry import cap_measure, sphere_area

__all__ = [
    "IntrinsicConstants",
    "ExtrinsicConstants",
    "rho_p",
    "intrinsic_constants",
    "beta_p",
    "extrinsic_constants",
    "h_lower_bound",
    "h_lower_bound_inverse",
    "theta",
]

def _check_p(p: float) -> None:
    if not p > 1:
        raise ValueError(f"need p > 1, got {p}")


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")


@dataclass(frozen=True)
class IntrinsicConstants:
    """Constants of the geodesic diameter bound."""

    p: float
    n: int
    I_p: int
    a_p: float
    alpha_np: float
    alpha_np_normalized: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExtrinsicConstants:
    """Constants of the ambient (chordal) diameter bound."""

    p: float
    n: int
    J_p: int
    b_p: float
    residual: float
    prefactor: float
    prefactor_normalized: float

    def to_dict(self) -> dict:
        return asdict(self)


def rho_p(p: float, i: int) -> float:
    """i^{-1/p} - i^{-1}; zero at i = 1, maximized near i = p^{p/(p-1)}."""
    _check_p(p)
    if i < 1:
        raise ValueError("need i >= 1")
    return i ** (-1.0 / p) - 1.0 / i


@lru_cache(maxsize=None)
def intrinsic_constants(n: int, p: float) -> IntrinsicConstants:
    """Compute a_p, its maximizer index, and the geodesic bound prefactor.

    The integer maximizer of rho_p is scanned up to the ceiling of the
    continuous maximizer p^{p/(p-1)} plus a safety margin.
    """
    _check_n(n)
    _check_p(p)
    i_max = math.ceil(p ** (p / (p - 1.0))) + 2
    best_i = 1
    best = 0.0
    for i in range(1, i_max + 1):
        val = rho_p(p, i)
        if val > best:
            best = val
            best_i = i
    a = best / 4.0
    alpha = _intrinsic_prefactor(n, p, a)
    norm = sphere_area(n - 1) ** (1.0 / (n - 1 + p))
    return IntrinsicConstants(
        p=float(p), n=n, I_p=best_i - 1, a_p=a,
        alpha_np=alpha, alpha_np_normalized=alpha * norm,
    )


def _intrinsic_prefactor(n: int, p: float, a: float) -> float:
    slope = math.sin(a * math.pi) / (a * math.pi)
    inner = sphere_area(n - 2) / (n - 1) * slope ** (n - 2)
    return 2.0 / a * inner ** (-1.0 / (n - 1 + p))


def beta_p(p: float, t: float) -> float:
    """t - sin^p(pi t / 2) on (0, 1/2]; positive gap drives the extrinsic bound."""
    _check_p(p)
    if not 0.0 < t <= 0.5:
        raise ValueError(f"t={t} outside (0, 1/2]")
    return t - math.sin(math.pi * t / 2.0) ** p


def _beta_p_prime(p: float, t: float) -> float:
    half = math.pi * t / 2.0
    return 1.0 - (p * math.pi / 2.0) * math.sin(half) ** (p - 1) * math.cos(half)


def _beta_p_argmax(p: float) -> int:
    """Integer maximizer of j -> beta_p(1/j) over j >= 2.

    beta_p has a unique interior maximum t_p on (0, 1/2], so the integer
    argmax is one of the j with 1/j straddling t_p. Locating t_p by
    root-finding on beta_p' (instead of a linear scan in j) stays cheap
    even for p near 1, where t_p collapses toward 0 and the maximizing j
    blows up far past any fixed scan cap.
    """
    if _beta_p_prime(p, 0.5) >= 0.0:
        # beta_p still increasing at the right endpoint: boundary maximum
        return 2
    lo = 0.5
    while _beta_p_prime(p, lo) <= 0.0:
        lo *= 0.5
        if lo < 1e-300:  # pragma: no cover
            raise RuntimeError(f"cannot bracket the maximizer of beta_p for p={p}")
    t_star = optimize.brentq(lambda t: _beta_p_prime(p, t), lo, 2.0 * lo,
                             xtol=1e-300, rtol=8.9e-16, maxiter=300)
    candidates = {max(2, math.floor(1.0 / t_star) + d) for d in (-1, 0, 1, 2)}
    return max(candidates, key=lambda j: beta_p(p, 1.0 / j))


@lru_cache(maxsize=None)
def extrinsic_constants(n: int, p: float) -> ExtrinsicConstants:
    """Compute J_p, b_p and the chordal bound prefactor.

    J_p + 1 is the integer maximizer of j -> beta_p(1/j) over j >= 2,
    found via the unique interior maximizer of beta_p; b_p then solves
    1/(J_p+1) = (sin(pi/(2(J_p+1))) + 4 b)^p by bisection.
    """
    _check_n(n)
    _check_p(p)
    jstar = _beta_p_argmax(p)  # = J_p + 1
    best = beta_p(p, 1.0 / jstar)
    if best <= 0.0:
        raise RuntimeError(f"no positive maximizer of beta_p found for p={p}")
    target = 1.0 / jstar
    s = math.sin(math.pi / (2.0 * jstar))

    def f(b: float) -> float:
        return (s + 4.0 * b) ** p - target

    # the map is strictly increasing in b, so target^{1/p} pins down a
    # bracket; bisecting inside it keeps relative precision even when b_p
    # collapses toward 0 as p approaches 1
    b0 = (target ** (1.0 / p) - s) / 4.0
    if not 0.0 < b0 < 0.25:
        raise RuntimeError(f"failed to bracket b_p for (n={n}, p={p})")
    lo, hi = 0.5 * b0, min(4.0 * b0, 0.25)
    if not (f(lo) < 0.0 < f(hi)):
        raise RuntimeError(f"failed to bracket b_p for (n={n}, p={p})")
    b = optimize.brentq(f, lo, hi, xtol=max(b0 * 1e-14, 5e-324),
                        rtol=8.9e-16, maxiter=200)
    residual = abs(target - (s + 4.0 * b) ** p)
    if not 0.0 < b < 0.25:
        raise RuntimeError(f"b_p={b} escaped (0, 1/4) for (n={n}, p={p})")
    pref = _extrinsic_prefactor(n, p, b)
    norm = sphere_area(n - 1) ** (1.0 / (n - 1 + p))
    return ExtrinsicConstants(
        p=float(p), n=n, J_p=jstar - 1, b_p=b, residual=residual,
        prefactor=pref, prefactor_normalized=pref * norm,
    )


def _extrinsic_prefactor(n: int, p: float, b: float) -> float:
    ratio = b * math.sqrt(1.0 - b * b) / math.asin(b)
    inner = sphere_area(n - 2) / (n - 1) * ratio ** (n - 2)
    return 2.0 / b * inner ** (-1.0 / (n - 1 + p))


def h_lower_bound(n: int, p: float, a: float, t: float) -> float:
    """Lower-bound function cap_measure(n, a t) * (a t)^p on [0, pi]."""
    _check_n(n)
    _check_p(p)
    if not 0.0 < a < 0.25:
        raise ValueError(f"a={a} outside (0, 1/4)")
    if t < 0.0 or t > math.pi + 1e-15:
        raise ValueError(f"t={t} outside [0, pi]")
    if t == 0.0:
        return 0.0
    return cap_measure(n, a * t) * (a * t) ** p


def h_lower_bound_inverse(n: int, p: float, a: float, y: float) -> float:
    """Inverse of h_lower_bound in t on [0, pi], by bracketed root-finding."""
    top = h_lower_bound(n, p, a, math.pi)
    if y < 0.0 or y > top * (1.0 + 1e-12):
        raise ValueError(f"y={y} outside the range [0, {top}]")
    if y == 0.0:
        return 0.0
    y = min(y, top)
    return float(optimize.brentq(
        lambda t: h_lower_bound(n, p, a, t) - y, 0.0, math.pi,
        xtol=1e-13, rtol=8.9e-16, maxiter=200,
    ))


def theta(theta_val: float, t: float) -> float:
    """sin(theta * t)/sin(theta) for theta in (0, pi/2], t in (0, 1/2]."""
    if not 0.0 < theta_val <= math.pi / 2.0:
        raise ValueError(f"theta={theta_val} outside (0, pi/2]")
    if not 0.0 < t <= 0.5:
        raise ValueError(f"t={t} outside (0, 1/2]")
    return math.sin(theta_val * t) / math.sin(theta_val)
