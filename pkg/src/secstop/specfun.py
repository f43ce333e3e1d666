"""Scalar special functions backing the closed forms used everywhere else.

All arithmetic is 64-bit float.  Long series use compensated (Kahan)
accumulation, and every infinite series is truncated under an explicit
TruncationPolicy so callers control the tail bound instead of inheriting a
hidden one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015329

# Below this the digamma/harmonic values come from an exact compensated sum;
# above it the asymptotic expansion is already accurate to < 1e-18.
_HARMONIC_EXACT_LIMIT = 10_000


class TruncationError(RuntimeError):
    """Raised when a series exhausts max_terms before meeting its tail bound."""


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to push an infinite series.

    rel_tol is a relative tail bound (the estimated remainder must drop below
    rel_tol times the accumulated sum); max_terms is a hard iteration cap.
    """

    rel_tol: float = 1e-15
    max_terms: int = 1_000_000

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol <= 1e-6):
            raise ValueError("rel_tol must lie in (0, 1e-6]")
        if self.max_terms < 64:
            raise ValueError("max_terms must be >= 64")


DEFAULT_POLICY = TruncationPolicy()

# Growing cache of harmonic numbers H_0, H_1, ... maintained with a Kahan
# carry so every cached value is correctly rounded for practical purposes.
_H: list[float] = [0.0]
_H_carry: float = 0.0


def _grow_harmonic(limit: int) -> None:
    global _H_carry
    s = _H[-1]
    c = _H_carry
    for k in range(len(_H), limit + 1):
        y = 1.0 / k - c
        t = s + y
        c = (t - s) - y
        s = t
        _H.append(s)
    _H_carry = c


def harmonic(m: int) -> float:
    """H_m = 1 + 1/2 + ... + 1/m (H_0 = 0).  Exact summation; m <= 10^4."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m > _HARMONIC_EXACT_LIMIT:
        raise ValueError(f"harmonic cache capped at {_HARMONIC_EXACT_LIMIT}")
    if m >= len(_H):
        _grow_harmonic(m)
    return _H[m]


def harmonic_numbers(limit: int) -> np.ndarray:
    """Array [H_0, H_1, ..., H_limit] sharing the compensated cache."""
    if limit > _HARMONIC_EXACT_LIMIT:
        raise ValueError(f"harmonic cache capped at {_HARMONIC_EXACT_LIMIT}")
    if limit >= len(_H):
        _grow_harmonic(limit)
    return np.array(_H[: limit + 1])


def digamma(m: int) -> float:
    """psi(m) at a positive integer: H_{m-1} - gamma.

    Exact harmonic summation up to the cache limit, then the standard
    asymptotic expansion ln m - 1/(2m) - 1/(12m^2) + 1/(120m^4).
    """
    if m < 1:
        raise ValueError("digamma defined here for positive integers only")
    if m <= _HARMONIC_EXACT_LIMIT:
        return harmonic(m - 1) - EULER_GAMMA
    inv = 1.0 / m
    inv2 = inv * inv
    return math.log(m) - 0.5 * inv - inv2 / 12.0 + inv2 * inv2 / 120.0


_BRANCH_POINT = -math.exp(-1.0)


def lambert_w0(x: float) -> float:
    """Principal branch of w*e^w = x, the unique real solution with w >= -1.

    Halley iteration from a branch-aware initial guess; near the branch point
    x = -1/e the series in p = sqrt(2(e*x + 1)) is used directly.
    """
    if x < _BRANCH_POINT:
        # allow for the representation error of -1/e itself
        if x < _BRANCH_POINT - 1e-12:
            raise ValueError("lambert_w0 requires x >= -1/e")
        x = _BRANCH_POINT
    if x == 0.0:
        return 0.0
    p2 = 2.0 * (math.e * x + 1.0)
    if p2 <= 0.0:
        return -1.0
    if p2 < 1e-6:
        # so close to the branch point that Halley would divide by ~0
        p = math.sqrt(p2)
        return -1.0 + p - p2 / 3.0 + 11.0 * p * p2 / 72.0
    if x < 0.0:
        p = math.sqrt(p2)
        w = -1.0 + p - p2 / 3.0 + 11.0 * p * p2 / 72.0
    elif x < math.e:
        w = x / (1.0 + x)  # crude but inside the basin
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - x
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        step = f / denom
        w -= step
        if abs(step) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def log_factorial(k: int) -> float:
    """ln(k!) for k >= 0."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.lgamma(k + 1.0)


def poisson_log_pmf(k: int, lam: float) -> float:
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if k < 0:
        raise ValueError("k must be >= 0")
    return k * math.log(lam) - lam - log_factorial(k)


def poisson_pmf(k: int, lam: float) -> float:
    """p(X = k) for X ~ Poisson(lam), evaluated in log space."""
    return math.exp(poisson_log_pmf(k, lam))


def poisson_pmf_array(lam: float, k_max: int) -> np.ndarray:
    """[pmf(0), ..., pmf(k_max)] in one log-space vector evaluation."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    k = np.arange(k_max + 1)
    logs = k * math.log(lam) - lam - np.array([math.lgamma(i + 1.0) for i in range(k_max + 1)])
    return np.exp(logs)


def poisson_tail(r: int, lam: float, tp: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Psi(r, lam) = p(X >= r) for X ~ Poisson(lam)."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if r == 0:
        return 1.0
    if r <= lam + 1.0:
        # complement of a short head sum: better conditioned than the tail
        acc = 0.0
        c = 0.0
        term = math.exp(-lam)
        for k in range(r):
            y = term - c
            t = acc + y
            c = (t - acc) - y
            acc = t
            term *= lam / (k + 1.0)
        return max(0.0, 1.0 - acc)
    acc = 0.0
    c = 0.0
    term = poisson_pmf(r, lam)
    if term == 0.0:
        return 0.0  # leading term underflowed: the whole tail is < 1e-300
    k = r
    for _ in range(tp.max_terms):
        y = term - c
        t = acc + y
        c = (t - acc) - y
        acc = t
        ratio = lam / (k + 1.0)
        if term == 0.0 or (ratio < 1.0 and term * ratio / (1.0 - ratio) < tp.rel_tol * acc):
            return acc
        term *= ratio
        k += 1
    raise TruncationError("poisson_tail did not converge under the policy")


def ein_integral(lam: float, tp: TruncationPolicy = DEFAULT_POLICY) -> float:
    """E(lam) = gamma + ln(lam) + integral_0^lam (e^x - 1)/x dx.

    The integral expands into sum_{k>=1} lam^k / (k * k!), all terms positive.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    acc = 0.0
    c = 0.0
    term = lam  # k = 1 term
    k = 1
    for _ in range(tp.max_terms):
        y = term - c
        t = acc + y
        c = (t - acc) - y
        acc = t
        ratio = lam * k / ((k + 1.0) * (k + 1.0))
        if ratio < 1.0 and term * ratio / (1.0 - ratio) < tp.rel_tol * acc:
            break
        term *= ratio
        k += 1
    else:
        raise TruncationError("ein_integral series did not converge")
    return EULER_GAMMA + math.log(lam) + acc


def sinh_integral(lam: float, tp: TruncationPolicy = DEFAULT_POLICY) -> float:
    """S(lam) = integral_0^lam sinh(x)/x dx = sum_j lam^(2j+1)/((2j+1)(2j+1)!)."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    acc = 0.0
    c = 0.0
    term = lam  # j = 0
    j = 0
    for _ in range(tp.max_terms):
        y = term - c
        t = acc + y
        c = (t - acc) - y
        acc = t
        m = 2 * j + 1
        ratio = lam * lam * m / ((m + 2.0) * (m + 2.0) * (m + 1.0))
        if ratio < 1.0 and term * ratio / (1.0 - ratio) < tp.rel_tol * acc:
            return acc
        term *= ratio
        j += 1
    raise TruncationError("sinh_integral series did not converge")
