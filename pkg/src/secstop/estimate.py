"""Asymptotic cutoff estimators and the transcendental constants behind them.

The limiting success probability of a cutoff fraction x (reject the first
x*n of a two-sided search) is g(x) = -2x ln x - 2x(1 - x), maximized at
theta = -W(-2/e^2)/2, where g(theta) = 2(theta - theta^2).  Around that
limit sit three practical estimators of the exact uniform-model cutoff and
two for the Poisson model; the exact argmax itself stays in `exact`.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

from .core_model import (
    CountModel,
    CutoffReport,
    EstimatorCheck,
    Poisson,
    Uniform,
    Variant,
)
from .exact import (
    best_cutoff,
    poisson_smoothing_coefficients,
    step_accept_prob,
    step_reject_prob,
)
from .specfun import DEFAULT_POLICY, TruncationPolicy, digamma, lambert_w0


class EstimatorId(str, Enum):
    ROUND_N_THETA = "RoundNTheta"
    AFFINE_THETA = "AffineTheta"
    LAMBERT_UNIFORM = "LambertUniform"
    HALF_LAMBDA_MINUS_ONE = "HalfLambdaMinusOne"
    R_STAR_LAMBDA = "RStarLambda"


@lru_cache(maxsize=1)
def theta() -> float:
    """-W(-2/e^2)/2 = 0.20318786997997998, the optimal cutoff fraction."""
    return -0.5 * lambert_w0(-2.0 * math.exp(-2.0))


def g(x: float) -> float:
    """Limiting success probability of cutoff fraction x in (0, 1]."""
    return -2.0 * x * math.log(x) - 2.0 * x * (1.0 - x)


@lru_cache(maxsize=1)
def g_theta() -> float:
    """g at its maximum: 2(theta - theta^2) = 0.3238051189459574."""
    th = theta()
    return 2.0 * (th - th * th)


@lru_cache(maxsize=1)
def affine_shift() -> float:
    """The constant correction 1/(4 - 2e^{2-2 theta}) = -0.17114181786158375.

    Since ln theta = 2 theta - 2 at the fixed point, this equals
    theta/(4 theta - 2); we keep the published-looking form.
    """
    return 1.0 / (4.0 - 2.0 * math.exp(2.0 - 2.0 * theta()))


def round_half_away(x: float) -> int:
    """Nearest integer, halves away from zero (not banker's rounding)."""
    return int(math.floor(x + 0.5)) if x >= 0.0 else int(math.ceil(x - 0.5))


def integer_estimate(estimator: "EstimatorId", value: float) -> int:
    """Integer form of a real-valued estimate.

    lam/2 - 1 is floored — it predicts a count offset and its halves land on
    odd rates where flooring is the stated convention; every other estimator
    is a smooth-curve maximizer and rounds to nearest (half away from zero).
    """
    if estimator is EstimatorId.HALF_LAMBDA_MINUS_ONE:
        return int(math.floor(value))
    return round_half_away(value)


def uniform_cutoff_estimates(n: int) -> list[tuple[EstimatorId, float]]:
    """Three real-valued estimates of the optimal cutoff when X ~ U[1, n].

    RoundNTheta is the bare first-order term n*theta; AffineTheta adds the
    constant correction; LambertUniform keeps the full finite-n maximizer
    -(n/2) W(-2 e^{psi(n) - 2}/n) of the smoothed curve.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    th = theta()
    lam_arg = -2.0 * math.exp(-2.0 + digamma(n)) / n
    return [
        (EstimatorId.ROUND_N_THETA, n * th),
        (EstimatorId.AFFINE_THETA, n * th + affine_shift()),
        (EstimatorId.LAMBERT_UNIFORM, -(n / 2.0) * lambert_w0(lam_arg)),
    ]


def poisson_cutoff_estimates(
    lam: float, tp: TruncationPolicy = DEFAULT_POLICY
) -> list[tuple[EstimatorId, float]]:
    """Two estimates for X ~ Poisson(lam): the exact maximizer r_lam of the
    smoothed curve 2r(eS1 - r eS2), namely eS1/(2 eS2), and the asymptote
    lam/2 - 1 that r_lam drifts toward."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    exp_s1, exp_s2 = poisson_smoothing_coefficients(lam, tp)
    return [
        (EstimatorId.R_STAR_LAMBDA, exp_s1 / (2.0 * exp_s2)),
        (EstimatorId.HALF_LAMBDA_MINUS_ONE, lam / 2.0 - 1.0),
    ]


@lru_cache(maxsize=1)
def lambda0(tol: float = 1e-9) -> float:
    """Rate at which accepting a nice first candidate stops dominating.

    Root of P_A(1) - P_R(1) for the two-sided rule under Poisson arrivals
    (step probabilities in the single-identity convention of `exact`), found
    by bisection on (0.1, 10).  Below it the accept curve stays on top at
    every step, so cutoff 0 is unbeatable.
    """

    def h(lam: float) -> float:
        model = Poisson(lam)
        return step_accept_prob(
            Variant.BEST_OR_WORST, model, 1
        ) - step_reject_prob(Variant.BEST_OR_WORST, model, 1)

    lo, hi = 0.1, 10.0
    h_lo = h(lo)
    if not (h_lo > 0.0 > h(hi)):
        raise RuntimeError("bisection bracket lost")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _p_of_lam(lam: float) -> float:
    return best_cutoff(Variant.BEST_OR_WORST, Poisson(lam)).prob


@lru_cache(maxsize=1)
def lambda_m() -> tuple[float, float]:
    """(argmax, max) of lam -> optimal two-sided success under Poisson(lam).

    Direct maximization: coarse grid on [0.5, 6], then golden-section on the
    bracketing interval.  Near the optimum the best cutoff is 0, so the
    objective is a single smooth arc and unimodal refinement is safe.
    """
    grid = [0.5 + 0.05 * i for i in range(111)]
    vals = [_p_of_lam(x) for x in grid]
    i = max(range(len(grid)), key=vals.__getitem__)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = _p_of_lam(c), _p_of_lam(d)
    while b - a > 1e-10:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _p_of_lam(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _p_of_lam(d)
    lam = 0.5 * (a + b)
    return lam, _p_of_lam(lam)


def with_estimates(report: CutoffReport) -> CutoffReport:
    """Attach the applicable estimator checks (rounded vs. exact cutoff)."""
    model: CountModel = report.model
    if isinstance(model, Uniform):
        pairs = uniform_cutoff_estimates(model.n)
    elif isinstance(model, Poisson):
        pairs = poisson_cutoff_estimates(model.lam, model.tp)
    else:
        return report
    checks = tuple(
        EstimatorCheck(
            name=eid.value,
            value=val,
            rounded=integer_estimate(eid, val),
            agrees=integer_estimate(eid, val) == report.cutoff,
        )
        for eid, val in pairs
    )
    return CutoffReport(
        model=report.model,
        variant=report.variant,
        cutoff=report.cutoff,
        prob=report.prob,
        estimators=checks,
    )
