"""Tests for the exact engine.

Oracle routes: direct per-k weighted sums (plain Python loops, scipy pmfs),
exact rationals for the uniform family, and frozen literals derived from
those routes — the suffix-sum implementation is never compared to itself.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from secstop.core_model import (
    Explicit,
    Known,
    Poisson,
    Uniform,
    Variant,
    explicit_from_dict,
    threshold_success_known,
)
from secstop.exact import (
    ConditioningError,
    best_cutoff,
    closed_form_uniform,
    poisson_fstar_and_f,
    step_accept_prob,
    step_reject_prob,
    success_curve,
)

V = Variant


def uniform_bw_exact(r, n):
    """Rational direct sum for the best-or-worst cutoff curve, r >= 1."""
    return Fraction(1, n) * sum(
        Fraction(2 * r * (k - r), k * (k - 1)) for k in range(r + 1, n + 1)
    )


# ---------------------------------------------------------------- step probs


def test_step_accept_uniform_values():
    assert step_accept_prob(V.BEST_OR_WORST, Uniform(1), 1) == 1.0
    # (4/7) * sum_{k=4..10} 1/k  ==  4(psi(11) - psi(4))/7
    direct = sum(4.0 / k for k in range(4, 11)) / 7.0
    got = step_accept_prob(V.BEST_OR_WORST, Uniform(10), 4)
    assert got == pytest.approx(direct, abs=1e-14)
    assert got == pytest.approx(0.626077097505669, abs=1e-13)
    # postdoc collapses to r/n for r >= 2
    pd_direct = sum(3 * 2 / (k * (k - 1)) for k in range(3, 11)) / 8.0
    assert step_accept_prob(V.POSTDOC, Uniform(10), 3) == pytest.approx(pd_direct, abs=1e-14)
    assert step_accept_prob(V.POSTDOC, Uniform(10), 3) == pytest.approx(0.3, abs=1e-14)
    assert step_accept_prob(V.POSTDOC, Uniform(10), 1) == 0.0


def test_step_reject_uniform_values():
    assert step_reject_prob(V.BEST_OR_WORST, Uniform(1), 1) == 0.0
    direct = sum(8.0 * (k - 4) / (k * (k - 1)) for k in range(5, 11)) / 7.0
    got = step_reject_prob(V.BEST_OR_WORST, Uniform(10), 4)
    assert got == pytest.approx(direct, abs=1e-14)
    assert got == pytest.approx(0.4521541950113377, abs=1e-13)
    assert step_reject_prob(V.POSTDOC, Uniform(10), 4) == pytest.approx(got / 2, abs=1e-15)


def test_step_probs_poisson_against_direct_sums():
    # plain-loop oracle with scipy pmfs
    lam = 5.0
    p = stats.poisson.pmf(np.arange(400), lam)
    num = sum(3 * 2 / (k * (k - 1)) * p[k] for k in range(3, 400))
    den = p[3:].sum()
    assert step_accept_prob(V.POSTDOC, Poisson(lam), 3) == pytest.approx(num / den, abs=1e-13)
    assert step_accept_prob(V.POSTDOC, Poisson(lam), 3) == pytest.approx(
        0.3847798668977947, abs=1e-12
    )
    lam = 3.0
    p = stats.poisson.pmf(np.arange(400), lam)
    num = sum(4.0 * (k - 2) / (k * (k - 1)) * p[k] for k in range(3, 400))
    den = p[2:].sum()
    assert step_reject_prob(V.BEST_OR_WORST, Poisson(lam), 2) == pytest.approx(
        num / den, abs=1e-13
    )
    assert step_reject_prob(V.BEST_OR_WORST, Poisson(lam), 2) == pytest.approx(
        0.45445354167754615, abs=1e-12
    )


def test_step_probs_survive_deep_conditioning():
    # r far beyond lam: pmf and tail both underflow, the ratio series must not
    v = step_accept_prob(V.BEST_OR_WORST, Poisson(2.0), 400)
    assert 0.99 < v <= 1.0


def test_step_prob_conditioning_errors():
    with pytest.raises(ConditioningError):
        step_accept_prob(V.BEST_OR_WORST, Uniform(5), 6)
    with pytest.raises(ConditioningError):
        step_reject_prob(V.CLASSIC, explicit_from_dict({3: 1.0}), 4)


# ---------------------------------------------------------------- the curves


def test_curve_uniform_frozen_values():
    c = success_curve(V.BEST_OR_WORST, Uniform(2), 2)
    assert c.value(0) == pytest.approx(1.0, abs=1e-15)
    assert c.value(1) == pytest.approx(0.5, abs=1e-15)
    assert c.value(2) == 0.0
    c5 = success_curve(V.BEST_OR_WORST, Uniform(5), 5)
    assert c5.value(0) == pytest.approx(107.0 / 150.0, abs=1e-15)
    assert c5.value(1) == pytest.approx(float(uniform_bw_exact(1, 5)), abs=1e-15)
    assert c5.value(1) == pytest.approx(0.5133333333333333, abs=1e-15)


def test_curve_matches_known_forms():
    for n in (1, 2, 3, 7, 24):
        for variant in V:
            c = success_curve(variant, Known(n), n)
            for r in range(n + 1):
                if r == 0:
                    continue  # r = 0 known-model row checked separately below
                assert c.value(r) == pytest.approx(
                    threshold_success_known(variant, n, r), abs=1e-13
                ), (variant, n, r)


def test_curve_first_row_values():
    # accepting the first nice candidate straight away, per fixed k
    c = success_curve(V.BEST_OR_WORST, Known(1), 0)
    assert c.value(0) == 1.0
    assert success_curve(V.POSTDOC, Known(1), 0).value(0) == 0.0
    assert success_curve(V.CLASSIC, Known(4), 0).value(0) == pytest.approx(0.25, abs=1e-15)
    assert success_curve(V.BEST_OR_WORST, Known(4), 0).value(0) == pytest.approx(0.5, abs=1e-15)
    assert success_curve(V.POSTDOC, Known(4), 0).value(0) == pytest.approx(0.25, abs=1e-15)


def test_curve_poisson_against_direct_sums():
    lam = 4.0
    p = stats.poisson.pmf(np.arange(300), lam)
    c = success_curve(V.BEST_OR_WORST, Poisson(lam), 12)
    for r in range(1, 13):
        direct = sum(2.0 * r * (k - r) / (k * (k - 1)) * p[k] for k in range(r + 1, 300))
        assert c.value(r) == pytest.approx(direct, abs=1e-13), r
    f0 = p[1] + sum(2.0 / k * p[k] for k in range(2, 300))
    assert c.value(0) == pytest.approx(f0, abs=1e-13)
    # X = 0 counts as failure: total curve mass is bounded away from 1
    assert c.value(0) < 1.0 - p[0]


@given(
    st.dictionaries(
        st.integers(min_value=0, max_value=40),
        st.integers(min_value=1, max_value=20),
        min_size=1,
        max_size=6,
    ),
    st.sampled_from(list(V)),
)
@settings(max_examples=80, deadline=None)
def test_curve_matches_weighted_sums_on_explicit_models(weights, variant):
    total = sum(weights.values())
    model = explicit_from_dict({k: w / total for k, w in weights.items()})
    r_top = 10
    c = success_curve(variant, model, r_top)
    for r in range(1, r_top + 1):
        direct = sum(
            p * threshold_success_known(variant, k, r) for k, p in model.items if k >= 1
        )
        assert c.value(r) == pytest.approx(direct, abs=5e-13), r
    bw = success_curve(V.BEST_OR_WORST, model, r_top)
    pd = success_curve(V.POSTDOC, model, r_top)
    for r in range(1, r_top + 1):
        assert bw.value(r) == pytest.approx(2 * pd.value(r), abs=1e-13)


# ------------------------------------------------------------- closed forms


def test_closed_form_uniform():
    assert closed_form_uniform(2, 2) == pytest.approx(0.0, abs=1e-15)
    assert closed_form_uniform(1, 2) == pytest.approx(0.5, abs=1e-15)
    for r, n in [(1, 5), (4, 23), (5, 23), (20, 100), (137, 500)]:
        assert closed_form_uniform(r, n) == pytest.approx(
            float(uniform_bw_exact(r, n)), abs=1e-13
        ), (r, n)
    assert closed_form_uniform(20, 100) == pytest.approx(0.33185514419837536, abs=1e-13)
    with pytest.raises(ValueError):
        closed_form_uniform(0, 5)


def test_poisson_fstar_identity():
    for lam in (1.0, 2.0, 5.0, 10.0, 20.0, 30.0):
        c = success_curve(V.BEST_OR_WORST, Poisson(lam), 21)
        for r in (2, 3, 7, 15, 21):
            fstar, head = poisson_fstar_and_f(r, lam)
            assert fstar - head == pytest.approx(c.value(r), abs=1e-10), (r, lam)
    # the head sum is empty at r = 2 (its only summand carries factor k - r = 0)
    assert poisson_fstar_and_f(2, 1.0)[1] == 0.0


def test_poisson_fstar_series_fallback_consistent():
    # above the closed-form window the two paths must agree through the
    # identity F = f* - f evaluated from the curve
    for lam in (31.0, 35.0):
        c = success_curve(V.BEST_OR_WORST, Poisson(lam), 20)
        for r in (5, 12, 20):
            fstar, head = poisson_fstar_and_f(r, lam)
            assert fstar - head == pytest.approx(c.value(r), abs=1e-10)


# -------------------------------------------------------------- best_cutoff


def test_best_cutoff_known():
    rep = best_cutoff(V.BEST_OR_WORST, Known(10))
    assert rep.cutoff == 5
    assert rep.prob == pytest.approx(5.0 / 9.0, abs=1e-14)
    # odd n: the two central cutoffs tie, the smaller one is reported
    assert best_cutoff(V.BEST_OR_WORST, Known(7)).cutoff == 3
    for n in (4, 5, 12, 33, 100):
        assert best_cutoff(V.BEST_OR_WORST, Known(n)).cutoff == n // 2


def test_best_cutoff_uniform_small_sizes_prefer_accepting_immediately():
    rep = best_cutoff(V.BEST_OR_WORST, Uniform(2))
    assert (rep.cutoff, rep.prob) == (0, pytest.approx(1.0, abs=1e-15))
    # at n = 5 the r = 0 policy (0.7133...) dominates every positive cutoff
    rep5 = best_cutoff(V.BEST_OR_WORST, Uniform(5))
    assert rep5.cutoff == 0
    assert rep5.prob == pytest.approx(0.7133333333333334, abs=1e-14)
    # the crossover: interior cutoffs win from n = 15 on
    assert best_cutoff(V.BEST_OR_WORST, Uniform(14)).cutoff == 0
    assert best_cutoff(V.BEST_OR_WORST, Uniform(15)).cutoff == 3


def test_best_cutoff_uniform_100():
    rep = best_cutoff(V.BEST_OR_WORST, Uniform(100))
    assert rep.cutoff == 20
    assert rep.prob == pytest.approx(0.33185514419837536, abs=1e-13)


def test_best_cutoff_postdoc_ties_resolve_to_zero():
    # cutoffs 0 and 1 are the same behavioral policy for the postdoc rule
    for n in (2, 5, 10):
        rep = best_cutoff(V.POSTDOC, Uniform(n))
        c = success_curve(V.POSTDOC, Uniform(n), n)
        assert c.value(0) == pytest.approx(c.value(1), abs=1e-15)
        if rep.cutoff == 0:
            assert c.value(0) >= c.values.max() - 1e-13


def test_best_cutoff_poisson():
    rep = best_cutoff(V.BEST_OR_WORST, Poisson(10.0))
    assert rep.cutoff == 4
    assert rep.prob == pytest.approx(0.49434952017960376, abs=1e-12)
    # small rates: accepting the first nice candidate immediately is optimal
    assert best_cutoff(V.BEST_OR_WORST, Poisson(2.0)).cutoff == 0


# ---------------------------------------------------- structural invariants


@pytest.mark.parametrize("n", [2, 9, 17, 60, 141, 300])
def test_single_crossing_uniform(n):
    pred = [
        step_accept_prob(V.BEST_OR_WORST, Uniform(n), r)
        > step_reject_prob(V.BEST_OR_WORST, Uniform(n), r)
        for r in range(1, n + 1)
    ]
    # once accept dominates it stays dominant
    assert pred == sorted(pred)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 2.21, 3.0, 5.0, 10.0, 30.0, 50.0])
def test_single_crossing_poisson(lam):
    horizon = int(lam + 12 * math.sqrt(lam) + 30)
    diffs = [
        step_accept_prob(V.BEST_OR_WORST, Poisson(lam), r)
        - step_reject_prob(V.BEST_OR_WORST, Poisson(lam), r)
        for r in range(1, horizon)
    ]
    signs = [d > 0 for d in diffs]
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    assert changes <= 1
    if lam < 2.2197719:
        # below the crossing rate the accept value never dips under reject
        assert all(signs)


@pytest.mark.parametrize("lam", [1.0, 5.0, 10.0])
def test_accept_prob_tends_to_one(lam):
    found = None
    for r in range(1, 500):
        if step_accept_prob(V.BEST_OR_WORST, Poisson(lam), r) >= 0.999:
            found = r
            break
    assert found is not None
    for r in (found + 10, found + 100):
        assert step_accept_prob(V.BEST_OR_WORST, Poisson(lam), r) >= 0.999


def test_uniform_optimum_strictly_decreasing():
    probs = [best_cutoff(V.BEST_OR_WORST, Uniform(n)).prob for n in range(2, 301)]
    assert all(a > b for a, b in zip(probs, probs[1:]))
    assert probs[-1] > 0.32380511
