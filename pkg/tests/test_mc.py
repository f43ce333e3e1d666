"""Simulator vs. exact engine: determinism, splitting, and calibration."""

import numpy as np
import pytest

from secstop.core_model import (
    Explicit,
    Known,
    Poisson,
    ThresholdPolicy,
    Uniform,
    Variant,
    support,
    threshold_success_known,
)
from secstop.exact import best_cutoff, success_curve
from secstop.mc import (
    SimConfig,
    SimReport,
    draw_uniform,
    merge,
    run_episode,
    simulate,
    trial_base,
)

Z999 = 3.2905  # two-sided 99.9%


def _config(variant, model, r, trials, seed=0, offset=0):
    return SimConfig(
        variant=variant,
        model=model,
        policy=ThresholdPolicy(r),
        trials=trials,
        seed=seed,
        trial_offset=offset,
    )


def _z(report, exact):
    se = max(report.stderr, 1e-12)
    return abs(report.p_hat - exact) / se


# ------------------------------------------------------------ tiny episodes

def test_single_object_best_or_worst_always_wins():
    for t in range(50):
        assert run_episode(Variant.BEST_OR_WORST, 1, 0, trial_base(7, t))


def test_single_object_postdoc_always_loses():
    for t in range(50):
        assert not run_episode(Variant.POSTDOC, 1, 0, trial_base(7, t))
        assert not run_episode(Variant.POSTDOC, 1, 3, trial_base(7, t))


def test_cutoff_at_or_past_horizon_never_accepts():
    for t in range(50):
        assert not run_episode(Variant.CLASSIC, 4, 4, trial_base(11, t))


# ------------------------------------------------------------- determinism

def test_same_config_same_report():
    cfg = _config(Variant.BEST_OR_WORST, Uniform(12), 2, 40_000, seed=123)
    assert simulate(cfg) == simulate(cfg)


def test_seed_changes_outcome():
    a = simulate(_config(Variant.BEST_OR_WORST, Uniform(12), 2, 40_000, seed=1))
    b = simulate(_config(Variant.BEST_OR_WORST, Uniform(12), 2, 40_000, seed=2))
    assert a.successes != b.successes


def test_merge_equals_joint_run():
    whole = simulate(_config(Variant.POSTDOC, Poisson(6.0), 2, 100_000, seed=9))
    left = simulate(_config(Variant.POSTDOC, Poisson(6.0), 2, 37_111, seed=9))
    right = simulate(
        _config(Variant.POSTDOC, Poisson(6.0), 2, 62_889, seed=9, offset=37_111)
    )
    assert merge(left, right) == whole


def test_merge_rejects_mismatched_runs():
    a = simulate(_config(Variant.CLASSIC, Known(5), 1, 100, seed=1))
    b = simulate(_config(Variant.CLASSIC, Known(5), 1, 100, seed=2))
    with pytest.raises(ValueError):
        merge(a, b)
    c = simulate(_config(Variant.CLASSIC, Known(5), 1, 100, seed=1, offset=500))
    with pytest.raises(ValueError):
        merge(a, c)


def test_chunk_boundary_is_invisible():
    # same trials split manually at an arbitrary point vs. one call
    cfg = _config(Variant.CLASSIC, Uniform(8), 2, 3_000, seed=5)
    parts = [
        simulate(_config(Variant.CLASSIC, Uniform(8), 2, 1_234, seed=5)),
        simulate(_config(Variant.CLASSIC, Uniform(8), 2, 1_766, seed=5, offset=1_234)),
    ]
    assert merge(*parts) == simulate(cfg)


# ------------------------------------------- scalar path replays vector path

@pytest.mark.parametrize(
    "variant,model,r",
    [
        (Variant.BEST_OR_WORST, Poisson(6.0), 2),
        (Variant.CLASSIC, Uniform(9), 3),
        (Variant.POSTDOC, Explicit(((0, 0.2), (3, 0.3), (7, 0.5))), 1),
    ],
)
def test_run_episode_matches_simulate(variant, model, r):
    trials, seed = 700, 31
    ks, ps = support(model)
    cdf = np.cumsum(ps)
    wins = zeros = 0
    for t in range(trials):
        base = trial_base(seed, t)
        u0 = draw_uniform(base, 0)
        idx = min(int(np.searchsorted(cdf, u0, side="right")), len(ks) - 1)
        x = int(ks[idx])
        if x == 0:
            zeros += 1
            continue
        wins += run_episode(variant, x, r, base)
    rep = simulate(_config(variant, model, r, trials, seed=seed))
    assert rep.successes == wins
    assert rep.draws_of_zero == zeros


# -------------------------------------------------------------- calibration

def test_known_five_cutoff_two():
    rep = simulate(_config(Variant.BEST_OR_WORST, Known(5), 2, 1_000_000, seed=42))
    exact = threshold_success_known(Variant.BEST_OR_WORST, 5, 2)
    assert exact == 0.6
    assert _z(rep, exact) < Z999


def test_classic_known_100_cutoff_37():
    rep = simulate(_config(Variant.CLASSIC, Known(100), 37, 200_000, seed=7))
    exact = threshold_success_known(Variant.CLASSIC, 100, 37)
    assert exact == pytest.approx(0.3710427787126431, abs=1e-12)
    assert _z(rep, exact) < Z999


def test_uniform_50_at_optimum_and_factor_two():
    m = best_cutoff(Variant.BEST_OR_WORST, Uniform(50))
    bw = simulate(_config(Variant.BEST_OR_WORST, Uniform(50), m.cutoff, 400_000, seed=3))
    pd = simulate(_config(Variant.POSTDOC, Uniform(50), m.cutoff, 400_000, seed=3))
    assert _z(bw, m.prob) < Z999
    curve = success_curve(Variant.POSTDOC, Uniform(50), m.cutoff)
    assert _z(pd, curve.value(m.cutoff)) < Z999
    # the two-sided rule should land near twice the second-best rule
    assert bw.p_hat == pytest.approx(2.0 * pd.p_hat, abs=8.0 * bw.stderr)


def test_poisson_zero_draws_counted_and_curve_matches():
    lam = 2.0
    rep = simulate(_config(Variant.BEST_OR_WORST, Poisson(lam), 0, 300_000, seed=11))
    # X = 0 happens with probability e^-2 and must be a recorded failure
    frac = rep.draws_of_zero / rep.config.trials
    assert frac == pytest.approx(np.exp(-lam), abs=5e-3)
    exact = success_curve(Variant.BEST_OR_WORST, Poisson(lam), 0).value(0)
    assert _z(rep, exact) < Z999


def test_explicit_mixture_calibrates():
    model = Explicit(((2, 0.25), (5, 0.5), (8, 0.25)))
    exact = success_curve(Variant.POSTDOC, model, 2).value(2)
    rep = simulate(_config(Variant.POSTDOC, model, 2, 400_000, seed=19))
    assert _z(rep, exact) < Z999


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(Variant.CLASSIC, Known(3), ThresholdPolicy(0), trials=0)
    with pytest.raises(ValueError):
        SimConfig(Variant.CLASSIC, Known(3), ThresholdPolicy(0), trials=5, trial_offset=-1)


def test_report_fields_consistent():
    rep = simulate(_config(Variant.CLASSIC, Known(6), 2, 10_000, seed=77))
    assert isinstance(rep, SimReport)
    assert 0 <= rep.successes <= 10_000
    assert rep.p_hat == rep.successes / 10_000
    assert rep.stderr == pytest.approx(
        np.sqrt(rep.p_hat * (1 - rep.p_hat) / 10_000), abs=1e-15
    )
    assert rep.draws_of_zero == 0
