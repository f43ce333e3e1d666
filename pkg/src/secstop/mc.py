"""Seeded Monte Carlo oracle for every exact probability in the package.

Randomness is counter-based (splitmix-style finalizer over seed and trial
index), so trial t's stream is a pure function of (seed, absolute trial
index) and never of how trials are batched: partitioning a run across
workers or chunks changes nothing.  Per trial, draw index 0 picks the
candidate count X by cdf inversion and draw s >= 1 yields the relative rank
of the s-th arrival among the first s — a uniform random permutation needs
nothing more.  After acceptance the accepted object's overall rank is
tracked online to the horizon, which decides success for all three rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core_model import CountModel, ThresholdPolicy, Variant, support

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)


def _mix(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * _MULT1) & _MASK
    z ^= z >> 27
    z = (z * _MULT2) & _MASK
    z ^= z >> 31
    return z


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MULT1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MULT2)
    z ^= z >> np.uint64(31)
    return z


def trial_base(seed: int, trial_index: int) -> int:
    """Stream base for one absolute trial index."""
    return _mix(seed + _GAMMA * (trial_index + 1))


def draw_uniform(base: int, i: int) -> float:
    """i-th uniform of a trial stream; index 0 is reserved for the X draw."""
    return (_mix(base + _GAMMA * (i + 1)) >> 11) * _INV_2_53


@dataclass(frozen=True)
class SimConfig:
    variant: Variant
    model: CountModel
    policy: ThresholdPolicy
    trials: int
    seed: int = 0
    trial_offset: int = 0  # absolute index of the first trial (for splitting)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.trial_offset < 0:
            raise ValueError("trial_offset must be >= 0")


@dataclass(frozen=True)
class SimReport:
    config: SimConfig
    successes: int
    p_hat: float
    stderr: float
    draws_of_zero: int


def run_episode(variant: Variant, k: int, r: int, rng_state: int) -> bool:
    """One episode with k arrivals and cutoff r, on the given stream base.

    Consumes draw indices 1..k of the stream (index 0 belongs to the count
    draw), so it replays exactly what the vectorized path does.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    accepted_rank = 0
    for s in range(1, k + 1):
        u = draw_uniform(rng_state, s)
        rank = 1 + min(int(u * s), s - 1)
        if accepted_rank:
            if rank <= accepted_rank:
                accepted_rank += 1
            continue
        if s <= r:
            continue
        if variant is Variant.CLASSIC:
            nice = rank == 1
        elif variant is Variant.BEST_OR_WORST:
            nice = rank == 1 or rank == s
        else:
            nice = s >= 2 and rank == 2
        if nice:
            accepted_rank = rank
    if not accepted_rank:
        return False
    if variant is Variant.CLASSIC:
        return accepted_rank == 1
    if variant is Variant.BEST_OR_WORST:
        return accepted_rank == 1 or accepted_rank == k
    return accepted_rank == 2


_CHUNK = 1 << 20


def simulate(config: SimConfig) -> SimReport:
    ks, ps = support(config.model)
    cdf = np.cumsum(ps)
    ks = ks.astype(np.int64)
    r = config.policy.cutoff
    variant = config.variant
    seed = config.seed

    successes = 0
    zeros = 0
    done = 0
    while done < config.trials:
        m = min(_CHUNK, config.trials - done)
        t_abs = np.arange(
            config.trial_offset + done, config.trial_offset + done + m, dtype=np.uint64
        )
        base = _mix_array(
            np.uint64(seed & _MASK) + np.uint64(_GAMMA) * (t_abs + np.uint64(1))
        )

        u0 = (
            _mix_array(base + np.uint64(_GAMMA)) >> np.uint64(11)
        ).astype(np.float64) * _INV_2_53
        idx = np.minimum(np.searchsorted(cdf, u0, side="right"), len(ks) - 1)
        X = ks[idx]
        zeros += int(np.count_nonzero(X == 0))

        acc = np.zeros(m, dtype=np.int64)  # accepted object's running rank; 0 = none
        s_max = int(X.max(initial=0))
        for s in range(1, s_max + 1):
            step = np.uint64((_GAMMA * (s + 1)) & _MASK)
            us = (
                _mix_array(base + step) >> np.uint64(11)
            ).astype(np.float64) * _INV_2_53
            rank = 1 + np.minimum((us * s).astype(np.int64), s - 1)
            alive = X >= s
            if variant is Variant.CLASSIC:
                nice = rank == 1
            elif variant is Variant.BEST_OR_WORST:
                nice = (rank == 1) | (rank == s)
            else:
                nice = rank == 2 if s >= 2 else np.zeros(m, dtype=bool)
            take = alive & (acc == 0) & (s > r) & nice
            bump = alive & (acc > 0) & (rank <= acc)
            acc[bump] += 1
            acc[take] = rank[take]

        if variant is Variant.CLASSIC:
            win = acc == 1
        elif variant is Variant.BEST_OR_WORST:
            win = (acc > 0) & ((acc == 1) | (acc == X))
        else:
            win = acc == 2
        successes += int(np.count_nonzero(win))
        done += m

    p_hat = successes / config.trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / config.trials)
    return SimReport(
        config=config,
        successes=successes,
        p_hat=p_hat,
        stderr=stderr,
        draws_of_zero=zeros,
    )


def merge(a: SimReport, b: SimReport) -> SimReport:
    """Combine two reports from disjoint trial ranges of the same run."""
    ca, cb = a.config, b.config
    if (ca.variant, ca.model, ca.policy, ca.seed) != (
        cb.variant,
        cb.model,
        cb.policy,
        cb.seed,
    ):
        raise ValueError("reports come from different runs")
    if ca.trial_offset + ca.trials != cb.trial_offset:
        raise ValueError("trial ranges are not adjacent")
    config = SimConfig(
        variant=ca.variant,
        model=ca.model,
        policy=ca.policy,
        trials=ca.trials + cb.trials,
        seed=ca.seed,
        trial_offset=ca.trial_offset,
    )
    successes = a.successes + b.successes
    p_hat = successes / config.trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / config.trials)
    return SimReport(
        config=config,
        successes=successes,
        p_hat=p_hat,
        stderr=stderr,
        draws_of_zero=a.draws_of_zero + b.draws_of_zero,
    )
