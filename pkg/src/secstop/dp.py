"""Backward induction over the observation process, from first principles.

State: t objects inspected, none accepted, conditioned on X >= t.  With
q_t = p(X > t | X >= t) and nu_t the variant's nice-candidate chance at step
t, the continue-value satisfies

    C(t) = q_t * [ nu_{t+1} * max(A(t+1), C(t+1)) + (1 - nu_{t+1}) * C(t+1) ]

with C(T) = 0 at the top of the support.  A(t) is the true behavioral accept
value (for best-or-worst at t = 1 the sole object is simultaneously best- and
worst-so-far, which the single-identity step definitions undercount — see
printed_recursion_gap).  The overall optimal success probability is C(0),
where q_0 = p(X >= 1) absorbs any mass at X = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .core_model import (
    CountModel,
    Poisson,
    ThresholdPolicy,
    Variant,
    nice_probability,
    support,
)

_TIE_REL = 1e-12


@dataclass(frozen=True)
class DPPolicy:
    variant: Variant
    model: CountModel
    horizon: int
    # step-indexed arrays; slot 0 is a placeholder so accept_at[t] is step t
    accept_at: tuple[bool, ...]
    value_accept: tuple[float, ...]
    value_reject: tuple[float, ...]  # C(t), indexed 0..T
    value: float
    is_threshold: bool
    threshold: int | None
    witness: tuple[int, int] | None


def _behavioral_accept_value(variant: Variant, t: int, k: int) -> float:
    """Success chance when the t-th of k objects is nice and accepted."""
    if variant is Variant.CLASSIC:
        return t / k
    if variant is Variant.BEST_OR_WORST:
        if t == 1:
            return 1.0 if k == 1 else 2.0 / k
        return t / k
    if t == 1 or k == 1:
        return 0.0
    return t * (t - 1) / (k * (k - 1))


def _dense_pmf(model: CountModel) -> np.ndarray:
    if isinstance(model, Poisson):
        raise ValueError("Poisson support is infinite; truncate_to_explicit first")
    ks, ps = support(model)
    T = int(ks.max())
    dense = np.zeros(T + 1)
    dense[ks] = ps
    return dense


def backward_induction(variant: Variant, model: CountModel) -> DPPolicy:
    dense = _dense_pmf(model)
    T = len(dense) - 1
    kf = np.arange(T + 1, dtype=float)

    # suffix sums over k: S[t] = p(X >= t), U1[t] = sum p/k, U2[t] = sum p/(k(k-1))
    S = np.concatenate([np.cumsum(dense[::-1])[::-1], [0.0]])
    w1 = np.where(kf >= 1, dense / np.maximum(kf, 1.0), 0.0)
    w2 = np.where(kf >= 2, dense / np.maximum(kf * (kf - 1.0), 1.0), 0.0)
    U1 = np.concatenate([np.cumsum(w1[::-1])[::-1], [0.0]])
    U2 = np.concatenate([np.cumsum(w2[::-1])[::-1], [0.0]])

    A = np.zeros(T + 1)
    for t in range(1, T + 1):
        if S[t] <= 0.0:
            continue
        if variant is Variant.CLASSIC:
            A[t] = t * U1[t] / S[t]
        elif variant is Variant.BEST_OR_WORST:
            if t == 1:
                # k = 1: the object is both best and worst, value 1; else 2/k
                A[1] = (2.0 * U1[1] - dense[1]) / S[1]
            else:
                A[t] = t * U1[t] / S[t]
        else:
            A[t] = t * (t - 1) * U2[t] / S[t] if t >= 2 else 0.0

    C = np.zeros(T + 1)
    for t in range(T - 1, -1, -1):
        if S[t] <= 0.0:
            C[t] = 0.0
            continue
        q = S[t + 1] / S[t]
        nu = nice_probability(variant, t + 1)
        C[t] = q * (nu * max(A[t + 1], C[t + 1]) + (1.0 - nu) * C[t + 1])

    # ties resolve to accept; the band absorbs float noise in exact ties
    # (odd-n Known models tie A and C exactly at step (n+1)/2)
    accept = [False] * (T + 1)
    for t in range(1, T + 1):
        accept[t] = S[t] > 0.0 and A[t] >= C[t] - _TIE_REL * max(1.0, C[t])

    # Classify the policy by its reachable decisions only.  An accepting
    # step whose nice-probability is exactly 1 (step 1, and step 2 for the
    # best-or-worst rule) absorbs every surviving trajectory, so decisions
    # past it are vacuous: the realized policy of "accept at 1, dip, accept
    # late" is indistinguishable from the pure cutoff-0 rule.
    realizable = []
    for t in range(1, T + 1):
        nu = nice_probability(variant, t)
        if S[t] > 0.0 and nu > 0.0:
            realizable.append(t)
            if accept[t] and nu >= 1.0:
                break
    pattern = [accept[t] for t in realizable]
    is_threshold = all(not (a and not b) for a, b in zip(pattern, pattern[1:]))

    witness = None
    threshold = None
    if not is_threshold:
        for (t1, a1), (t2, a2) in zip(
            zip(realizable, pattern), zip(realizable[1:], pattern[1:])
        ):
            if a1 and not a2:
                witness = (t1, t2)
                break
    else:
        first_accept = next((t for t, a in zip(realizable, pattern) if a), None)
        if first_accept is None:
            r = realizable[-1] if realizable else T
        else:
            r = first_accept - 1
        # canonical form: dropping leading never-nice steps changes nothing
        while r >= 1 and nice_probability(variant, r) == 0.0:
            r -= 1
        threshold = r

    return DPPolicy(
        variant=variant,
        model=model,
        horizon=T,
        accept_at=tuple(accept),
        value_accept=tuple(A),
        value_reject=tuple(C),
        value=float(C[0]),
        is_threshold=is_threshold,
        threshold=threshold,
        witness=witness,
    )


def verify_threshold_structure(variant: Variant, model: CountModel):
    """(is_threshold, witness): witness is the first accept->reject step pair
    among steps where a nice candidate can actually occur."""
    pol = backward_induction(variant, model)
    return pol.is_threshold, pol.witness


def printed_recursion_gap(variant: Variant, model: CountModel) -> float:
    """Max deviation between the first-principles continue-values and the
    textbook-style recursion that weights the max-term by q_t/(t+1).

    The 1/(t+1) weight is the chance the (t+1)-th object is second-best-so-
    far (or best-so-far), so the gap vanishes for the classic and postdoc
    rules; for best-or-worst the true weight is 2/(t+1), and this reports how
    far the printed system drifts from the behavioral values.
    """
    pol = backward_induction(variant, model)
    dense = _dense_pmf(model)
    T = len(dense) - 1
    kf = np.arange(T + 1, dtype=float)
    S = np.concatenate([np.cumsum(dense[::-1])[::-1], [0.0]])
    U1 = np.concatenate(
        [np.cumsum(np.where(kf >= 1, dense / np.maximum(kf, 1.0), 0.0)[::-1])[::-1], [0.0]]
    )
    U2 = np.concatenate(
        [
            np.cumsum(
                np.where(kf >= 2, dense / np.maximum(kf * (kf - 1.0), 1.0), 0.0)[::-1]
            )[::-1],
            [0.0],
        ]
    )
    # definition-style accept values (single-identity convention throughout)
    A = np.zeros(T + 1)
    for t in range(1, T + 1):
        if S[t] <= 0.0:
            continue
        if variant is Variant.POSTDOC:
            A[t] = t * (t - 1) * U2[t] / S[t] if t >= 2 else 0.0
        else:
            A[t] = t * U1[t] / S[t]
    Cp = np.zeros(T + 1)
    for t in range(T - 1, -1, -1):
        if S[t] <= 0.0:
            continue
        q = S[t + 1] / S[t]
        w = 1.0 / (t + 1)
        Cp[t] = q * (w * max(A[t + 1], Cp[t + 1]) + (1.0 - w) * Cp[t + 1])
    return float(np.max(np.abs(Cp - np.array(pol.value_reject))))


_ORACLE_MAX_K = 9


def exhaustive_oracle(variant: Variant, model: CountModel, policy: ThresholdPolicy) -> Fraction:
    """Ground truth by enumerating every arrival order of every support size.

    Exact rational: sum_k p(k) * wins(k) / k!, with p(k) taken as the exact
    binary rational of the stored float.  Support must not exceed 9.
    """
    ks, ps = support(model)
    if int(ks.max(initial=0)) > _ORACLE_MAX_K:
        raise ValueError(f"exhaustive oracle capped at support <= {_ORACLE_MAX_K}")
    r = policy.cutoff
    total = Fraction(0)
    for k, p in zip(ks, ps):
        k = int(k)
        if k == 0 or p == 0.0:
            continue
        wins = 0
        for perm in permutations(range(1, k + 1)):
            best = second = worst = 0
            accepted = 0
            for t, x in enumerate(perm, start=1):
                if x > best:
                    second = best
                    best = x
                elif x > second:
                    second = x
                if worst == 0 or x < worst:
                    worst = x
                if t <= r:
                    continue
                if variant is Variant.CLASSIC:
                    nice = x == best
                elif variant is Variant.BEST_OR_WORST:
                    nice = x == best or x == worst
                else:
                    nice = t >= 2 and x == second
                if nice:
                    accepted = x
                    break
            if accepted:
                if variant is Variant.CLASSIC:
                    wins += accepted == k
                elif variant is Variant.BEST_OR_WORST:
                    wins += accepted in (1, k)
                else:
                    wins += accepted == k - 1
        total += Fraction(p) * Fraction(wins, math.factorial(k))
    return total
