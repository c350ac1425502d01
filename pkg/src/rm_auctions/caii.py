"""Randomized two-branch auction for k identical items.

With probability 1/3 the most valuable large-demand bidder wins alone and
pays the second-highest large-demand valuation.  With probability 2/3 every
small-demand bidder ranked ahead of the runner-up (the position where
cumulative small-side demand first covers k) wins independently with
probability ceil(k/2)/A, where A is the total demand ahead of the runner-up,
and pays her demand times the runner-up's price per item.  Both branches
charge each winner her critical bid, so truthful reporting is optimal, and
the expected revenue never drops when bidders arrive or raise their bids.

All quantities are exact rationals.  Sampling consumes a documented number
of draws from the caller's `random.Random`: one uniform for the branch coin
(high branch iff u < 1/3), then one uniform per low candidate in sorted
order, drawn on both branches so a sample always consumes exactly
`runner_up_pos` draws.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .model import (
    Bidder,
    ClassifiedProfile,
    OutcomeDistribution,
    SampledOutcome,
    TypeProfile,
    classify,
    ppi,
)

HIGH_BRANCH_PROB = Fraction(1, 3)


def items_needed_to_clear(k: int) -> int:
    """ceil(k/2): the number of items the low branch aims to sell."""
    return (k + 1) // 2


def runner_up(low_sorted: Sequence[Bidder], k: int) -> int:
    """1-based position where cumulative demand over the sorted low side first
    reaches k.  The side must have been padded so that it does."""
    total = 0
    for pos, b in enumerate(low_sorted, start=1):
        total += b.demand
        if total >= k:
            return pos
    raise ValueError("low side demand does not cover the supply; classify the profile first")


@dataclass(frozen=True)
class CaiiAnalysis:
    """Everything the mechanism needs, derived deterministically from a profile.

    `candidate_demand` is the total demand of low positions ahead of the
    runner-up; for k >= 2 it always lies in [ceil(k/2), k).  For k=1 the low
    side is padding only, the runner-up is the first dummy, and
    `candidate_demand` is 0: the low branch then sells nothing and the
    mechanism degenerates to a 1/3-probability second-price sale.
    """

    classified: ClassifiedProfile
    runner_up_pos: int
    runner_up_ppi: Fraction
    candidate_demand: int
    low_win_prob: Fraction
    top_high_id: str
    second_high_value: Fraction

    @property
    def candidates(self) -> tuple[Bidder, ...]:
        """Low bidders ahead of the runner-up, in sorted order (dummies included)."""
        return self.classified.low[: self.runner_up_pos - 1]


@lru_cache(maxsize=512)
def analyze(profile: TypeProfile) -> CaiiAnalysis:
    cls = classify(profile)
    r = runner_up(cls.low, profile.k)
    candidate_demand = sum(b.demand for b in cls.low[: r - 1])
    half = items_needed_to_clear(profile.k)
    if candidate_demand:
        low_win_prob = Fraction(2 * half, 3 * candidate_demand)
    else:
        low_win_prob = Fraction(0)
    return CaiiAnalysis(
        classified=cls,
        runner_up_pos=r,
        runner_up_ppi=ppi(cls.low[r - 1]),
        candidate_demand=candidate_demand,
        low_win_prob=low_win_prob,
        top_high_id=cls.high[0].id,
        second_high_value=cls.high[1].valuation,
    )


def allocate(profile: TypeProfile) -> OutcomeDistribution:
    """Exact outcome distribution over the real bidders.

    Each low candidate wins with probability (2/3) * ceil(k/2)/A and pays,
    conditional on winning, demand * runner-up price per item; the top high
    bidder wins with probability 1/3 and pays the second high valuation.
    """
    a = analyze(profile)
    zero = Fraction(0)
    win = {b.id: zero for b in profile.bidders}
    pay = {b.id: zero for b in profile.bidders}

    for b in a.candidates:
        if b.dummy:
            continue
        win[b.id] = a.low_win_prob
        pay[b.id] = a.low_win_prob * b.demand * a.runner_up_ppi

    top = a.classified.high[0]
    if not top.dummy:
        win[top.id] = HIGH_BRANCH_PROB
        pay[top.id] = a.second_high_value * HIGH_BRANCH_PROB

    revenue = sum(pay.values(), zero)
    welfare = sum((win[b.id] * b.valuation for b in profile.bidders), zero)
    items = sum((win[b.id] * b.demand for b in profile.bidders), zero)
    return OutcomeDistribution(win, pay, revenue, welfare, items)


def expected_revenue(profile: TypeProfile) -> Fraction:
    """Closed form: (2*ceil(k/2)/3) * runner-up ppi + (second high value)/3.

    Kept independent of `allocate` so the two routes can cross-check each
    other; they agree exactly on every profile.
    """
    a = analyze(profile)
    half = items_needed_to_clear(profile.k)
    return Fraction(2 * half, 3) * a.runner_up_ppi + a.second_high_value / 3


def critical_bids(profile: TypeProfile) -> dict[str, Fraction]:
    """Per-winner threshold bids: bidding below loses, at/above wins at the
    same probability, and the charge upon winning equals this threshold."""
    a = analyze(profile)
    out: dict[str, Fraction] = {}
    for b in a.candidates:
        if not b.dummy:
            out[b.id] = b.demand * a.runner_up_ppi
    top = a.classified.high[0]
    if not top.dummy:
        out[top.id] = a.second_high_value
    return out


def sample(profile: TypeProfile, rng: random.Random) -> SampledOutcome:
    """Draw one outcome.  Consumes exactly `runner_up_pos` uniforms: the
    branch coin first, then one per low candidate regardless of branch."""
    a = analyze(profile)
    coin = rng.random()
    keeps = [rng.random() for _ in a.candidates]

    if coin < HIGH_BRANCH_PROB:
        top = a.classified.high[0]
        if top.dummy:
            return SampledOutcome(frozenset(), {}, 0, "high")
        charge = {top.id: a.second_high_value}
        return SampledOutcome(frozenset({top.id}), charge, top.demand, "high")

    half = items_needed_to_clear(profile.k)
    keep_prob = Fraction(half, a.candidate_demand) if a.candidate_demand else Fraction(0)
    winners = [
        b for b, u in zip(a.candidates, keeps) if u < keep_prob and not b.dummy
    ]
    charge = {b.id: b.demand * a.runner_up_ppi for b in winners}
    items = sum(b.demand for b in winners)
    return SampledOutcome(frozenset(b.id for b in winners), charge, items, "low")
