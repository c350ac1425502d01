"""The group-restricted auction: scoring, case selection, sampling."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from rm_auctions import mcaii
from rm_auctions.model import Bidder, GroupedProfile, TypeProfile, classify
from rm_auctions.verify import gen_instances


class CountingRandom(random.Random):
    def __init__(self, seed):
        super().__init__(seed)
        self.calls = 0

    def random(self):
        self.calls += 1
        return super().random()


def test_item_values_golden(golden):
    cls = classify(golden)
    assert mcaii.item_values(cls.low, golden.k) == (5, 5, 4, 3)


def test_item_values_require_covered_supply():
    with pytest.raises(ValueError):
        mcaii.item_values((Bidder("a", 1, 5),), 3)


def test_group_scores_golden(golden_grouped):
    g1, g2 = mcaii.analyze(golden_grouped)
    assert g1.group_id == "g1" and g2.group_id == "g2"
    assert g1.top_high_value == 9 and g1.second_high_value == 6
    assert g1.best_bundle_revenue == 10  # two items at per-item price 5
    assert g1.mprg == 10
    assert g2.mprg == 7
    assert mcaii.select_group(golden_grouped) == ("g1", Fraction(7))


def test_golden_grouped_decision(golden_grouped):
    decision, dist = mcaii.allocate(golden_grouped)
    assert decision.winning_group == "g1"
    assert decision.reserve == 7
    assert decision.case == mcaii.CASE_LOW_FULL
    assert decision.jstar == 2
    assert decision.cutoff_pos == 1
    assert decision.candidate_demand == 2
    assert dist.win_prob["b1"] == 1
    assert dist.expected_payment["b1"] == 9
    assert all(dist.win_prob[bid] == 0 for bid in dist.win_prob if bid != "b1")
    assert dist.expected_revenue == 9
    assert dist.expected_welfare == 10
    assert dist.expected_items_sold == 2
    assert mcaii.expected_revenue(golden_grouped) == 9
    assert mcaii.critical_bids(golden_grouped) == {"b1": 9}


def test_high_case():
    # the small side can raise at most 1, far below the top valuation
    p = GroupedProfile(
        4, (("g1", (Bidder("h1", 3, 100), Bidder("b1", 1, 1))),)
    )
    decision, dist = mcaii.allocate(p)
    assert decision.case == mcaii.CASE_HIGH
    assert decision.jstar is None
    assert decision.reserve == 0
    assert dist.win_prob == {"h1": 1, "b1": 0}
    # price: best small bundle (1) beats reserve (0) and second value (0)
    assert dist.expected_payment["h1"] == 1
    assert dist.expected_revenue == 1
    assert dist.expected_items_sold == 3
    assert mcaii.critical_bids(p) == {"h1": 1}

    rng = CountingRandom(0)
    out = mcaii.sample(p, rng)
    assert rng.calls == 0
    assert out.winners == frozenset({"h1"})
    assert out.charge == {"h1": 1}
    assert out.branch == mcaii.CASE_HIGH


def test_low_partial_case():
    # one strong small bidder covers the floor alone with one item
    p = GroupedProfile(
        4, (("g1", (Bidder("b1", 1, 10), Bidder("h1", 3, 6))),)
    )
    decision, dist = mcaii.allocate(p)
    assert decision.case == mcaii.CASE_LOW_PARTIAL
    assert decision.jstar == 1
    assert dist.win_prob == {"b1": 1, "h1": 0}
    assert dist.expected_payment["b1"] == 6  # exactly the floor
    assert dist.expected_revenue == 6
    assert dist.expected_items_sold == 1
    assert mcaii.critical_bids(p) == {"b1": 6}

    rng = CountingRandom(0)
    out = mcaii.sample(p, rng)
    assert rng.calls == 0
    assert out.winners == frozenset({"b1"})
    assert out.items_sold == 1


def test_score_tie_breaks_toward_earlier_group():
    p = GroupedProfile(
        2,
        (
            ("g1", (Bidder("a1", 1, 4),)),
            ("g2", (Bidder("a2", 1, 4),)),
        ),
    )
    gid, reserve = mcaii.select_group(p)
    assert gid == "g1"
    assert reserve == 4
    decision, dist = mcaii.allocate(p)
    assert decision.winning_group == "g1"
    assert dist.win_prob == {"a1": 1, "a2": 0}
    assert dist.expected_revenue == 4  # the rival group's score becomes the price


def test_single_empty_group_sells_nothing():
    p = GroupedProfile(2, (("g1", ()),))
    decision, dist = mcaii.allocate(p)
    assert dist.win_prob == {}
    assert dist.expected_revenue == 0
    out = mcaii.sample(p, random.Random(0))
    assert out.winners == frozenset()
    assert sum(out.charge.values(), Fraction(0)) == 0


def test_revenue_sandwich_on_generated_instances():
    for profile in gen_instances(count=300, seed=21, grouped=True):
        decision, dist = mcaii.allocate(profile)
        g = next(
            a for a in decision.group_analyses if a.group_id == decision.winning_group
        )
        assert decision.reserve <= dist.expected_revenue <= g.mprg
        assert dist.expected_revenue == sum(dist.expected_payment.values(), Fraction(0))
        assert dist.expected_revenue == mcaii.expected_revenue(profile)


def test_winning_group_has_top_score():
    for profile in gen_instances(count=200, seed=22, grouped=True):
        decision, _ = mcaii.allocate(profile)
        scores = {g.group_id: g.mprg for g in decision.group_analyses}
        assert scores[decision.winning_group] == max(scores.values())


def test_sample_draw_consumption(golden_grouped):
    decision, _ = mcaii.allocate(golden_grouped)
    assert decision.case == mcaii.CASE_LOW_FULL
    rng = CountingRandom(0)
    mcaii.sample(golden_grouped, rng)
    assert rng.calls == decision.cutoff_pos


def test_golden_grouped_sampling(golden_grouped):
    # the single admitted position is kept with probability one
    rng = random.Random(9)
    for _ in range(50):
        out = mcaii.sample(golden_grouped, rng)
        assert out.winners == frozenset({"b1"})
        assert out.charge == {"b1": 9}
        assert out.items_sold == 2
        assert out.branch == mcaii.CASE_LOW_FULL


def test_sampled_outcomes_stay_inside_winning_group():
    for profile in gen_instances(count=80, seed=23, grouped=True):
        decision, _ = mcaii.allocate(profile)
        members = {b.id for b in profile.members(decision.winning_group)}
        rng = random.Random(7)
        for _ in range(15):
            out = mcaii.sample(profile, rng)
            assert out.winners <= members
            assert out.items_sold <= profile.k


def test_allocate_returns_fresh_maps(golden_grouped):
    decision, dist = mcaii.allocate(golden_grouped)
    assert dist.win_prob is not decision.win_prob
    dist.win_prob["b1"] = Fraction(0)  # a caller mutating its copy
    _, again = mcaii.allocate(golden_grouped)
    assert again.win_prob["b1"] == 1
