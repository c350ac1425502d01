"""The randomized two-branch auction: analysis, distribution, sampling."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from rm_auctions import caii
from rm_auctions.model import Bidder, TypeProfile
from rm_auctions.verify import gen_instances


class CountingRandom(random.Random):
    """Counts uniform draws so tests can pin the consumption protocol."""

    def __init__(self, seed):
        super().__init__(seed)
        self.calls = 0

    def random(self):
        self.calls += 1
        return super().random()


def test_items_needed_to_clear():
    assert [caii.items_needed_to_clear(k) for k in (1, 2, 3, 4, 5)] == [1, 1, 2, 2, 3]


def test_runner_up_requires_covered_supply():
    with pytest.raises(ValueError):
        caii.runner_up((Bidder("a", 1, 5),), 3)


def test_golden_analysis(golden):
    a = caii.analyze(golden)
    assert a.runner_up_pos == 3
    assert a.runner_up_ppi == 3
    assert a.candidate_demand == 3
    assert a.low_win_prob == Fraction(4, 9)
    assert a.top_high_id == "b5"
    assert a.second_high_value == 6
    assert [b.id for b in a.candidates] == ["b1", "b2"]


def test_golden_distribution(golden):
    dist = caii.allocate(golden)
    assert dist.win_prob == {
        "b1": Fraction(4, 9),
        "b2": Fraction(4, 9),
        "b3": Fraction(0),
        "b4": Fraction(0),
        "b5": Fraction(1, 3),
        "b6": Fraction(0),
    }
    assert dist.expected_payment["b1"] == Fraction(8, 3)
    assert dist.expected_payment["b2"] == Fraction(4, 3)
    assert dist.expected_payment["b5"] == Fraction(2)
    assert dist.expected_revenue == 6
    assert dist.expected_welfare == Fraction(83, 9)
    assert dist.expected_items_sold == Fraction(7, 3)


def test_golden_closed_form_and_critical_bids(golden):
    assert caii.expected_revenue(golden) == 6
    assert caii.critical_bids(golden) == {"b1": 6, "b2": 3, "b5": 6}


def test_revenue_routes_agree_on_generated_instances():
    for profile in gen_instances(count=400, seed=11):
        dist = caii.allocate(profile)
        assert dist.expected_revenue == caii.expected_revenue(profile)
        assert dist.expected_revenue == sum(dist.expected_payment.values(), Fraction(0))


def test_candidate_demand_range_on_generated_instances():
    for profile in gen_instances(count=400, seed=12):
        a = caii.analyze(profile)
        half = caii.items_needed_to_clear(profile.k)
        if profile.k >= 2:
            assert half <= a.candidate_demand < profile.k
        else:
            assert a.candidate_demand == 0


def test_k1_degenerates_to_scaled_second_price():
    p = TypeProfile(1, (Bidder("b1", 1, 5), Bidder("b2", 1, 3)))
    a = caii.analyze(p)
    assert a.candidate_demand == 0
    assert a.low_win_prob == 0
    assert a.candidates == ()
    dist = caii.allocate(p)
    assert dist.win_prob == {"b1": Fraction(1, 3), "b2": Fraction(0)}
    assert dist.expected_revenue == 1  # second valuation / 3
    assert dist.expected_welfare == Fraction(5, 3)


def test_single_low_bidder_wins_free():
    # one small bidder: the runner-up is a padding slot priced at zero
    p = TypeProfile(2, (Bidder("b1", 1, 10),))
    dist = caii.allocate(p)
    assert dist.win_prob["b1"] == Fraction(2, 3)
    assert dist.expected_payment["b1"] == 0
    assert dist.expected_revenue == 0


def test_low_side_tie_breaks_toward_input_order():
    # equal per-item prices: earlier input position ranks first
    p = TypeProfile(
        4,
        (
            Bidder("y", 2, 6),
            Bidder("x", 1, 3),
            Bidder("z", 2, 6),
            Bidder("w", 2, 2),
        ),
    )
    a = caii.analyze(p)
    assert [b.id for b in a.classified.low] == ["y", "x", "z", "w"]
    assert a.runner_up_pos == 3
    assert [b.id for b in a.candidates] == ["y", "x"]


def test_only_low_bidders_leaves_high_branch_empty():
    p = TypeProfile(4, (Bidder("b1", 2, 8), Bidder("b2", 2, 6), Bidder("b3", 1, 1)))
    a = caii.analyze(p)
    assert a.classified.high[0].dummy
    assert a.second_high_value == 0
    # cumulative demand hits k at position 2, so b1 is the only candidate
    assert a.runner_up_pos == 2
    dist = caii.allocate(p)
    assert dist.win_prob == {
        "b1": Fraction(2, 3),
        "b2": Fraction(0),
        "b3": Fraction(0),
    }
    assert caii.critical_bids(p) == {"b1": 6}

    rng = random.Random(5)
    for _ in range(200):
        out = caii.sample(p, rng)
        if out.branch == "high":
            assert out.winners == frozenset()
            assert out.items_sold == 0


def test_sample_draw_consumption(golden):
    # one branch coin plus one draw per lottery candidate, on both branches
    rng = CountingRandom(0)
    caii.sample(golden, rng)
    assert rng.calls == caii.analyze(golden).runner_up_pos

    single = TypeProfile(1, (Bidder("b1", 1, 5),))
    rng = CountingRandom(0)
    caii.sample(single, rng)
    assert rng.calls == 1  # coin only: no candidates


def test_sample_matches_distribution(golden):
    trials = 20_000
    rng = random.Random(42)
    dist = caii.allocate(golden)
    crits = caii.critical_bids(golden)
    wins = {b.id: 0 for b in golden.bidders}
    for _ in range(trials):
        out = caii.sample(golden, rng)
        assert out.items_sold <= golden.k
        assert out.charge.keys() == out.winners
        for bid in out.winners:
            wins[bid] += 1
            # realized charge is always the winner's critical bid
            assert out.charge[bid] == crits[bid]
    for bid, prob in dist.win_prob.items():
        freq = wins[bid] / trials
        assert abs(freq - float(prob)) < 0.02, bid


def test_sampled_winners_never_include_dummies():
    for profile in gen_instances(count=60, seed=13):
        rng = random.Random(99)
        real = {b.id for b in profile.bidders}
        for _ in range(20):
            out = caii.sample(profile, rng)
            assert out.winners <= real
            assert out.items_sold <= profile.k


def test_analysis_is_cached_and_stable(golden):
    first = caii.analyze(golden)
    assert caii.analyze(golden) is first
    caii.analyze.cache_clear()
    again = caii.analyze(golden)
    assert again == first and again is not first
