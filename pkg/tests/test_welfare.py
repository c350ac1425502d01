"""Exact welfare oracles: knapsack DP, brute force, and pivot payments."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rm_auctions import welfare
from rm_auctions.model import Bidder, GroupedProfile, TypeProfile


def test_golden_max_welfare(golden):
    res = welfare.max_welfare(golden)
    assert res.value == 16
    assert res.winners == frozenset({"b1", "b3"})


def test_max_welfare_tie_prefers_earlier_bidders():
    # {a} and {b, c} both reach 5; the walk keeps the earliest usable bidder
    p = TypeProfile(2, (Bidder("a", 2, 5), Bidder("b", 1, 3), Bidder("c", 1, 2)))
    res = welfare.max_welfare(p)
    assert res.value == 5
    assert res.winners == frozenset({"a"})


def test_max_welfare_empty_when_nothing_fits():
    p = TypeProfile(3, (Bidder("a", 3, 0),))
    res = welfare.max_welfare(p)
    assert res.value == 0


small_instances = st.builds(
    lambda k, rows: TypeProfile(
        k,
        tuple(
            Bidder(f"b{i + 1}", 1 + d % k, Fraction(num, den))
            for i, (d, num, den) in enumerate(rows)
        ),
    ),
    st.integers(min_value=1, max_value=10),
    st.lists(
        st.tuples(
            st.integers(min_value=0, max_value=31),
            st.integers(min_value=0, max_value=200),
            st.integers(min_value=1, max_value=4),
        ),
        min_size=1,
        max_size=9,
    ),
)


@given(small_instances)
@settings(max_examples=200, deadline=None)
def test_dp_agrees_with_bruteforce(profile):
    res = welfare.max_welfare(profile)
    assert res.value == welfare.max_welfare_bruteforce(profile)
    # the reported winner set actually attains the value and fits
    total = sum((profile.bidder(bid).valuation for bid in res.winners), Fraction(0))
    load = sum(profile.bidder(bid).demand for bid in res.winners)
    assert total == res.value
    assert load <= profile.k


def test_bruteforce_guards_instance_size():
    p = TypeProfile(2, tuple(Bidder(f"b{i}", 1, 1) for i in range(23)))
    with pytest.raises(ValueError):
        welfare.max_welfare_bruteforce(p)


def test_group_max_welfare(golden_grouped):
    # best single-group welfare: g1 reaches 16, g2 only 7
    assert welfare.group_max_welfare(golden_grouped) == 16


def test_vcg_two_bidder_instance():
    p = TypeProfile(2, (Bidder("b1", 1, 2), Bidder("b2", 2, 2)))
    res = welfare.vcg(p)
    assert res.winners == frozenset({"b1"})
    assert res.payments == {"b1": Fraction(2)}
    assert res.revenue == 2
    assert res.welfare == 2


def test_vcg_revenue_collapses_with_added_competition():
    p = TypeProfile(
        2,
        (Bidder("b1", 1, 2), Bidder("b2", 2, 2), Bidder("b3", 1, 2)),
    )
    res = welfare.vcg(p)
    assert res.winners == frozenset({"b1", "b3"})
    assert res.payments == {"b1": Fraction(0), "b3": Fraction(0)}
    assert res.revenue == 0
    assert res.welfare == 4


@given(small_instances)
@settings(max_examples=150, deadline=None)
def test_vcg_payments_are_individually_rational(profile):
    res = welfare.vcg(profile)
    for bid, pay in res.payments.items():
        assert 0 <= pay <= profile.bidder(bid).valuation


def test_vcg_distribution_shape(golden):
    dist = welfare.vcg_distribution(golden)
    res = welfare.vcg(golden)
    assert set(dist.win_prob) == {b.id for b in golden.bidders}
    for bid, w in dist.win_prob.items():
        assert w in (0, 1)
        assert (w == 1) == (bid in res.winners)
    assert dist.expected_revenue == res.revenue
    assert dist.expected_welfare == res.welfare
    assert dist.expected_items_sold == sum(
        b.demand for b in golden.bidders if b.id in res.winners
    )
