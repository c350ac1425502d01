"""Exact welfare baselines: optimal allocations and the classic pivot auction.

`max_welfare` solves the 0/1 knapsack over bidder demands exactly with a
dynamic program; `max_welfare_bruteforce` enumerates subsets and exists so
tests can validate the DP against an independent route.  `vcg` computes the
welfare-maximizing allocation with pivot payments; it takes profiles as
given (no dummy padding) and is the baseline whose revenue famously drops
when competition is added.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import GroupedProfile, OutcomeDistribution, TypeProfile


@dataclass(frozen=True)
class WelfareResult:
    value: Fraction
    winners: frozenset[str]


@dataclass(frozen=True)
class VcgResult:
    winners: frozenset[str]
    payments: dict[str, Fraction]
    revenue: Fraction
    welfare: Fraction


def max_welfare(profile: TypeProfile) -> WelfareResult:
    """Maximum total valuation over bidder subsets whose demands fit in k.

    O(n*k) dynamic program.  Ties between optimal subsets break toward
    including the earliest-indexed bidders, so the winner set is
    deterministic.
    """
    bidders = profile.bidders
    n = len(bidders)
    k = profile.k
    zero = Fraction(0)

    # best[i][c]: optimum using bidders i.. with capacity c
    best = [[zero] * (k + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        b = bidders[i]
        row = best[i]
        nxt = best[i + 1]
        for c in range(k + 1):
            keep = nxt[c]
            if b.demand <= c:
                with_b = b.valuation + nxt[c - b.demand]
                if with_b > keep:
                    keep = with_b
            row[c] = keep

    winners = []
    c = k
    for i, b in enumerate(bidders):
        if b.demand <= c and b.valuation + best[i + 1][c - b.demand] == best[i][c]:
            winners.append(b.id)
            c -= b.demand
    return WelfareResult(best[0][k], frozenset(winners))


def max_welfare_bruteforce(profile: TypeProfile) -> Fraction:
    """Exhaustive subset enumeration; the independent check for the DP."""
    n = len(profile.bidders)
    if n > 22:
        raise ValueError("brute force is limited to 22 bidders")
    demands = [b.demand for b in profile.bidders]
    values = [b.valuation for b in profile.bidders]
    best = Fraction(0)
    for mask in range(1 << n):
        load = 0
        total = Fraction(0)
        for i in range(n):
            if mask >> i & 1:
                load += demands[i]
                if load > profile.k:
                    break
                total += values[i]
        else:
            if total > best:
                best = total
    return best


def group_max_welfare(profile: GroupedProfile) -> Fraction:
    """Best welfare achievable inside a single group (the grouped mechanisms
    may only ever sell within one group)."""
    return max(
        (max_welfare(profile.group_profile(gid)).value for gid in profile.group_ids()),
        default=Fraction(0),
    )


def vcg(profile: TypeProfile) -> VcgResult:
    """Welfare-maximizing allocation with pivot payments.

    Each winner pays the welfare the others would get without her, minus the
    welfare the others get alongside her.  Payments are nonnegative and never
    exceed the winner's valuation.
    """
    opt = max_welfare(profile)
    payments: dict[str, Fraction] = {}
    for b in profile.bidders:
        if b.id not in opt.winners:
            continue
        others = TypeProfile(profile.k, tuple(x for x in profile.bidders if x.id != b.id))
        without = max_welfare(others).value
        payments[b.id] = without - (opt.value - b.valuation)
    revenue = sum(payments.values(), Fraction(0))
    return VcgResult(opt.winners, payments, revenue, opt.value)


def vcg_distribution(profile: TypeProfile) -> OutcomeDistribution:
    """The pivot auction folded into the common distribution shape (it is
    deterministic, so every probability is 0 or 1)."""
    res = vcg(profile)
    one, zero = Fraction(1), Fraction(0)
    win = {b.id: (one if b.id in res.winners else zero) for b in profile.bidders}
    pay = {b.id: res.payments.get(b.id, zero) for b in profile.bidders}
    items = sum((b.demand for b in profile.bidders if b.id in res.winners), 0)
    return OutcomeDistribution(win, pay, res.revenue, res.welfare, Fraction(items))
