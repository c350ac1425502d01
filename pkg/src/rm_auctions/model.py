"""Domain types for auctions of k identical items.

Bidders are single-parameter: each one wants a fixed number of items
(all or nothing) and reports a single valuation for that bundle.  The
mechanisms in this package split bidders into a small-demand side and a
large-demand side around the threshold floor(k/2), pad both sides with
zero-value dummies so downstream quantities always exist, and order each
side by a deterministic "more valuable" relation.  Everything here is
exact: valuations are `fractions.Fraction`, never floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

Rational = Fraction


def as_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce an int, a string like "21/4", or a Fraction to a Fraction.

    Floats are rejected on purpose: mechanism arithmetic must stay exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class Bidder:
    """One bidder: wants exactly `demand` items, values the bundle at `valuation`.

    `dummy` marks padding bidders injected during classification; they never
    appear in reported outcomes.
    """

    id: str
    demand: int
    valuation: Fraction
    dummy: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("bidder id must be a non-empty string")
        if not isinstance(self.demand, int) or isinstance(self.demand, bool):
            raise ValueError(f"bidder {self.id}: demand must be an integer")
        if self.demand < 1:
            raise ValueError(f"bidder {self.id}: demand must be at least 1")
        object.__setattr__(self, "valuation", as_rational(self.valuation))
        if self.valuation < 0:
            raise ValueError(f"bidder {self.id}: valuation must be nonnegative")


def ppi(bidder: Bidder) -> Fraction:
    """Price per item: the bidder's valuation spread evenly over her demand."""
    return bidder.valuation / bidder.demand


def _check_bidders(k: int, bidders: Sequence[Bidder]) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError("k must be a positive integer")
    seen: set[str] = set()
    for b in bidders:
        if b.id in seen:
            raise ValueError(f"duplicate bidder id {b.id!r}")
        seen.add(b.id)
        if b.demand > k:
            raise ValueError(f"bidder {b.id}: demand {b.demand} exceeds supply k={k}")


@dataclass(frozen=True)
class TypeProfile:
    """An ungrouped auction instance: the supply k and the reported bidders.

    Bidder order is meaningful: position in the tuple is the tie-break index
    used by the more-valuable orderings.
    """

    k: int
    bidders: tuple[Bidder, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bidders", tuple(self.bidders))
        _check_bidders(self.k, self.bidders)

    def bidder(self, bidder_id: str) -> Bidder:
        for b in self.bidders:
            if b.id == bidder_id:
                return b
        raise KeyError(bidder_id)

    def with_valuation(self, bidder_id: str, valuation: Union[int, str, Fraction]) -> TypeProfile:
        """Copy of this profile with one bidder's valuation replaced."""
        v = as_rational(valuation)
        out = tuple(
            Bidder(b.id, b.demand, v, b.dummy) if b.id == bidder_id else b for b in self.bidders
        )
        if out == self.bidders and not any(b.id == bidder_id for b in self.bidders):
            raise KeyError(bidder_id)
        return TypeProfile(self.k, out)

    def with_bidder(self, bidder: Bidder) -> TypeProfile:
        """Copy of this profile with one more bidder appended."""
        return TypeProfile(self.k, self.bidders + (bidder,))


@dataclass(frozen=True)
class GroupedProfile:
    """An auction instance whose bidders are partitioned into named groups.

    Group order is meaningful (ties in group selection break toward the
    earlier group), and bidder order within a group is the tie-break index
    for that group's internal orderings.
    """

    k: int
    groups: tuple[tuple[str, tuple[Bidder, ...]], ...]

    def __post_init__(self) -> None:
        norm = tuple((gid, tuple(members)) for gid, members in self.groups)
        object.__setattr__(self, "groups", norm)
        if not norm:
            raise ValueError("a grouped profile needs at least one group")
        gids = [gid for gid, _ in norm]
        if len(set(gids)) != len(gids):
            raise ValueError("duplicate group id")
        _check_bidders(self.k, self.all_bidders())

    def all_bidders(self) -> tuple[Bidder, ...]:
        return tuple(b for _, members in self.groups for b in members)

    def group_ids(self) -> tuple[str, ...]:
        return tuple(gid for gid, _ in self.groups)

    def members(self, group_id: str) -> tuple[Bidder, ...]:
        for gid, members in self.groups:
            if gid == group_id:
                return members
        raise KeyError(group_id)

    def group_profile(self, group_id: str) -> TypeProfile:
        """The group viewed as a standalone instance with the same supply."""
        return TypeProfile(self.k, self.members(group_id))

    def flatten(self) -> TypeProfile:
        """All bidders in group order, groups forgotten."""
        return TypeProfile(self.k, self.all_bidders())

    def group_of(self, bidder_id: str) -> str:
        for gid, members in self.groups:
            if any(b.id == bidder_id for b in members):
                return gid
        raise KeyError(bidder_id)

    def with_valuation(self, bidder_id: str, valuation: Union[int, str, Fraction]) -> GroupedProfile:
        v = as_rational(valuation)
        found = False
        out = []
        for gid, members in self.groups:
            row = []
            for b in members:
                if b.id == bidder_id:
                    row.append(Bidder(b.id, b.demand, v, b.dummy))
                    found = True
                else:
                    row.append(b)
            out.append((gid, tuple(row)))
        if not found:
            raise KeyError(bidder_id)
        return GroupedProfile(self.k, tuple(out))

    def with_bidder(self, group_id: str, bidder: Bidder) -> GroupedProfile:
        found = False
        out = []
        for gid, members in self.groups:
            if gid == group_id:
                out.append((gid, members + (bidder,)))
                found = True
            else:
                out.append((gid, members))
        if not found:
            raise KeyError(group_id)
        return GroupedProfile(self.k, tuple(out))

    def with_group(self, group_id: str, members: Sequence[Bidder]) -> GroupedProfile:
        return GroupedProfile(self.k, self.groups + ((group_id, tuple(members)),))


Profile = Union[TypeProfile, GroupedProfile]


def low_demand_threshold(k: int) -> int:
    return k // 2


def is_high_demand(bidder: Bidder, k: int) -> bool:
    """A bidder is high-demand when she wants more than half the supply."""
    return bidder.demand > low_demand_threshold(k)


def more_valuable_low(a: Bidder, b: Bidder, index_map: Mapping[str, int]) -> bool:
    """Strict ordering of the small-demand side: higher price per item first,
    ties broken toward the earlier tie-break index."""
    pa, pb = ppi(a), ppi(b)
    if pa != pb:
        return pa > pb
    return index_map[a.id] < index_map[b.id]


def more_valuable_high(a: Bidder, b: Bidder, index_map: Mapping[str, int]) -> bool:
    """Strict ordering of the large-demand side: higher valuation first,
    ties broken toward the earlier tie-break index."""
    if a.valuation != b.valuation:
        return a.valuation > b.valuation
    return index_map[a.id] < index_map[b.id]


@dataclass(frozen=True)
class ClassifiedProfile:
    """A profile split and sorted for the two-sided mechanisms.

    `low` holds every real bidder with demand <= floor(k/2), padded at the
    bottom with demand-1 value-0 dummies until the side's total demand
    covers k, and sorted most-valuable-first by price per item.  `high`
    holds the remaining real bidders plus exactly two demand-k value-0
    dummies, sorted most-valuable-first by valuation, so the top two
    positions always exist.  `index_map` records each bidder's tie-break
    index (input position; dummies come after all real bidders).
    """

    k: int
    low: tuple[Bidder, ...]
    high: tuple[Bidder, ...]
    index_map: Mapping[str, int]


def _dummy_ids(taken: set[str], stem: str) -> Iterator[str]:
    n = 0
    while True:
        candidate = f"~{stem}{n}"
        while candidate in taken:
            candidate += "~"
        taken.add(candidate)
        yield candidate
        n += 1


def classify(profile: TypeProfile) -> ClassifiedProfile:
    """Split a profile into its sorted low-demand and high-demand sides.

    Deterministic: depends only on the profile, so repeated calls agree.
    For k=1 the threshold floor(k/2)=0 puts every real bidder on the high
    side and the low side is padding only.
    """
    k = profile.k
    threshold = low_demand_threshold(k)
    index_map: dict[str, int] = {b.id: i for i, b in enumerate(profile.bidders)}
    taken = set(index_map)
    next_index = len(profile.bidders)

    low = [b for b in profile.bidders if b.demand <= threshold]
    high = [b for b in profile.bidders if b.demand > threshold]

    low_total = sum(b.demand for b in low)
    for did in _dummy_ids(taken, "pad"):
        if low_total >= k:
            break
        d = Bidder(did, 1, Fraction(0), dummy=True)
        low.append(d)
        index_map[d.id] = next_index
        next_index += 1
        low_total += 1

    names = _dummy_ids(taken, "top")
    for _ in range(2):
        d = Bidder(next(names), k, Fraction(0), dummy=True)
        high.append(d)
        index_map[d.id] = next_index
        next_index += 1

    low.sort(key=lambda b: (-ppi(b), index_map[b.id]))
    high.sort(key=lambda b: (-b.valuation, index_map[b.id]))
    return ClassifiedProfile(k, tuple(low), tuple(high), index_map)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact distribution of a (possibly randomized) mechanism's outcome.

    Maps cover every real bidder in the instance (zero entries for sure
    losers); dummies are excluded.  `expected_revenue` always equals the sum
    of `expected_payment`, and welfare/items are expectations under the same
    win probabilities.
    """

    win_prob: Mapping[str, Fraction]
    expected_payment: Mapping[str, Fraction]
    expected_revenue: Fraction
    expected_welfare: Fraction
    expected_items_sold: Fraction


@dataclass(frozen=True)
class SampledOutcome:
    """One realized outcome: who won, what each winner owes, items sold.

    Dummies are filtered out before this is built.  `branch` names the
    random branch (or deterministic case) the realization took; it is
    reporting metadata, not part of the payment rule.
    """

    winners: frozenset[str]
    charge: Mapping[str, Fraction]
    items_sold: int
    branch: str
