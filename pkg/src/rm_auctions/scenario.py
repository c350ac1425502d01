"""Scenario files and exact-number rendering.

A scenario is a JSON object: {"k": int, "bidders": [{"id", "demand",
"valuation", "group"?}, ...]}.  Valuations are rational strings ("10",
"21/4"); plain JSON integers are accepted on input and written back as
strings.  Either every bidder carries a "group" or none does; group order
follows first appearance.  Parsing then serializing then parsing again
yields an identical profile.
"""

from __future__ import annotations

import json
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Union

from .model import Bidder, GroupedProfile, Profile, TypeProfile, as_rational


class ScenarioError(ValueError):
    """Malformed scenario content; the message carries the location."""


def _fail(where: str, problem: str) -> None:
    raise ScenarioError(f"{where}: {problem}")


def _parse_valuation(raw: Any, where: str) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        _fail(where, "valuation must be a rational string like \"21/4\" or an integer")
    try:
        value = as_rational(raw)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        _fail(where, f"not a valid rational: {raw!r} ({exc})")
    if value < 0:
        _fail(where, "valuation must be nonnegative")
    return value


def parse_scenario(text: str) -> Profile:
    """Parse scenario JSON into a profile; raises ScenarioError with a
    line- or path-anchored message on any defect."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc

    if not isinstance(data, dict):
        _fail("top level", "expected a JSON object")
    if "k" not in data:
        _fail("top level", "missing required key \"k\"")
    k = data["k"]
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        _fail("k", "must be a positive integer")
    raw_bidders = data.get("bidders")
    if not isinstance(raw_bidders, list):
        _fail("bidders", "must be a list")
    extra = set(data) - {"k", "bidders"}
    if extra:
        _fail("top level", f"unknown keys: {sorted(extra)}")

    bidders: list[Bidder] = []
    groups: list[Union[str, None]] = []
    for i, entry in enumerate(raw_bidders):
        where = f"bidders[{i}]"
        if not isinstance(entry, dict):
            _fail(where, "expected an object")
        unknown = set(entry) - {"id", "demand", "valuation", "group"}
        if unknown:
            _fail(where, f"unknown keys: {sorted(unknown)}")
        bid = entry.get("id")
        if not isinstance(bid, str) or not bid:
            _fail(f"{where}.id", "must be a non-empty string")
        demand = entry.get("demand")
        if isinstance(demand, bool) or not isinstance(demand, int):
            _fail(f"{where}.demand", "must be an integer")
        value = _parse_valuation(entry.get("valuation"), f"{where}.valuation")
        group = entry.get("group")
        if group is not None and (not isinstance(group, str) or not group):
            _fail(f"{where}.group", "must be a non-empty string")
        try:
            bidders.append(Bidder(bid, demand, value))
        except ValueError as exc:
            _fail(where, str(exc))
        groups.append(group)

    grouped = [g for g in groups if g is not None]
    if grouped and len(grouped) != len(groups):
        _fail("bidders", "either every bidder carries a \"group\" or none does")

    try:
        if not grouped:
            return TypeProfile(k, tuple(bidders))
        order: list[str] = []
        members: dict[str, list[Bidder]] = {}
        for b, g in zip(bidders, groups):
            assert g is not None
            if g not in members:
                order.append(g)
                members[g] = []
            members[g].append(b)
        return GroupedProfile(k, tuple((g, tuple(members[g])) for g in order))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path: str) -> Profile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def profile_to_json(profile: Profile) -> dict:
    """Scenario-shaped dict for a profile (inverse of parse_scenario)."""
    rows = []
    if isinstance(profile, GroupedProfile):
        for gid, members in profile.groups:
            for b in members:
                rows.append(
                    {"id": b.id, "demand": b.demand, "valuation": str(b.valuation), "group": gid}
                )
    else:
        for b in profile.bidders:
            rows.append({"id": b.id, "demand": b.demand, "valuation": str(b.valuation)})
    return {"k": profile.k, "bidders": rows}


def dump_scenario(profile: Profile) -> str:
    return json.dumps(profile_to_json(profile), indent=2)


def decimal_str(x: Fraction, significant_digits: int = 12) -> str:
    """Decimal rendering with 12 significant digits, derived from the exact
    rational (never from a float)."""
    with localcontext() as ctx:
        ctx.prec = significant_digits
        return str(Decimal(x.numerator) / Decimal(x.denominator))


def rational_json(x: Union[Fraction, None]) -> dict:
    """The standard report shape for a numeric field: exact and readable."""
    if x is None:
        return {"rational": None, "decimal": "inf"}
    return {"rational": str(x), "decimal": decimal_str(x)}
