"""Property harness for the auction mechanisms.

Four families of checks, all exact unless stated otherwise:

* incentive compatibility (`check_ic`): probe each real bidder's allocation
  curve by re-running the mechanism at alternative bids, then confirm the
  curve is a nondecreasing single step whose location matches the reported
  critical bid and whose expected payment is win probability times that bid;
* revenue monotonicity (`check_rm`): apply an augmentation (new bidder,
  raised bid, new group) and compare exact expected revenues;
* welfare ratio (`porm_ratio`): exact optimal welfare over the mechanism's
  expected welfare, compared against a bound;
* Monte Carlo (`monte_carlo_revenue`): sampled revenue against the analytic
  expectation, reported in standard errors.

Plus a seeded instance generator and a campaign runner that fuzzes all of
the above over many generated instances and collects violations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

from . import caii, mcaii, welfare
from .model import (
    Bidder,
    GroupedProfile,
    OutcomeDistribution,
    Profile,
    SampledOutcome,
    TypeProfile,
    as_rational,
)
from .scenario import profile_to_json


# --- mechanism adapters ----------------------------------------------------
#
# Checks are written against a duck type: allocate(profile) ->
# OutcomeDistribution, expected_revenue(profile) -> Fraction,
# sample(profile, rng) -> SampledOutcome, critical_bids(profile) ->
# {winner id: Fraction}.


class CaiiMechanism:
    name = "caii"
    grouped = False

    def allocate(self, profile: TypeProfile) -> OutcomeDistribution:
        return caii.allocate(profile)

    def expected_revenue(self, profile: TypeProfile) -> Fraction:
        return caii.expected_revenue(profile)

    def sample(self, profile: TypeProfile, rng: random.Random) -> SampledOutcome:
        return caii.sample(profile, rng)

    def critical_bids(self, profile: TypeProfile) -> dict[str, Fraction]:
        return caii.critical_bids(profile)


class McaiiMechanism:
    name = "mcaii"
    grouped = True

    def allocate(self, profile: GroupedProfile) -> OutcomeDistribution:
        return mcaii.allocate(profile)[1]

    def expected_revenue(self, profile: GroupedProfile) -> Fraction:
        return mcaii.expected_revenue(profile)

    def sample(self, profile: GroupedProfile, rng: random.Random) -> SampledOutcome:
        return mcaii.sample(profile, rng)

    def critical_bids(self, profile: GroupedProfile) -> dict[str, Fraction]:
        return mcaii.critical_bids(profile)


class VcgMechanism:
    """The pivot auction folded into the same duck type, so the harness can
    demonstrate that maximizing welfare is not revenue monotone."""

    name = "vcg"
    grouped = False

    def allocate(self, profile: TypeProfile) -> OutcomeDistribution:
        return welfare.vcg_distribution(profile)

    def expected_revenue(self, profile: TypeProfile) -> Fraction:
        return welfare.vcg(profile).revenue

    def sample(self, profile: TypeProfile, rng: random.Random) -> SampledOutcome:
        res = welfare.vcg(profile)
        items = sum(b.demand for b in profile.bidders if b.id in res.winners)
        return SampledOutcome(res.winners, dict(res.payments), items, "vcg")

    def critical_bids(self, profile: TypeProfile) -> dict[str, Fraction]:
        return dict(welfare.vcg(profile).payments)


CAII = CaiiMechanism()
MCAII = McaiiMechanism()
VCG = VcgMechanism()


class FirstPriceVariant:
    """Deliberately broken payment rule (winners pay their own bid) over an
    existing mechanism's allocation; exists to prove the IC checker bites."""

    grouped = False

    def __init__(self, base) -> None:
        self._base = base
        self.name = f"{base.name}-first-price"
        self.grouped = base.grouped

    def allocate(self, profile: Profile) -> OutcomeDistribution:
        dist = self._base.allocate(profile)
        bidders = profile.all_bidders() if isinstance(profile, GroupedProfile) else profile.bidders
        pay = {b.id: dist.win_prob[b.id] * b.valuation for b in bidders}
        revenue = sum(pay.values(), Fraction(0))
        return OutcomeDistribution(
            dist.win_prob, pay, revenue, dist.expected_welfare, dist.expected_items_sold
        )

    def expected_revenue(self, profile: Profile) -> Fraction:
        return self.allocate(profile).expected_revenue

    def sample(self, profile: Profile, rng: random.Random) -> SampledOutcome:
        return self._base.sample(profile, rng)

    def critical_bids(self, profile: Profile) -> dict[str, Fraction]:
        return self._base.critical_bids(profile)


class OverchargeVariant:
    """Scales every expected payment by (1 + epsilon); any positive epsilon
    must trip the payment-identity check on charged instances."""

    def __init__(self, base, epsilon: Union[int, str, Fraction]) -> None:
        eps = as_rational(epsilon)
        if eps <= 0:
            raise ValueError("epsilon must be strictly positive")
        self._base = base
        self._factor = 1 + eps
        self.name = f"{base.name}-overcharge"
        self.grouped = base.grouped

    def allocate(self, profile: Profile) -> OutcomeDistribution:
        dist = self._base.allocate(profile)
        pay = {bid: p * self._factor for bid, p in dist.expected_payment.items()}
        revenue = sum(pay.values(), Fraction(0))
        return OutcomeDistribution(
            dist.win_prob, pay, revenue, dist.expected_welfare, dist.expected_items_sold
        )

    def expected_revenue(self, profile: Profile) -> Fraction:
        return self.allocate(profile).expected_revenue

    def sample(self, profile: Profile, rng: random.Random) -> SampledOutcome:
        return self._base.sample(profile, rng)

    def critical_bids(self, profile: Profile) -> dict[str, Fraction]:
        return self._base.critical_bids(profile)


def mechanism_by_name(name: str):
    try:
        return {"caii": CAII, "mcaii": MCAII, "vcg": VCG}[name]
    except KeyError:
        raise ValueError(f"unknown mechanism {name!r}") from None


# --- exact logarithm bound -------------------------------------------------


def _ln_ratio_upper(y: Fraction, tol: Fraction) -> Fraction:
    # 2*atanh(y) = ln((1+y)/(1-y)) for 0 <= y < 1, summed until the
    # geometric tail bound drops below tol, then the tail bound is added so
    # the result is an upper bound.
    total = Fraction(0)
    power = y
    ysq = y * y
    n = 0
    while True:
        total += power / (2 * n + 1)
        tail = power * ysq / ((2 * n + 3) * (1 - ysq))
        if 2 * tail < tol:
            return 2 * total + 2 * tail
        power *= ysq
        n += 1


def ln_upper(k: int, tol: Union[int, str, Fraction] = Fraction(1, 10**9)) -> Fraction:
    """A rational upper bound on ln(k), within `tol` of the true value.

    Used wherever a welfare-ratio bound involves ln k: the bound constant is
    then genuinely at least the ideal one, so any reported violation is a
    real violation.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    tolerance = as_rational(tol)
    if tolerance <= 0:
        raise ValueError("tol must be positive")
    if k == 1:
        return Fraction(0)
    # k = t * 2^m with t in [1, 2); both series converge fast (y <= 1/3)
    m = k.bit_length() - 1
    t = Fraction(k, 2**m)
    budget_each = tolerance / (2 * m) if m else tolerance
    total = m * _ln_ratio_upper(Fraction(1, 3), budget_each) if m else Fraction(0)
    if t > 1:
        total += _ln_ratio_upper((t - 1) / (t + 1), tolerance / 2)
    return total


# --- incentive compatibility ----------------------------------------------

PROBE_EPSILON = Fraction(1, 1000)


@dataclass(frozen=True)
class BidderIcReport:
    bidder_id: str
    critical_bid: Union[Fraction, None]
    monotone: bool
    single_step: bool
    payment_identity_holds: bool
    probed_points: tuple[tuple[Fraction, Fraction], ...]

    @property
    def ok(self) -> bool:
        return self.monotone and self.single_step and self.payment_identity_holds


@dataclass(frozen=True)
class IcReport:
    per_bidder: Mapping[str, BidderIcReport]
    overall_truthful: bool


def _real_bidders(profile: Profile) -> tuple[Bidder, ...]:
    if isinstance(profile, GroupedProfile):
        return profile.all_bidders()
    return profile.bidders


def _win_prob_at(mech, profile: Profile, bidder_id: str, bid: Fraction) -> Fraction:
    moved = profile.with_valuation(bidder_id, bid)
    return mech.allocate(moved).win_prob.get(bidder_id, Fraction(0))


def check_ic(mech, profile: Profile, probes_per_bidder: int = 4, seed: int = 0) -> IcReport:
    """Probe every real bidder's allocation curve.

    For a reported winner with critical bid c the curve must be 0 strictly
    below c, jump once to the bidder's true win probability, and the
    reported expected payment must equal that probability times c.  (The
    point exactly at c may sit on either side: ties there resolve by
    tie-break index.)  For a loser the curve must be flat zero up to her
    true valuation and her payment must be zero.  Probes include 0, the
    bracket c*(1 +/- 1/1000) (absolute 1/1000 when c = 0), 2c + 1, the true
    valuation, and `probes_per_bidder` seeded random rationals.
    """
    if probes_per_bidder < 4:
        raise ValueError("need at least 4 random probes per bidder")
    base = mech.allocate(profile)
    again = mech.allocate(profile)
    if again != base:
        raise RuntimeError("mechanism returned two different distributions for one profile")
    crits = mech.critical_bids(profile)
    rng = random.Random(seed)
    zero = Fraction(0)

    reports: dict[str, BidderIcReport] = {}
    for b in _real_bidders(profile):
        c = crits.get(b.id)
        base_w = base.win_prob.get(b.id, zero)
        base_p = base.expected_payment.get(b.id, zero)

        if c is not None:
            eps = c * PROBE_EPSILON if c > 0 else PROBE_EPSILON
            points = {zero, c, c + eps, 2 * c + 1, b.valuation}
            if c > 0:
                points.add(c - eps)
            span = 2 * c + 1
        else:
            points = {zero, b.valuation / 2, b.valuation, b.valuation + 1, 2 * b.valuation + 1}
            span = 2 * b.valuation + 1
        for _ in range(probes_per_bidder):
            points.add(span * Fraction(rng.randint(0, 10**6), 10**6))

        curve = tuple(sorted((t, _win_prob_at(mech, profile, b.id, t)) for t in points))
        monotone = all(w1 <= w2 for (_, w1), (_, w2) in zip(curve, curve[1:]))

        if c is not None:
            single_step = base_w > 0 and all(
                (w == zero if t < c else w == base_w if t > c else w in (zero, base_w))
                for t, w in curve
            )
            payment_ok = base_p == base_w * c
        else:
            single_step = all(w == zero for t, w in curve if t <= b.valuation)
            payment_ok = base_p == zero and base_w == zero

        reports[b.id] = BidderIcReport(
            b.id, c, monotone, single_step, payment_ok, curve
        )

    return IcReport(reports, all(r.ok for r in reports.values()))


# --- revenue monotonicity --------------------------------------------------


@dataclass(frozen=True)
class AddBidder:
    bidder: Bidder
    group: Union[str, None] = None


@dataclass(frozen=True)
class RaiseBid:
    bidder_id: str
    delta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", as_rational(self.delta))
        if self.delta <= 0:
            raise ValueError("a bid raise must be strictly positive")


@dataclass(frozen=True)
class AddGroup:
    group_id: str
    members: tuple[Bidder, ...]


Augmentation = Union[AddBidder, RaiseBid, AddGroup]


def apply_augmentation(profile: Profile, augmentation: Augmentation) -> Profile:
    if isinstance(augmentation, AddBidder):
        if isinstance(profile, GroupedProfile):
            if augmentation.group is None:
                raise ValueError("adding a bidder to a grouped profile needs a group id")
            return profile.with_bidder(augmentation.group, augmentation.bidder)
        return profile.with_bidder(augmentation.bidder)
    if isinstance(augmentation, RaiseBid):
        if isinstance(profile, GroupedProfile):
            old = profile.flatten().bidder(augmentation.bidder_id)
        else:
            old = profile.bidder(augmentation.bidder_id)
        return profile.with_valuation(augmentation.bidder_id, old.valuation + augmentation.delta)
    if isinstance(augmentation, AddGroup):
        if not isinstance(profile, GroupedProfile):
            raise ValueError("only grouped profiles can gain a group")
        return profile.with_group(augmentation.group_id, augmentation.members)
    raise TypeError(f"unknown augmentation {augmentation!r}")


def describe_augmentation(augmentation: Augmentation) -> str:
    if isinstance(augmentation, AddBidder):
        b = augmentation.bidder
        suffix = f" to group {augmentation.group}" if augmentation.group else ""
        return f"add bidder {b.id} (demand {b.demand}, valuation {b.valuation}){suffix}"
    if isinstance(augmentation, RaiseBid):
        return f"raise bid of {augmentation.bidder_id} by {augmentation.delta}"
    if isinstance(augmentation, AddGroup):
        return f"add group {augmentation.group_id} with {len(augmentation.members)} bidders"
    raise TypeError(f"unknown augmentation {augmentation!r}")


@dataclass(frozen=True)
class RmReport:
    augmentation: str
    revenue_before: Fraction
    revenue_after: Fraction
    violated: bool


def check_rm(mech, profile: Profile, augmentation: Augmentation) -> RmReport:
    """Exact comparison of expected revenue before and after an augmentation.
    Any strict drop is a violation; no tolerance."""
    before = mech.expected_revenue(profile)
    after = mech.expected_revenue(apply_augmentation(profile, augmentation))
    return RmReport(describe_augmentation(augmentation), before, after, after < before)


# --- welfare ratio -----------------------------------------------------------


@dataclass(frozen=True)
class PormReport:
    mechanism_welfare: Fraction
    best_welfare: Fraction
    ratio: Union[Fraction, None]   # None when the mechanism welfare is 0
    infinite: bool
    bound: Fraction
    within_bound: bool


def porm_ratio(mech, profile: Profile, bound: Union[int, str, Fraction]) -> PormReport:
    """Optimal welfare over mechanism expected welfare, checked against a
    bound.  A zero-welfare instance with a positive optimum is flagged as an
    infinite ratio (never triggered by the mechanisms here)."""
    limit = as_rational(bound)
    dist = mech.allocate(profile)
    if isinstance(profile, GroupedProfile):
        best = welfare.group_max_welfare(profile)
    else:
        best = welfare.max_welfare(profile).value
    if dist.expected_welfare == 0:
        infinite = best > 0
        return PormReport(dist.expected_welfare, best, None, infinite, limit, not infinite)
    ratio = best / dist.expected_welfare
    return PormReport(dist.expected_welfare, best, ratio, False, limit, ratio <= limit)


# --- Monte Carlo -------------------------------------------------------------

LOTTERY_BRANCHES = ("low", mcaii.CASE_LOW_FULL)


@dataclass(frozen=True)
class MonteCarloReport:
    trials: int
    mean_revenue: Fraction
    stderr_revenue: float
    analytic_revenue: Fraction
    gap_in_stderrs: float
    lottery_trials: int
    lottery_items_mean: Union[Fraction, None]
    lottery_items_stderr: Union[float, None]
    max_items_sold: int
    oversold: bool


def _gap(mean: Fraction, target: Fraction, stderr: float) -> float:
    if stderr > 0:
        return abs(float(mean - target)) / stderr
    return 0.0 if mean == target else math.inf


def monte_carlo_revenue(
    mech, profile: Profile, trials: int, rng: random.Random
) -> MonteCarloReport:
    """Sample the mechanism `trials` times and compare realized revenue with
    the analytic expectation.  Requires at least 1000 trials so the standard
    error means something.  Item counts are tracked for the lottery branch
    separately, since the other branches sell a deterministic bundle."""
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    analytic = mech.expected_revenue(profile)
    zero = Fraction(0)
    total = zero
    total_sq = zero
    lot_n = 0
    lot_items = 0
    lot_items_sq = 0
    max_items = 0

    for _ in range(trials):
        out = mech.sample(profile, rng)
        rev = sum(out.charge.values(), zero)
        total += rev
        total_sq += rev * rev
        if out.items_sold > max_items:
            max_items = out.items_sold
        if out.branch in LOTTERY_BRANCHES:
            lot_n += 1
            lot_items += out.items_sold
            lot_items_sq += out.items_sold * out.items_sold

    mean = total / trials
    var = float(total_sq / trials - mean * mean)
    stderr = math.sqrt(max(var, 0.0) / trials)

    if lot_n:
        items_mean = Fraction(lot_items, lot_n)
        items_var = float(Fraction(lot_items_sq, lot_n) - items_mean * items_mean)
        items_stderr = math.sqrt(max(items_var, 0.0) / lot_n)
    else:
        items_mean = None
        items_stderr = None

    k = profile.k
    return MonteCarloReport(
        trials=trials,
        mean_revenue=mean,
        stderr_revenue=stderr,
        analytic_revenue=analytic,
        gap_in_stderrs=_gap(mean, analytic, stderr),
        lottery_trials=lot_n,
        lottery_items_mean=items_mean,
        lottery_items_stderr=items_stderr,
        max_items_sold=max_items,
        oversold=max_items > k,
    )


# --- instance generation -----------------------------------------------------


def _random_value(rng: random.Random, value_max: int) -> Fraction:
    if rng.random() < 0.08:
        return Fraction(0)
    den = rng.choice((1, 1, 1, 2, 3, 4))
    return Fraction(rng.randint(0, value_max * den), den)


def _random_demand(rng: random.Random, k: int) -> int:
    low_max = k // 2
    if low_max >= 1 and rng.random() < 0.75:
        return rng.randint(1, low_max)
    return rng.randint(low_max + 1, k)


def _random_bidders(
    rng: random.Random, n: int, k: int, value_max: int, first_id: int, tie_cluster: bool
) -> list[Bidder]:
    bidders = [
        Bidder(f"b{first_id + i}", _random_demand(rng, k), _random_value(rng, value_max))
        for i in range(n)
    ]
    if tie_cluster and n >= 2 and k >= 2:
        # overwrite a few bidders with small demands sharing one per-item price
        target = Fraction(rng.randint(1, value_max), rng.choice((1, 2, 3)))
        count = min(n, rng.randint(2, 4))
        for i in rng.sample(range(n), count):
            d = rng.randint(1, k // 2)
            bidders[i] = Bidder(bidders[i].id, d, target * d)
    return bidders


def gen_instances(
    *,
    count: int,
    seed: int,
    n_max: int = 20,
    k_max: int = 64,
    value_max: int = 100,
    grouped: bool = False,
) -> Iterator[Profile]:
    """Seeded stream of auction instances for fuzzing.

    The mix is deliberate: at least 40% of instances contain per-item price
    ties by construction, some valuations are zero, every tenth instance has
    a single bidder, and the occasional instance is entirely worthless.
    Grouped mode emits 1..5 groups and allows groups with no bidders at all.
    The same seed always yields the identical stream.
    """
    if count < 1 or n_max < 1 or k_max < 1 or value_max < 1:
        raise ValueError("count, n_max, k_max and value_max must all be positive")
    rng = random.Random(seed)
    for idx in range(count):
        tie_cluster = idx % 5 < 2
        if rng.random() < 0.3:
            k = rng.randint(1, min(4, k_max))
        else:
            k = rng.randint(1, k_max)
        if tie_cluster:
            k = max(k, min(2, k_max))
        n = 1 if idx % 10 == 9 else rng.randint(1, n_max)

        if not grouped:
            bidders = _random_bidders(rng, n, k, value_max, 1, tie_cluster)
            if idx % 40 == 13:
                bidders = [Bidder(b.id, b.demand, Fraction(0)) for b in bidders]
            yield TypeProfile(k, tuple(bidders))
            continue

        group_count = rng.randint(1, 5)
        groups = []
        next_id = 1
        for gi in range(group_count):
            size = rng.randint(0, max(1, n // group_count + 1))
            members = _random_bidders(
                rng, size, k, value_max, next_id, tie_cluster and gi == 0
            )
            next_id += size
            groups.append((f"g{gi + 1}", tuple(members)))
        yield GroupedProfile(k, tuple(groups))


def random_augmentations(
    profile: Profile, rng: random.Random, count: int, value_max: int = 100
) -> list[Augmentation]:
    """A sample of valid augmentations for the given profile."""
    out: list[Augmentation] = []
    real = _real_bidders(profile)
    taken = {b.id for b in real}
    for i in range(count):
        kinds = ["add"]
        if real:
            kinds.append("raise")
        if isinstance(profile, GroupedProfile):
            kinds.append("add_group")
        kind = rng.choice(kinds)
        fresh_id = f"x{i + 1}"
        while fresh_id in taken:
            fresh_id += "x"
        taken.add(fresh_id)
        if kind == "add":
            b = Bidder(fresh_id, _random_demand(rng, profile.k), _random_value(rng, value_max))
            group = (
                rng.choice(profile.group_ids()) if isinstance(profile, GroupedProfile) else None
            )
            out.append(AddBidder(b, group))
        elif kind == "raise":
            target = rng.choice(real)
            delta = Fraction(rng.randint(1, value_max * 4), rng.choice((1, 2, 3, 4)))
            out.append(RaiseBid(target.id, delta))
        else:
            size = rng.randint(0, 3)
            members = tuple(
                Bidder(f"{fresh_id}m{j}", _random_demand(rng, profile.k), _random_value(rng, value_max))
                for j in range(size)
            )
            gid = f"ng{i + 1}"
            while gid in set(profile.group_ids()):
                gid += "g"
            out.append(AddGroup(gid, members))
    return out


# --- campaign ----------------------------------------------------------------


@dataclass
class CampaignReport:
    mechanism: str
    instances: int
    seed: int
    checks_run: int = 0
    violations: list[dict] = field(default_factory=list)
    ratios: list[float] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _violation(kind: str, profile: Profile, detail: dict) -> dict:
    return {"kind": kind, "instance": profile_to_json(profile), **detail}


def _check_bounds(report: CampaignReport, profile: Profile) -> None:
    """Structural range checks on the analyzed instance."""
    half = caii.items_needed_to_clear(profile.k)
    if isinstance(profile, GroupedProfile):
        decision, dist = mcaii.allocate(profile)
        g = next(a for a in decision.group_analyses if a.group_id == decision.winning_group)
        if not (decision.reserve <= dist.expected_revenue <= g.mprg):
            report.violations.append(
                _violation(
                    "revenue_bounds",
                    profile,
                    {
                        "reserve": str(decision.reserve),
                        "expected_revenue": str(dist.expected_revenue),
                        "mprg": str(g.mprg),
                    },
                )
            )
        if decision.case == mcaii.CASE_LOW_FULL and decision.candidate_demand is not None:
            ok = (
                decision.candidate_demand >= half
                if profile.k >= 2
                else decision.candidate_demand == 0
            )
            if not ok:
                report.violations.append(
                    _violation(
                        "lottery_demand_range",
                        profile,
                        {"candidate_demand": decision.candidate_demand, "k": profile.k},
                    )
                )
        return

    analysis = caii.analyze(profile)
    if profile.k >= 2:
        ok = half <= analysis.candidate_demand < profile.k
    else:
        ok = analysis.candidate_demand == 0
    if not ok:
        report.violations.append(
            _violation(
                "candidate_demand_range",
                profile,
                {"candidate_demand": analysis.candidate_demand, "k": profile.k},
            )
        )


def run_campaign(
    mechanism_name: str,
    *,
    instances: int,
    seed: int,
    n_max: int = 20,
    k_max: int = 64,
    value_max: int = 100,
    probes_per_bidder: int = 4,
    with_ic: bool = True,
) -> CampaignReport:
    """Fuzz one mechanism: per generated instance run the structural bound
    checks, a handful of revenue-monotonicity augmentations, the welfare
    ratio check, and (optionally, it dominates the cost) the IC probe."""
    mech = mechanism_by_name(mechanism_name)
    report = CampaignReport(mechanism_name, instances, seed)
    aug_rng = random.Random(seed + 1)

    stream = gen_instances(
        count=instances,
        seed=seed,
        n_max=n_max,
        k_max=k_max,
        value_max=value_max,
        grouped=mech.grouped,
    )
    for profile in stream:
        _check_bounds(report, profile)
        report.checks_run += 1

        for aug in random_augmentations(profile, aug_rng, 2, value_max):
            rm = check_rm(mech, profile, aug)
            report.checks_run += 1
            if rm.violated:
                report.violations.append(
                    _violation(
                        "revenue_monotonicity",
                        profile,
                        {
                            "augmentation": rm.augmentation,
                            "revenue_before": str(rm.revenue_before),
                            "revenue_after": str(rm.revenue_after),
                        },
                    )
                )

        bound = Fraction(3) if not mech.grouped else 2 + ln_upper(profile.k)
        porm = porm_ratio(mech, profile, bound)
        report.checks_run += 1
        if porm.ratio is not None:
            report.ratios.append(float(porm.ratio))
        if not porm.within_bound:
            report.violations.append(
                _violation(
                    "welfare_ratio",
                    profile,
                    {
                        "ratio": "inf" if porm.infinite else str(porm.ratio),
                        "bound": str(porm.bound),
                    },
                )
            )

        if with_ic:
            ic = check_ic(mech, profile, probes_per_bidder, seed=seed)
            report.checks_run += 1
            if not ic.overall_truthful:
                bad = sorted(bid for bid, r in ic.per_bidder.items() if not r.ok)
                report.violations.append(
                    _violation("incentive_compatibility", profile, {"bidders": bad})
                )

    return report


def vcg_demo_reports() -> tuple[RmReport, "welfare.VcgResult", "welfare.VcgResult", TypeProfile, TypeProfile]:
    """The classic failure of the pivot auction: two bidders yield revenue 2,
    and adding a third competitive bidder drives revenue to 0."""
    before = TypeProfile(
        2,
        (
            Bidder("b1", 1, Fraction(2)),
            Bidder("b2", 2, Fraction(2)),
        ),
    )
    extra = Bidder("b3", 1, Fraction(2))
    rm = check_rm(VCG, before, AddBidder(extra))
    after = before.with_bidder(extra)
    return rm, welfare.vcg(before), welfare.vcg(after), before, after
