"""Command line driver.

Four subcommands: `run` resolves one scenario exactly, `sample` draws
seeded realizations, `verify` fuzzes a mechanism's properties over
generated instances, and `vcg-demo` replays the pivot auction's revenue
drop.  Exit codes: 0 success, 1 a property violation was found, 2 bad
usage or input.  Output is a plain table by default or JSON with
`--format json`; every numeric field carries the exact rational and a
12-significant-digit decimal derived from it.  Randomness comes from
`--seed`, falling back to the RM_AUCTIONS_SEED environment variable, then
to 0; a rerun with the same seed produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from fractions import Fraction
from typing import Sequence, Union

from . import caii, mcaii, verify, welfare
from .caii import items_needed_to_clear
from .model import GroupedProfile, Profile, TypeProfile
from .scenario import (
    ScenarioError,
    decimal_str,
    load_scenario,
    rational_json,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

SEED_ENV = "RM_AUCTIONS_SEED"


class UsageError(ValueError):
    pass


def _fmt(x: Union[Fraction, None]) -> str:
    if x is None:
        return "inf"
    if x.denominator == 1:
        return str(x)
    return f"{x} ({decimal_str(x)})"


def _resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise UsageError("--seed must be nonnegative")
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
        if value < 0:
            raise UsageError(f"{SEED_ENV} must be nonnegative")
        return value
    return 0


def _route(profile: Profile, requested: str) -> tuple[str, Profile]:
    """Pick the mechanism and coerce the profile shape it expects.

    `auto` follows the scenario: grouped bidders go to the grouped
    mechanism.  An explicit choice wins: the ungrouped mechanism flattens
    groups away, and the grouped mechanism wraps a flat scenario into a
    single group.
    """
    if requested == "auto":
        requested = "mcaii" if isinstance(profile, GroupedProfile) else "caii"
    if requested == "caii" and isinstance(profile, GroupedProfile):
        profile = profile.flatten()
    if requested == "mcaii" and isinstance(profile, TypeProfile):
        profile = GroupedProfile(profile.k, (("all", profile.bidders),))
    return requested, profile


# --- run ---------------------------------------------------------------------


def build_run_report(profile: Profile, mechanism: str) -> dict:
    """The full exact report for one scenario under one mechanism."""
    mechanism, profile = _route(profile, mechanism)

    if mechanism == "caii":
        assert isinstance(profile, TypeProfile)
        analysis = caii.analyze(profile)
        dist = caii.allocate(profile)
        closed = caii.expected_revenue(profile)
        if closed != dist.expected_revenue:
            raise AssertionError("revenue closed form disagrees with payment sum")
        best = welfare.max_welfare(profile).value
        bidders = profile.bidders
        top = analysis.classified.high[0]
        decision = {
            "runner_up_pos": analysis.runner_up_pos,
            "runner_up_ppi": rational_json(analysis.runner_up_ppi),
            "candidate_demand": analysis.candidate_demand,
            "low_win_prob": rational_json(analysis.low_win_prob),
            "top_high": None if top.dummy else top.id,
            "second_high_value": rational_json(analysis.second_high_value),
        }
    else:
        assert isinstance(profile, GroupedProfile)
        mdecision, dist = mcaii.allocate(profile)
        closed = mdecision.expected_revenue
        if closed != dist.expected_revenue:
            raise AssertionError("revenue closed form disagrees with payment sum")
        best = welfare.group_max_welfare(profile)
        bidders = profile.all_bidders()
        decision = {
            "winning_group": mdecision.winning_group,
            "reserve": rational_json(mdecision.reserve),
            "case": mdecision.case,
            "jstar": mdecision.jstar,
            "cutoff_pos": mdecision.cutoff_pos,
            "candidate_demand": mdecision.candidate_demand,
            "group_scores": [
                {"group": g.group_id, "score": rational_json(g.mprg)}
                for g in mdecision.group_analyses
            ],
        }

    rows = [
        {
            "id": b.id,
            "demand": b.demand,
            "valuation": rational_json(b.valuation),
            "win_prob": rational_json(dist.win_prob[b.id]),
            "expected_payment": rational_json(dist.expected_payment[b.id]),
        }
        for b in bidders
    ]
    return {
        "mechanism": mechanism,
        "k": profile.k,
        "bidders": rows,
        "expected_revenue": rational_json(dist.expected_revenue),
        "expected_welfare": rational_json(dist.expected_welfare),
        "expected_items_sold": rational_json(dist.expected_items_sold),
        "max_welfare": rational_json(best),
        "decision": decision,
    }


def _table_value(cell: object) -> str:
    if isinstance(cell, dict) and set(cell) == {"rational", "decimal"}:
        if cell["rational"] is None:
            return "inf"
        if "/" not in cell["rational"]:
            return cell["rational"]
        return f"{cell['rational']} ({cell['decimal']})"
    if cell is None:
        return "-"
    return str(cell)


def _render_rows(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return lines


def format_run_table(report: dict) -> str:
    lines = [f"mechanism: {report['mechanism']}", f"k: {report['k']}", ""]
    header = ("id", "demand", "valuation", "win_prob", "expected_payment")
    rows = [
        (
            r["id"],
            str(r["demand"]),
            _table_value(r["valuation"]),
            _table_value(r["win_prob"]),
            _table_value(r["expected_payment"]),
        )
        for r in report["bidders"]
    ]
    lines.extend(_render_rows(header, rows))
    lines.append("")
    for key in ("expected_revenue", "expected_welfare", "expected_items_sold", "max_welfare"):
        lines.append(f"{key}: {_table_value(report[key])}")
    lines.append("decision:")
    for key, value in report["decision"].items():
        if key == "group_scores":
            for entry in value:
                lines.append(f"  score[{entry['group']}]: {_table_value(entry['score'])}")
        else:
            lines.append(f"  {key}: {_table_value(value)}")
    return "\n".join(lines)


def _run_figures(profile: Profile, mechanism: str, report: dict, outdir: str) -> None:
    from . import report as figures

    os.makedirs(outdir, exist_ok=True)
    mechanism, profile = _route(profile, mechanism)
    if mechanism == "caii":
        assert isinstance(profile, TypeProfile)
        analysis = caii.analyze(profile)
        dist = caii.allocate(profile)
        crits = caii.critical_bids(profile)
    else:
        assert isinstance(profile, GroupedProfile)
        decision, dist = mcaii.allocate(profile)
        crits = mcaii.critical_bids(profile)
        figures.save_group_scores(
            [(g.group_id, g.mprg) for g in decision.group_analyses],
            decision.winning_group,
            decision.reserve,
            os.path.join(outdir, "group_scores.png"),
            os.path.join(outdir, "group_scores.csv"),
        )
        # the skyline rendering applies to the winning group's own low side
        analysis = caii.analyze(profile.group_profile(decision.winning_group))

    figures.save_low_side_chart(
        analysis,
        os.path.join(outdir, "low_side.png"),
        os.path.join(outdir, "low_side.csv"),
    )
    curves = {
        bid: (crit, dist.win_prob[bid]) for bid, crit in crits.items() if dist.win_prob[bid] > 0
    }
    ceiling = max(
        (2 * crit + 1 for crit, _ in curves.values()),
        default=Fraction(1),
    )
    figures.save_allocation_curves(
        curves,
        ceiling,
        os.path.join(outdir, "allocation_curves.png"),
        os.path.join(outdir, "allocation_curves.csv"),
    )


def cmd_run(args: argparse.Namespace) -> int:
    profile = load_scenario(args.scenario)
    report = build_run_report(profile, args.mechanism)
    if args.figures:
        _run_figures(profile, args.mechanism, report, args.figures)
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(format_run_table(report))
    return EXIT_OK


# --- sample ------------------------------------------------------------------


def cmd_sample(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    seed = _resolve_seed(args)
    profile = load_scenario(args.scenario)
    mechanism, profile = _route(profile, args.mechanism)
    mech = verify.mechanism_by_name(mechanism)
    rng = random.Random(seed)

    analytic = mech.expected_revenue(profile)
    zero = Fraction(0)
    total = zero
    total_sq = zero
    lottery_trials = 0
    lottery_items = 0
    max_items = 0
    shown: list[dict] = []
    running: list[float] = []
    stride = max(1, args.trials // 2000)

    for t in range(args.trials):
        out = mech.sample(profile, rng)
        rev = sum(out.charge.values(), zero)
        total += rev
        total_sq += rev * rev
        max_items = max(max_items, out.items_sold)
        if out.branch in verify.LOTTERY_BRANCHES:
            lottery_trials += 1
            lottery_items += out.items_sold
        if t < 20:
            shown.append(
                {
                    "trial": t + 1,
                    "branch": out.branch,
                    "winners": sorted(out.winners),
                    "charges": {bid: str(out.charge[bid]) for bid in sorted(out.charge)},
                    "revenue": str(rev),
                    "items_sold": out.items_sold,
                }
            )
        if (t + 1) % stride == 0 or t + 1 == args.trials:
            running.append(float(total) / (t + 1))

    mean = total / args.trials
    var = float(total_sq / args.trials - mean * mean)
    stderr = math.sqrt(max(var, 0.0) / args.trials)
    items_target = items_needed_to_clear(profile.k)
    summary = {
        "trials": args.trials,
        "seed": seed,
        "empirical_mean_revenue": rational_json(mean),
        "stderr_revenue": stderr,
        "analytic_revenue": rational_json(analytic),
        "lottery_trials": lottery_trials,
        "lottery_items_mean": (
            rational_json(Fraction(lottery_items, lottery_trials)) if lottery_trials else None
        ),
        "lottery_items_target": items_target,
        "max_items_sold": max_items,
        "k": profile.k,
        "oversold": max_items > profile.k,
    }

    if args.figures:
        from . import report as figures

        os.makedirs(args.figures, exist_ok=True)
        figures.save_revenue_convergence(
            running,
            analytic,
            os.path.join(args.figures, "convergence.png"),
            os.path.join(args.figures, "convergence.csv"),
        )

    if args.format == "json":
        print(
            json.dumps(
                {"mechanism": mechanism, "k": profile.k, "outcomes": shown, "summary": summary},
                indent=2,
            )
        )
    else:
        lines = [f"mechanism: {mechanism}", f"k: {profile.k}", f"seed: {seed}", ""]
        if shown:
            header = ("trial", "branch", "winners", "revenue", "items")
            rows = [
                (
                    str(o["trial"]),
                    o["branch"],
                    ",".join(o["winners"]) or "-",
                    o["revenue"],
                    str(o["items_sold"]),
                )
                for o in shown
            ]
            lines.extend(_render_rows(header, rows))
            if args.trials > len(shown):
                lines.append(f"... ({args.trials - len(shown)} more trials not shown)")
            lines.append("")
        lines.append(f"trials: {summary['trials']}")
        lines.append(f"empirical_mean_revenue: {_table_value(summary['empirical_mean_revenue'])}")
        lines.append(f"stderr_revenue: {stderr!r}")
        lines.append(f"analytic_revenue: {_table_value(summary['analytic_revenue'])}")
        lines.append(f"lottery_trials: {lottery_trials}")
        if summary["lottery_items_mean"] is not None:
            lines.append(
                "lottery_items_mean: "
                f"{_table_value(summary['lottery_items_mean'])} (target {items_target})"
            )
        lines.append(f"max_items_sold: {max_items} (supply {profile.k})")
        lines.append(f"oversold: {summary['oversold']}")
        print("\n".join(lines))
    return EXIT_OK


# --- verify ------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)

    if args.mechanism == "vcg-demo":
        rm, before, after, profile_before, profile_after = verify.vcg_demo_reports()
        payload = {
            "mechanism": "vcg",
            "seed": seed,
            "instances": 1,
            "violations": [
                {
                    "kind": "revenue_monotonicity",
                    "instance": verify.profile_to_json(profile_before),
                    "augmentation": rm.augmentation,
                    "revenue_before": str(rm.revenue_before),
                    "revenue_after": str(rm.revenue_after),
                }
            ],
        }
        if args.format == "json":
            print(json.dumps(payload, indent=2))
        else:
            print("mechanism: vcg (demonstration)")
            print(f"revenue before: {_fmt(rm.revenue_before)}")
            print(f"augmentation: {rm.augmentation}")
            print(f"revenue after: {_fmt(rm.revenue_after)}")
            print("violations: 1 (adding a bidder lowered the revenue)")
        return EXIT_VIOLATION

    report = verify.run_campaign(
        args.mechanism,
        instances=args.instances,
        seed=seed,
        n_max=args.n_max,
        k_max=args.k_max,
        probes_per_bidder=args.probes,
        with_ic=not args.no_ic,
    )

    if args.figures:
        from . import report as figures

        os.makedirs(args.figures, exist_ok=True)
        bound = 3.0 if args.mechanism == "caii" else 2.0 + math.log(args.k_max)
        figures.save_ratio_histogram(
            report.ratios,
            bound,
            os.path.join(args.figures, "welfare_ratios.png"),
            os.path.join(args.figures, "welfare_ratios.csv"),
        )

    payload = {
        "mechanism": report.mechanism,
        "instances": report.instances,
        "seed": report.seed,
        "checks_run": report.checks_run,
        "violations": report.violations,
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"mechanism: {report.mechanism}")
        print(f"instances: {report.instances}")
        print(f"seed: {report.seed}")
        print(f"checks_run: {report.checks_run}")
        print(f"violations: {len(report.violations)}")
        for v in report.violations[:10]:
            print(f"  - {v['kind']}: {json.dumps(v)}")
        if len(report.violations) > 10:
            print(f"  ... and {len(report.violations) - 10} more")
    return EXIT_OK if report.ok else EXIT_VIOLATION


# --- vcg-demo ----------------------------------------------------------------


def cmd_vcg_demo(args: argparse.Namespace) -> int:
    rm, before, after, profile_before, profile_after = verify.vcg_demo_reports()

    def stage(result: welfare.VcgResult) -> dict:
        return {
            "winners": sorted(result.winners),
            "payments": {bid: str(result.payments[bid]) for bid in sorted(result.payments)},
            "revenue": rational_json(result.revenue),
            "welfare": rational_json(result.welfare),
        }

    if args.format == "json":
        print(
            json.dumps(
                {
                    "mechanism": "vcg",
                    "k": profile_before.k,
                    "before": {
                        "instance": verify.profile_to_json(profile_before),
                        **stage(before),
                    },
                    "after": {
                        "instance": verify.profile_to_json(profile_after),
                        **stage(after),
                    },
                    "augmentation": rm.augmentation,
                    "revenue_dropped": rm.violated,
                },
                indent=2,
            )
        )
    else:
        print("pivot auction, k = 2")
        print("before: bidders b1 (demand 1, valuation 2), b2 (demand 2, valuation 2)")
        print(f"  winners: {', '.join(sorted(before.winners))}")
        print(f"  revenue: {_fmt(before.revenue)}")
        print(f"augmentation: {rm.augmentation}")
        print(f"after:  winners: {', '.join(sorted(after.winners))}")
        print(f"  revenue: {_fmt(after.revenue)}")
        print(f"revenue dropped: {rm.violated}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rm-auctions",
        description="Randomized revenue-monotone auctions for identical items.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, scenario: bool = True) -> None:
        if scenario:
            p.add_argument("scenario", help="path to a scenario JSON file")
        p.add_argument(
            "--format", choices=("json", "table"), default="table", help="output format"
        )
        p.add_argument(
            "--figures",
            metavar="DIR",
            default=None,
            help="also render figures (PNG + CSV) into this directory",
        )

    p_run = sub.add_parser("run", help="resolve one scenario exactly")
    common(p_run)
    p_run.add_argument(
        "--mechanism",
        choices=("auto", "caii", "mcaii"),
        default="auto",
        help="auto picks by scenario shape (grouped bidders -> mcaii)",
    )
    p_run.set_defaults(func=cmd_run)

    p_sample = sub.add_parser("sample", help="draw seeded realizations")
    common(p_sample)
    p_sample.add_argument(
        "--mechanism", choices=("auto", "caii", "mcaii"), default="auto"
    )
    p_sample.add_argument("--trials", type=int, default=1, help="number of realizations")
    p_sample.add_argument(
        "--seed", type=int, default=None, help=f"RNG seed (fallback: ${SEED_ENV}, then 0)"
    )
    p_sample.set_defaults(func=cmd_sample)

    p_verify = sub.add_parser("verify", help="fuzz mechanism properties")
    common(p_verify, scenario=False)
    p_verify.add_argument(
        "--mechanism",
        choices=("caii", "mcaii", "vcg-demo"),
        default="caii",
        help="vcg-demo replays the pivot auction counterexample (exits 1)",
    )
    p_verify.add_argument("--instances", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--k-max", type=int, default=64, dest="k_max")
    p_verify.add_argument("--n-max", type=int, default=20, dest="n_max")
    p_verify.add_argument("--probes", type=int, default=4, help="random probes per bidder")
    p_verify.add_argument(
        "--no-ic", action="store_true", help="skip the (expensive) incentive probing"
    )
    p_verify.set_defaults(func=cmd_verify)

    p_demo = sub.add_parser("vcg-demo", help="replay the pivot auction revenue drop")
    common(p_demo, scenario=False)
    p_demo.set_defaults(func=cmd_vcg_demo)

    return parser


def main(argv: Union[Sequence[str], None] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: scenario: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
