"""Shared fixtures: golden instances, a CLI runner, and the acceptance
criteria summary printed at the end of a run."""

from __future__ import annotations

import os
import re
import subprocess
import sys
from fractions import Fraction

import pytest

from rm_auctions.model import Bidder, GroupedProfile, TypeProfile

# One line per acceptance criterion is printed in the terminal summary.
# Tests named test_criterion_NN_* report PASS/FAIL automatically; the
# detail message comes from the `record_criterion` fixture.
_CRITERIA_DETAIL: dict[int, str] = {}
_CRITERIA_OUTCOME: dict[int, bool] = {}

_CRITERION_NAME = re.compile(r"test_criterion_(\d+)")


@pytest.fixture
def record_criterion():
    def _record(number: int, message: str) -> None:
        _CRITERIA_DETAIL[number] = message

    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call":
        return
    m = _CRITERION_NAME.match(item.name)
    if m:
        _CRITERIA_OUTCOME[int(m.group(1))] = rep.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA_OUTCOME:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA_OUTCOME):
        passed = _CRITERIA_OUTCOME[number]
        verdict = "PASS" if passed else "FAIL"
        detail = _CRITERIA_DETAIL.get(number, "")
        suffix = f" - {detail}" if detail else ""
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}{suffix}")


# --- golden instances --------------------------------------------------------


@pytest.fixture
def golden() -> TypeProfile:
    """k=4, four small-demand and two large-demand bidders.

    Hand-derived facts used across the suite: the low side sorts to
    b1, b2, b3, b4 with per-item prices 5, 4, 3, 1; the runner-up is
    position 3 (price 3, candidate demand 3); the top large bidder is b5
    with second valuation 6; expected revenue is exactly 6.
    """
    return TypeProfile(
        4,
        (
            Bidder("b1", 2, Fraction(10)),
            Bidder("b2", 1, Fraction(4)),
            Bidder("b3", 2, Fraction(6)),
            Bidder("b4", 1, Fraction(1)),
            Bidder("b5", 3, Fraction(9)),
            Bidder("b6", 4, Fraction(6)),
        ),
    )


@pytest.fixture
def golden_grouped(golden: TypeProfile) -> GroupedProfile:
    """The golden instance as group g1 plus a one-bidder rival group.

    Hand-derived: g1 scores 10, g2 scores 7, so g1 wins with reserve 7;
    the sale is the full-bundle lottery with a single admitted position
    (b1, demand 2) kept with probability 1 at unit price 9/2; expected
    revenue is exactly 9.
    """
    return GroupedProfile(
        golden.k,
        (
            ("g1", golden.bidders),
            ("g2", (Bidder("c1", 4, Fraction(7)),)),
        ),
    )


GOLDEN_SCENARIO = """\
{
  "k": 4,
  "bidders": [
    {"id": "b1", "demand": 2, "valuation": "10"},
    {"id": "b2", "demand": 1, "valuation": "4"},
    {"id": "b3", "demand": 2, "valuation": "6"},
    {"id": "b4", "demand": 1, "valuation": "1"},
    {"id": "b5", "demand": 3, "valuation": "9"},
    {"id": "b6", "demand": 4, "valuation": "6"}
  ]
}
"""

GROUPED_SCENARIO = """\
{
  "k": 4,
  "bidders": [
    {"id": "b1", "demand": 2, "valuation": "10", "group": "g1"},
    {"id": "b2", "demand": 1, "valuation": "4", "group": "g1"},
    {"id": "b3", "demand": 2, "valuation": "6", "group": "g1"},
    {"id": "b4", "demand": 1, "valuation": "1", "group": "g1"},
    {"id": "b5", "demand": 3, "valuation": "9", "group": "g1"},
    {"id": "b6", "demand": 4, "valuation": "6", "group": "g1"},
    {"id": "c1", "demand": 4, "valuation": "7", "group": "g2"}
  ]
}
"""


@pytest.fixture
def golden_scenario(tmp_path) -> str:
    path = tmp_path / "golden.json"
    path.write_text(GOLDEN_SCENARIO, encoding="utf-8")
    return str(path)


@pytest.fixture
def grouped_scenario(tmp_path) -> str:
    path = tmp_path / "grouped.json"
    path.write_text(GROUPED_SCENARIO, encoding="utf-8")
    return str(path)


@pytest.fixture
def write_scenario(tmp_path):
    """Write arbitrary scenario text to a temp file and return its path."""
    counter = [0]

    def _write(text: str) -> str:
        counter[0] += 1
        path = tmp_path / f"scenario{counter[0]}.json"
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


# --- CLI runner ---------------------------------------------------------------


@pytest.fixture
def cli():
    """Run the installed CLI in a subprocess with a clean seed environment."""

    def _run(*argv: str, env_seed: str | None = None) -> subprocess.CompletedProcess:
        env = dict(os.environ)
        env.pop("RM_AUCTIONS_SEED", None)
        if env_seed is not None:
            env["RM_AUCTIONS_SEED"] = env_seed
        return subprocess.run(
            [sys.executable, "-m", "rm_auctions", *argv],
            capture_output=True,
            text=True,
            env=env,
            timeout=300,
        )

    return _run
