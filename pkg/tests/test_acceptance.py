"""The twelve acceptance criteria, one test each, with their time limits.

Criteria 1–11 run once in process (module fixture); criterion 12 runs the command-line
selftest in a fresh interpreter and compares its report byte for byte with the
in-process one.  Each test records one PASS/FAIL line for the terminal summary.
"""

import subprocess
import sys

import pytest

from conftest import ACCEPTANCE_LINES
from hsk.selftest import TIME_LIMITS, build_report, determinism_check, report_bytes, run_checks


@pytest.fixture(scope="module")
def results():
    checks, times = run_checks()
    return {c.number: c for c in checks}, times, report_bytes(build_report(checks))


def _record(check, elapsed=None, limit=None):
    suffix = f"  ({elapsed:.1f} s, limit {limit} s)" if elapsed is not None else ""
    line = check.line() + suffix
    ACCEPTANCE_LINES.append((check.number, line))
    print(line)


@pytest.mark.parametrize("n", range(1, 12))
def test_criterion(results, n):
    checks, times, _ = results
    c = checks[n]
    in_time = times[n] <= TIME_LIMITS[n]
    if not in_time:
        c = type(c)(c.number, c.name + " [over time limit]", False, c.details)
    _record(c, times[n], TIME_LIMITS[n])
    assert times[n] <= TIME_LIMITS[n], f"criterion {n} took {times[n]:.1f} s > {TIME_LIMITS[n]} s"
    assert c.passed, f"criterion {n} failed: {c.details}"


def test_criterion_12_determinism(results, tmp_path):
    _, _, first = results
    proc = subprocess.run(
        [sys.executable, "-m", "hsk", "selftest", "--out", str(tmp_path)],
        capture_output=True, text=True, timeout=1200,
    )
    assert proc.returncode in (0, 1), proc.stderr
    second = (tmp_path / "selftest.json").read_bytes()
    c = determinism_check(first + b"\n", second)
    _record(c)
    assert c.passed, "selftest reports from two processes differ"
