"""Acceptance criteria 1 to 7.

The self-test is run twice through the command line with seed 0.  Each
criterion line of the first report is checked for PASS and for the counts
and zero-failure metrics it promises; criterion 7 compares the two reports
byte for byte.  Every test prints one ``criterion N: PASS|FAIL`` line.

Run directly (``python3 tests/test_acceptance.py``) to get just the seven
lines.
"""

import subprocess
import sys

import pytest

CRITERIA = {
    1: "fv-equivalence",
    2: "partition-tautology",
    3: "axioms",
    4: "ba-decision",
    5: "abai-witness",
    6: "imaginaries",
}


def selftest_report():
    proc = subprocess.run([sys.executable, "-m", "fvkit", "selftest", "--seed", "0"],
                          capture_output=True, timeout=1200)
    return proc.returncode, proc.stdout


def parse(report: bytes):
    rows = {}
    for line in report.decode().splitlines():
        parts = line.split("\t")
        if len(parts) == 4 and parts[0].isdigit():
            metrics = dict(kv.split("=", 1) for kv in parts[3].split())
            rows[int(parts[0])] = (parts[1], parts[2], metrics)
    return rows


def requirements(n, m):
    """The quantitative part of criterion ``n`` given its metrics."""
    num = lambda k: int(m.get(k, -1))
    if n == 1:
        return num("formulas") >= 1000 and num("signatures") >= 3 and num("mismatches") == 0
    if n == 2:
        return num("outputs") >= 1000 and num("verified") == num("outputs")
    if n == 3:
        return num("checks") > 0 and num("failures") == 0
    if n == 4:
        return num("sentences") >= 230 and num("comparisons") >= 230 * 6 \
            and num("disagreements") == 0
    if n == 5:
        return num("sentences") == 20 and num("witnessed") == num("true") \
            and num("flagged") == 0
    if n == 6:
        return num("sets") > 0 and num("failures") == 0 and num("skipped") == 0
    return False


@pytest.fixture(scope="module")
def runs():
    return selftest_report(), selftest_report()


def report_line(n, ok, capsys):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}")


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, runs, capsys):
    (code, report), _ = runs
    rows = parse(report)
    name, status, metrics = rows.get(n, ("", "MISSING", {}))
    ok = name == CRITERIA[n] and status == "PASS" and requirements(n, metrics)
    report_line(n, ok, capsys)
    assert ok, f"criterion {n}: {status} {metrics}"


def test_criterion_7_determinism(runs, capsys):
    (code1, first), (code2, second) = runs
    ok = code1 == code2 == 0 and first == second and first.endswith(b"overall\tPASS\n")
    report_line(7, ok, capsys)
    assert ok


if __name__ == "__main__":
    a, b = selftest_report(), selftest_report()
    rows = parse(a[1])
    for n in sorted(CRITERIA):
        name, status, metrics = rows.get(n, ("", "MISSING", {}))
        ok = name == CRITERIA[n] and status == "PASS" and requirements(n, metrics)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
    print(f"criterion 7: {'PASS' if a == b and a[0] == 0 else 'FAIL'}")
