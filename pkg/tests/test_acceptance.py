"""The ten acceptance criteria, run at the default policy N=6, K=3, M=6.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  Run ``python3 tests/test_acceptance.py`` to get just the
lines.  Equality is exact everywhere (no tolerances).
"""

from __future__ import annotations

import collections
import sys

import pytest

from hallpath import checker, rewriter
from hallpath.checker import GROUPS, Config, report_json, sign_constants, verify

TITLES = {
    1: "coefficient consistency (c, c*, c/c* ratio), |mu| <= 7",
    2: "monodromy and dual monodromy, |lambda| <= 6",
    3: "DB+, DB-, DB0 on V at |k| <= 3, N = 6",
    4: "EHA relations via the positive half, f-side on V-",
    5: "comparison with the box-sum operators, global sign s",
    6: "psi: product expansion equals exponential form, order 6, |lambda| <= 5",
    7: "Y relations, arity <= 3, indices in [-1, 1], and Y_00",
    8: "special-form rewriting of >= 200 random words",
    9: "anti-involution: e_m -> f_m, DB+ -> V- identities, involutive",
    10: "determinism and fast/exact agreement on the full suite",
}

DEFAULT = Config()


def _select(reports, n):
    return [r for r in reports if checker._matches(r["id"], GROUPS[n])]


def _status_detail(rows) -> tuple[bool, str]:
    by_id = collections.OrderedDict()
    for r in rows:
        by_id.setdefault(r["id"], collections.Counter())[r["status"]] += 1
    bad = {i: dict(c) for i, c in by_id.items() if c.get("fail") or c.get("skipped")}
    ok = bool(rows) and not bad
    cells = sum(r["domain_size"] for r in rows)
    if ok:
        return True, f"{len(rows)} instances, {len(by_id)} ids, {cells} checked cells"
    if not rows:
        return False, "no instances selected"
    return False, "failing " + ", ".join(f"{i} {c}" for i, c in bad.items())


def evaluate(n: int, reports: list[dict]) -> tuple[bool, str]:
    rows = _select(reports, n)
    ok, detail = _status_detail(rows)
    if n == 3:
        levels = {r["params"].get("k") for r in rows}
        want = set(range(-DEFAULT.K, DEFAULT.K + 1))
        if not want <= levels:
            ok, detail = False, f"levels {sorted(want - levels)} not covered; " + detail
    if n == 5:
        s, s2 = sign_constants()
        detail = f"s = {s:+d} (f-side s' = {s2:+d}); " + detail
    if n == 8:
        words = sum(1 for r in rows if r["id"] == "rewriter/to_special")
        if words < 200:
            ok, detail = False, f"only {words} random words; " + detail
        else:
            detail = f"{words} random words, {rewriter.measure_checks()} measure descents; " + detail
    return ok, detail


@pytest.fixture(scope="session")
def exact_run():
    reports = verify(DEFAULT, ("all",))
    return reports, report_json(DEFAULT, reports)


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number, exact_run, record_criterion):
    reports, _ = exact_run
    ok, detail = evaluate(number, reports)
    record_criterion(number, TITLES[number], ok, detail)
    assert ok, detail


def criterion_10(first_reports: list[dict], first_text: str) -> tuple[bool, str]:
    again = report_json(DEFAULT, verify(DEFAULT, ("all",)))
    same_bytes = again == first_text
    fast_cfg = Config(fast=True)
    fast = verify(fast_cfg, ("all",))
    disagree = [(a["id"], a["params"]) for a, b in zip(first_reports, fast)
                if (a["id"], a["params"]) != (b["id"], b["params"]) or a["status"] != b["status"]]
    ok = same_bytes and len(fast) == len(first_reports) and not disagree
    detail = (f"rerun byte-identical: {same_bytes}; fast mode agrees on "
              f"{len(first_reports) - len(disagree)}/{len(first_reports)} instances")
    if disagree:
        detail += f"; first disagreement {disagree[0]}"
    return ok, detail


def test_criterion_10(exact_run, record_criterion):
    reports, text = exact_run
    ok, detail = criterion_10(reports, text)
    record_criterion(10, TITLES[10], ok, detail)
    assert ok, detail


def main() -> int:
    reports = verify(DEFAULT, ("all",))
    text = report_json(DEFAULT, reports)
    all_ok = True
    for n in range(1, 11):
        ok, detail = criterion_10(reports, text) if n == 10 else evaluate(n, reports)
        all_ok &= ok
        print(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {TITLES[n]}: {detail}", flush=True)
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
