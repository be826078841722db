import json

from hallpath import checker
from hallpath.checker import Config, report_json, sign_constants, verify

SMALL = Config(N=4, K=2, M=4)
SELECTION = ("cubic_e", "y00", "psi_dual", "monodromy")


def test_sign_constants():
    assert sign_constants() == (1, -1)


def test_selection_and_report_shape():
    reports = verify(SMALL, SELECTION, workers=1)
    ids = {r["id"] for r in reports}
    # a builder name pulls in its whole family
    assert ids == {"cubic_e", "y00", "psi_dual", "monodromy", "dual_monodromy"}
    for r in reports:
        assert set(r) >= {"id", "params", "domain_size", "status"}
        assert r["status"] == "pass" and r["domain_size"] > 0
    doc = json.loads(report_json(SMALL, reports))
    assert doc["constants"] == {"s": 1, "s_prime": -1, "epsilon": -1}
    assert doc["summary"]["pass"] == len(reports)


def test_deterministic_and_parallel_order():
    a = report_json(SMALL, verify(SMALL, SELECTION, workers=1))
    b = report_json(SMALL, verify(SMALL, SELECTION, workers=2))
    assert a == b


def test_fast_mode_agrees_with_exact():
    exact = verify(SMALL, SELECTION, workers=1)
    fast = verify(Config(N=4, K=2, M=4, fast=True), SELECTION, workers=1)
    assert [(r["id"], r["params"], r["status"]) for r in exact] == \
        [(r["id"], r["params"], r["status"]) for r in fast]
    assert all("point" in r for r in fast)


def test_fixed_point_fast_mode():
    reps = verify(Config(N=4, K=2, M=4, fast=True, point=(3, -5)), ("y00",), workers=1)
    assert reps[0]["point"] == "q=3,t=-5" and reps[0]["status"] == "pass"


def test_failure_carries_a_counterexample():
    zero = checker.I(0, checker.ZERO)
    inst = checker._inst("bogus", checker.E(0), zero)
    rep = checker.check_instance(inst, SMALL).to_json()
    assert rep["status"] == "fail" and "witness" in rep["counterexample"]


def test_groups_cover_every_builder():
    prefixes = {p for _, ps in checker.REGISTRY.values() for p in ps}
    grouped = {p for ps in checker.GROUPS.values() for p in ps}
    assert grouped <= prefixes | {"db+/", "db-/", "db0/"}
