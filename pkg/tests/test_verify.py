"""Verification suites: records, reports, determinism, exit semantics."""

import json

import pytest
from gmpy2 import mpq

from wittcheck.catalog import EMPTY, PHI_U, Params, param_grid, phi_c
from wittcheck.oracle import SamplePlan
from wittcheck.verify import (
    Report,
    check_central,
    check_direct_sum,
    check_invariance,
    check_liouville,
    check_sl2,
    check_solution_d2,
    check_virasoro_case1,
    check_virasoro_case2,
    check_witt,
    check_witt_w4_cell,
    run_all,
)

PLAN = SamplePlan()


def _all_green(records):
    return all(r["status"] == "pass" and r["oracle"] == "zero" for r in records)


def test_witt_table_single_variable_family_full_range():
    records = check_witt("W1", EMPTY, 6, PLAN)
    assert len(records) == 169
    assert _all_green(records)


def test_witt_table_pair_value():
    records = check_witt("W2", Params(alpha=0), 2, PLAN)
    by_pair = {(r["m"], r["n"]): r for r in records}
    assert by_pair[(1, -1)]["status"] == "pass"  # [L_1, L_-1] = 2 L_0
    assert by_pair[(1, -1)]["oracle"] == "zero"


def test_witt_reports_are_antisymmetric():
    records = check_witt("W8", Params(gamma=-1), 3, PLAN)
    by_pair = {(r["m"], r["n"]): r["status"] for r in records}
    for (m, n), status in by_pair.items():
        assert by_pair[(n, m)] == status


def test_w10_central_pair():
    records = check_witt("W10", EMPTY, 2, PLAN)
    by_pair = {(r["m"], r["n"]): r for r in records}
    assert by_pair[(2, -2)]["status"] == "pass"  # equals 4 L_0


def test_witt_table_recursion_family_skips_out_of_range_sums():
    p = Params(gamma=1, phi=phi_c(0), signs="++")
    records = check_witt("W4", p, 4, PLAN)
    pairs = {(r["m"], r["n"]) for r in records}
    assert (4, 1) not in pairs and (3, 2) not in pairs
    assert (4, -4) in pairs and (4, 0) in pairs
    assert _all_green(records)


def test_w4_cell_scan_record():
    records = check_witt_w4_cell("W4", 1, 2, PLAN)  # gamma=1, c=0
    scan = [r for r in records if "pairing_scan" in r["params"]]
    assert len(scan) == 1
    assert scan[0]["status"] == "pass"
    assert scan[0]["params"]["pairing_scan"] == "++:pass,+-:fail,--:pass,-+:fail"
    tables = [r for r in records if "signs" in r["params"]]
    assert {r["params"]["signs"] for r in tables} == {"++", "--"}
    assert _all_green(tables)


def test_w4_cell_all_pairings_reports_confirmed_failures():
    records = check_witt_w4_cell("W4", 1, 2, PLAN, all_pairings=True)
    bad = [r for r in records if r["params"].get("signs") in ("+-", "-+")]
    assert bad
    failed = [r for r in bad if r["status"] == "fail"]
    assert failed
    assert all(r["oracle"] == "nonzero" for r in failed)  # oracle-confirmed
    assert all(r["residual"] for r in failed)


def test_sl2_full_grid():
    for rep in ("REP1", "REP2"):
        for p in param_grid(rep):
            assert _all_green(check_sl2(rep, p, PLAN))


def test_direct_sum_disjoint_variables():
    records = check_direct_sum("D1", EMPTY, 3, PLAN)
    assert _all_green(records)
    cross = [r for r in records if r["params"]["factor"] == "cross"]
    assert len(cross) == 49


def test_direct_sum_with_swap():
    assert _all_green(check_direct_sum("D3", EMPTY, 2, PLAN))


def test_central_candidates_all_pass():
    for cid in ("C1", "C3", "C6"):
        assert _all_green(check_central(cid, EMPTY, PLAN))
    assert _all_green(check_central("C2", Params(lam=mpq(2)), PLAN))


def test_virasoro_cases():
    assert _all_green(check_virasoro_case1(PLAN))
    records = check_virasoro_case2(PLAN)
    assert _all_green(records)
    rels = {r["params"]["rel"] for r in records}
    assert {"[L0,L2]=-2L2", "[L-1,L2]=-3L1", "[L2,C]=0"} <= rels


def test_invariance_table_rows():
    assert _all_green(check_invariance("T1_W10", EMPTY, 3, PLAN))
    assert _all_green(check_invariance("T1_W8", Params(gamma=1), 3, PLAN))
    records = check_invariance("D2_EQ", EMPTY, 3, PLAN)
    assert _all_green(records)
    assert {r["params"]["factor"] for r in records} == {"1", "2"}


def test_solution_records():
    records = check_solution_d2(mpq(-1), PLAN)
    assert _all_green(records)
    rels = [r["params"]["rel"] for r in records]
    assert rels == ["residual", "dx_of_ut", "dt_of_ux"]
    with pytest.raises(ValueError):
        check_solution_d2(0, PLAN)


def test_liouville_records():
    records = check_liouville(PLAN)
    assert _all_green(records)
    assert {r["id"] for r in records} == {"LIOUVILLE_F", "LIOUVILLE_G"}


def test_report_sorting_and_exit_codes():
    report = Report(seed=1, rng=2)
    report.extend(check_central("C6", EMPTY, PLAN))
    report.extend(check_witt("W1", EMPTY, 1, PLAN))
    report.sort()
    kinds = [r["kind"] for r in report.records]
    assert kinds == sorted(kinds)
    assert report.exit_code() == 0
    c = report.counts()
    assert c["fail"] == 0 and c["disagreement"] == 0


def test_report_flags_confirmed_failure_as_exit_one():
    records = check_witt_w4_cell("W4", 1, 2, PLAN, all_pairings=True)
    report = Report(records)
    assert report.exit_code() == 1


def test_report_flags_disagreement_as_exit_three():
    rec = check_witt("W1", EMPTY, 1, PLAN)[0]
    rec = dict(rec, oracle="nonzero")  # fabricated inconsistency
    report = Report([rec])
    assert report.exit_code() == 3


def test_report_json_is_deterministic_and_zeroes_timings():
    records = check_sl2("REP1", EMPTY, PLAN)
    a = Report(list(records), seed=9, rng=1).to_json()
    b = Report(list(reversed(records)), seed=9, rng=1).to_json()
    assert a == b
    doc = json.loads(a)
    assert all(rec["ms"] == 0 for rec in doc["records"])
    timed = Report(list(records), seed=9, rng=1).to_json(timings=True)
    assert json.loads(timed)["records"][0]["ms"] >= 0


def test_run_all_subset_and_merge_determinism():
    r1 = run_all(2, seed=7, only={"D1", "D2"}, jobs=1)
    r2 = run_all(2, seed=7, only={"D1", "D2"}, jobs=2)
    assert r1.to_json() == r2.to_json()
    assert r1.exit_code() == 0
    ids = {rec["id"] for rec in r1.records}
    assert ids == {"D1", "D2"}
