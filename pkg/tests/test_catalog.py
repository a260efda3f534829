"""Catalog transcription checks: generators, grids, equations, export."""

import pytest
from gmpy2 import mpq

from wittcheck.catalog import (
    CENTRAL_IDS,
    DSUM_IDS,
    EMPTY,
    EQUATION_IDS,
    PHI_SYM,
    PHI_U,
    CatalogError,
    Params,
    catalog_export,
    central_candidate,
    central_context,
    direct_sum_rules,
    equation_realization,
    generator,
    invariant_args,
    liouville_generator,
    param_grid,
    phi_c,
    sl2_triplet,
    solved_form,
    virasoro_case1,
    virasoro_case2,
    w4_pairing_scan,
    witt_generator,
    WITT_IDS,
)
from wittcheck.expr import con, exp_lin, fsym, var
from wittcheck.vecfield import VectorField

Z = con(0)


def test_all_families_have_the_translation_generator_at_zero():
    one = VectorField(con(1), Z, Z)
    for rid in WITT_IDS:
        grid = param_grid(rid) if rid != "W4" else [
            Params(gamma=1, phi=phi_c(0), signs="++"),
            Params(gamma=-1, phi=PHI_U, signs="--"),
        ]
        for p in grid:
            assert witt_generator(rid, 0, p) == one, rid


def test_w1_generator():
    assert witt_generator("W1", 5) == VectorField(exp_lin(-5), Z, Z)


def test_w2_at_zero_kills_both_corrections():
    assert witt_generator("W2", 0, Params(alpha=1)) == VectorField(con(1), Z, Z)


def test_w10_order_two_by_hand():
    # sum_{j=1}^{2} j(j-1) = 2, so the u-coefficient is exp(-2t-2x)
    got = witt_generator("W10", 2)
    want = VectorField(exp_lin(-2), con(2) * exp_lin(-2), exp_lin(-2, -2))
    assert got == want


def test_rep2_general_form_at_minus_one():
    p = Params(alpha=1, beta=1, phi=PHI_U)
    got = witt_generator("REP2", -1, p)
    et = exp_lin(1)
    assert got.tau == et * (con(1) + exp_lin(0, -2))
    assert got.xi == et * (con(-1) + exp_lin(0, -2) + exp_lin(0, -1) * var("u"))
    assert got.eta == exp_lin(1, -1)


def test_rep2_triplet_with_trivial_slots():
    p = Params(alpha=0, beta=0, phi=phi_c(0))
    l0, l1, lm1 = sl2_triplet("REP2", p)
    assert l0 == VectorField(con(1), Z, Z)
    assert l1 == VectorField(exp_lin(-1), exp_lin(-1), Z)
    assert lm1 == VectorField(exp_lin(1), -exp_lin(1), Z)


def test_rep1_triplet():
    l0, l1, lm1 = sl2_triplet("REP1")
    assert (l0, l1, lm1) == (
        VectorField(con(1), Z, Z),
        VectorField(exp_lin(-1), Z, Z),
        VectorField(exp_lin(1), Z, Z),
    )


GOLDEN = {
    ("W1", -2, ()): ("exp(2*t)", "0", "0"),
    ("W2", 3, (("alpha", "1"),)): ("exp(-3*t)", "3*exp(-3*t) + 3*exp(-3*t-x)", "0"),
    ("W3", 2, (("gamma", "1"),)): (
        "(exp(-2*t+3*x) - 3*exp(-2*t+2*x) + 3*exp(-2*t+x))/(exp(3*x) - 3*exp(2*x) + 3*exp(x) - 1)",
        "(2*exp(-2*t+2*x) - 3*exp(-2*t+x))/(exp(2*x) - 2*exp(x) + 1)",
        "0",
    ),
    ("W5", 2, (("sign", "-"),)): (
        "(exp(-2*t+2*x) - 2*exp(-2*t+x))/(exp(2*x) - 2*exp(x) + 1)",
        "(2*exp(-2*t+x))/(exp(x) - 1)",
        "0",
    ),
    ("W6", -2, (("gamma", "-1"),)): (
        "exp(2*t)",
        "-2*exp(2*t) - 3*exp(2*t-x) - exp(2*t-2*x)",
        "0",
    ),
    ("W8", 2, (("gamma", "1"),)): ("exp(-2*t)", "2*exp(-2*t) - exp(-2*t-2*x)", "0"),
    ("W9", 2, (("phi", "u"),)): (
        "(exp(-2*t+4*x) - 4*exp(-2*t+3*x) + 5*exp(-2*t+2*x) + exp(-2*t+x)*u + 4*exp(-2*t+x))"
        "/(exp(4*x) - 4*exp(3*x) + 6*exp(2*x) - 4*exp(x) + 1)",
        "(2*exp(-2*t+3*x) - 4*exp(-2*t+2*x) - exp(-2*t+x)*u - 4*exp(-2*t+x))"
        "/(exp(3*x) - 3*exp(2*x) + 3*exp(x) - 1)",
        "0",
    ),
    ("W10", 2, ()): ("exp(-2*t)", "2*exp(-2*t)", "exp(-2*t-2*x)"),
    ("W11", -1, (("alpha", "-1"),)): ("exp(t)", "-exp(t) - exp(t-x)", "exp(t-x)"),
}


def test_golden_printed_generators():
    for (rid, n, items), want in GOLDEN.items():
        p = Params(**{k: (PHI_U if v == "u" else int(v) if k != "sign" else (1 if v == "+" else -1))
                      for k, v in items})
        vf = witt_generator(rid, n, p)
        assert (str(vf.tau), str(vf.xi), str(vf.eta)) == want, (rid, n)


def test_param_grids():
    assert param_grid("W1") == [EMPTY]
    assert param_grid("W2") == [Params(alpha=a) for a in (-1, 0, 1)]
    grid4 = param_grid("W4")
    assert all(p.signs in ("++", "--") for p in grid4)
    assert {p.gamma for p in grid4} == {-1, 1}
    # negative-gamma cells keep the radicand non-negative
    for p in grid4:
        if p.gamma == -1 and p.phi.kind == "c":
            assert 4 * p.gamma + p.phi.value**2 >= 0
    assert len(param_grid("REP2")) == 3 * 2 * 6
    assert param_grid("C2") == [Params(lam=q) for q in (mpq(1), mpq(-1), mpq(2))]


def test_w4_pairing_scan_outcomes():
    scan = w4_pairing_scan(1, phi_c(0))
    assert scan == {"++": True, "+-": False, "-+": False, "--": True}
    degenerate = w4_pairing_scan(-1, phi_c(-2))  # radicand 0: signs inert
    assert degenerate == {"++": True}


def test_w4_seeds_match_the_triplet():
    p = Params(gamma=1, phi=PHI_U, signs="++")
    assert witt_generator("W4", 1, p) == VectorField(exp_lin(-1), exp_lin(-1), Z)
    lm1 = witt_generator("W4", -1, p)
    assert lm1.tau == exp_lin(1) * (con(1) + exp_lin(0, -2))


def test_w4_recursion_bound():
    p = Params(gamma=1, phi=phi_c(0), signs="++")
    with pytest.raises(CatalogError):
        witt_generator("W4", 5, p)
    assert witt_generator("W4", 4, p, bound=4) is witt_generator("W4", 4, p, bound=4)


def test_undeclared_parameter_rejected():
    with pytest.raises(CatalogError):
        witt_generator("W1", 0, Params(alpha=1))
    with pytest.raises(CatalogError):
        witt_generator("W2", 0, EMPTY)


def test_central_candidates():
    l0, l1 = central_context()
    assert central_candidate("C6") == VectorField(Z, con(1), Z)
    c1 = central_candidate("C1")
    assert c1 == VectorField(exp_lin(0, -1), exp_lin(0, -1) + var("u"), Z)
    c3 = central_candidate("C3")
    assert c3 == VectorField(exp_lin(0, -1), exp_lin(0, -1), con(1))


def test_virasoro_case_operator_shapes():
    ops1 = virasoro_case1()
    assert ops1["L2"] == VectorField(exp_lin(-2), Z, Z)
    assert ops1["C"] == VectorField(Z, Z, con(1))
    ops2 = virasoro_case2()
    u, ex = var("u"), exp_lin(0, 1)
    want_tau = u * ex * (u * ex + 2) / (exp_lin(2) * (u * ex + 1) ** 2)
    assert ops2["L2"].tau == want_tau


def test_liouville_generators():
    qf = liouville_generator("LIOUVILLE_F")
    assert qf == VectorField(fsym("f", "t"), Z, -fsym("f", "t", 1))
    qg = liouville_generator("LIOUVILLE_G")
    assert qg == VectorField(Z, fsym("g", "x"), -fsym("g", "x", 1))


def test_direct_sum_factor_shapes():
    r1, r2 = direct_sum_rules("D1")
    assert r1(3) == VectorField(exp_lin(-3), Z, Z)
    assert r2(3) == VectorField(Z, exp_lin(0, -3), Z)
    r1, r2 = direct_sum_rules("D2")
    assert r2(2) == VectorField(Z, exp_lin(0, -2), con(2) * exp_lin(0, -2))
    r1, r2 = direct_sum_rules("D3")
    assert r1(2) == VectorField(exp_lin(-2), con(2) * exp_lin(-2), Z)
    assert r2(2) == VectorField(Z, con(2) * exp_lin(0, 0, -2), exp_lin(0, 0, -2))


def test_d7_equals_the_translated_two_variable_family():
    # the gamma-free constant slot coincides with gamma^2 * that slot
    perm = {"t": "x", "x": "u", "u": "t"}
    for g in (1, -1):
        r2 = direct_sum_rules("D7", Params(gamma=g))[1]
        for n in range(-4, 5):
            translated = witt_generator("W3", n, Params(gamma=g)).translate(perm)
            assert r2(n) == translated, (g, n)


def test_invariant_args_parse_and_order():
    args = invariant_args("T1_W10")
    assert args == [var("u_x") + con(2) * var("u"), var("u_xx") - con(4) * var("u")]
    args = invariant_args("D2_EQ")
    assert args == [(var("u_tx") / var("u_t")) * exp_lin(0, 0, -1)]
    args = invariant_args("T1_W1")
    assert args[-1] == var("u_tx") / var("u_t")
    for eq in EQUATION_IDS:
        rid, grid = equation_realization(eq)
        for p in grid:
            for a in invariant_args(eq, p):
                assert a is not None


def test_solved_forms():
    v, rhs = solved_form("LIO_EQ")
    assert v == "u_tx" and rhs == exp_lin(0, 0, 1)
    v, rhs = solved_form("D2_EQ", Params(lam=mpq(2)))
    assert rhs == con(2) * var("u_t") * exp_lin(0, 0, 1)
    assert solved_form("D1_EQ") is None


def test_generator_dispatch():
    assert generator("C6", 0) == central_candidate("C6")
    assert generator("D1", 2, factor=1) == witt_generator("W1", 2)
    with pytest.raises(CatalogError):
        generator("D1", 2)
    with pytest.raises(CatalogError):
        generator("C6", 1)


def test_catalog_export_structure():
    doc = catalog_export(max_n=2)
    assert doc["schema"].startswith("wittcheck-catalog/")
    ids = [entry["id"] for entry in doc["realizations"]]
    assert list(WITT_IDS) == ids[: len(WITT_IDS)]
    w1 = doc["realizations"][0]
    assert w1["parameters"][0]["generators"]["-2"] == "(exp(2*t))*d_t"
    eq_ids = {e["id"] for e in doc["equations"]}
    assert set(EQUATION_IDS) == eq_ids
