"""Numeric oracle: evaluation, adjudication soundness, finite differences."""

import math
import random

import pytest
from gmpy2 import mpq

from conftest import random_monomial, random_poly, random_ratio
from wittcheck.catalog import PHI_U, Params, param_grid, witt_generator
from wittcheck.expr import con, exp_lin, fsym, radical, var
from wittcheck.oracle import (
    Inadmissible,
    SamplePlan,
    cross_check,
    difference_check_numeric,
    eval_ratio,
    fd_derivative_check,
    numeric_hodograph_check,
    solution_d2_numeric,
)

PLAN = SamplePlan()


def test_eval_exponential_identity():
    e = exp_lin(1) * exp_lin(-1) - 1
    assert e.is_zero()
    assert eval_ratio(exp_lin(1), {"t": 0.37}) == pytest.approx(math.exp(0.37))


def test_eval_radical_defining_relation():
    r = radical(con(4) + var("u") ** 2)
    rel = r * r - (con(4) + var("u") ** 2)
    assert rel.is_zero()
    asg = {"u": 0.5, ("radsign",): 1.0}
    assert eval_ratio(r, asg) == pytest.approx(math.sqrt(4.25))


def test_eval_denominator_guard():
    q = con(1) / (exp_lin(0, 1) - 1)
    with pytest.raises(Inadmissible):
        eval_ratio(q, {"x": 1e-12})


def test_cross_check_trivial_cases():
    assert cross_check(con(0), PLAN, "zero") == "zero"
    assert cross_check(exp_lin(0, 1) - exp_lin(0, 0, 1), PLAN, "nz") == "nonzero"


def test_cross_check_soundness_on_knowns():
    rng = random.Random(43)
    for i in range(50):
        p = random_poly(rng, with_funcs=(i % 2 == 0))
        assert cross_check(p - p, PLAN, "pp%d" % i) == "zero"
    for i in range(50):
        p = random_poly(rng)
        q = random_monomial(rng)
        expr = p - p + q
        assert cross_check(expr, PLAN, "ppq%d" % i) == "nonzero", str(expr)


def test_cross_check_determinism():
    e = random_ratio(random.Random(77))
    runs = {cross_check(e, SamplePlan(seed=5), "det") for _ in range(3)}
    assert len(runs) == 1


def test_eval_is_multiplicative_within_tolerance():
    rng = random.Random(51)
    for _ in range(40):
        a = random_poly(rng)
        b = random_poly(rng)
        reqs_vars = sorted(a.variables() | b.variables())
        asg = {v: rng.uniform(-1.0, 1.0) for v in reqs_vars}
        va, vb = eval_ratio(a, asg), eval_ratio(b, asg)
        vab = eval_ratio(a * b, asg)
        assert vab == pytest.approx(va * vb, rel=1e-10, abs=1e-10)


def test_fd_agreement_on_simple_generators():
    assert fd_derivative_check(exp_lin(-3), "t")
    assert fd_derivative_check(fsym("phi", "u") ** 2, "u")
    assert fd_derivative_check(radical(var("u") ** 2 - 4), "u")


def test_fd_agreement_on_catalog_subexpressions():
    # fifty (expression, variable) draws from actual catalog components
    pool = []
    for rid, p in (
        ("W3", Params(gamma=1)),
        ("W3", Params(gamma=-1)),
        ("W9", Params(phi=PHI_U)),
        ("W6", Params(gamma=1)),
        ("W4", Params(gamma=1, phi=PHI_U, signs="++")),
        ("W4", Params(gamma=-1, phi=PHI_U, signs="--")),
        ("W11", Params(alpha=1)),
    ):
        for n in (-2, -1, 1, 2):
            vf = witt_generator(rid, n, p)
            pool.extend(c for c in vf.components() if not c.is_zero())
    rng = random.Random(53)
    checks = 0
    while checks < 50:
        e = rng.choice(pool)
        v = rng.choice(("t", "x", "u"))
        assert fd_derivative_check(e, v, SamplePlan(seed=1000 + checks, points=10)), (str(e), v)
        checks += 1


def test_difference_check():
    a = (exp_lin(0, 1) + 1) / (exp_lin(0, 2) - 1)
    b = con(1) / (exp_lin(0, 1) - 1)
    assert difference_check_numeric(a, b, PLAN, "eq") == "zero"
    assert difference_check_numeric(a, b + 1, PLAN, "ne") == "nonzero"


def test_solution_closed_form_numeric():
    for lam in (mpq(1), mpq(-1), mpq(2)):
        assert solution_d2_numeric(lam, PLAN)


def test_hodograph_spot_check():
    for lam in (mpq(1), mpq(2)):
        assert numeric_hodograph_check(lam, SamplePlan(points=10))
    with pytest.raises(ValueError):
        numeric_hodograph_check(mpq(0))


def test_radical_sampling_widens_to_admissible_region():
    # radicand u^2 - 4 needs |u| > 2: the plan's wide range makes that reachable
    r = radical(var("u") ** 2 - 4)
    assert cross_check(r * r - (var("u") ** 2 - 4), PLAN, "rad") == "zero"
    assert cross_check(r - var("u"), PLAN, "radnz") == "nonzero"
