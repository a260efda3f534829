"""Total derivatives, second prolongation, jet substitution."""

import pytest

from wittcheck.expr import con, exp_lin, fsym, var
from wittcheck.jet import (
    JetOrderError,
    jet_order,
    pr_apply,
    prolong2,
    substitute_jet,
    total_dt,
    total_dx,
)
from wittcheck.vecfield import VectorField

Z = con(0)


def test_total_dt_of_u():
    assert total_dt(var("u")) == var("u_t")
    assert total_dx(var("u")) == var("u_x")


def test_total_dx_through_first_order():
    e = exp_lin(-1) * var("u_t")
    assert total_dx(e) == exp_lin(-1) * var("u_tx")


def test_total_derivatives_commute_to_the_mixed_representative():
    assert total_dx(total_dt(var("u"))) == var("u_tx")
    assert total_dt(total_dx(var("u"))) == var("u_tx")


def test_total_dt_chain_with_function_symbol():
    f1, f2 = fsym("f", "t", 1), fsym("f", "t", 2)
    e = -f1 - var("u_t") * f1
    assert total_dt(e) == -f2 - var("u_t") * f2 - var("u_tt") * f1


def test_total_derivative_rejects_second_order_input():
    with pytest.raises(JetOrderError):
        total_dt(var("u_tt"))
    with pytest.raises(JetOrderError):
        total_dx(var("u_tx") + var("u"))


def test_prolongation_of_exponential_time_translations():
    n = 3
    p = prolong2(VectorField(exp_lin(-n), Z, Z))
    e = exp_lin(-n)
    assert p.eta_t == con(n) * e * var("u_t")
    assert p.eta_tt == con(2 * n) * e * var("u_tt") - con(n * n) * e * var("u_t")
    assert p.eta_tx == con(n) * e * var("u_tx")
    assert p.eta_x.is_zero() and p.eta_xx.is_zero()


def test_prolongation_of_constant_field_vanishes():
    p = prolong2(VectorField(con(1), Z, Z))
    assert all(c.is_zero() for c in p.coefficients().values())


def test_prolongation_of_function_coefficient_field():
    f, f1 = fsym("f", "t"), fsym("f", "t", 1)
    p = prolong2(VectorField(f, Z, -f1))
    assert p.eta_tx == -f1 * var("u_tx")


def test_prolongation_is_linear_in_the_field():
    from conftest import random_field
    import random

    rng = random.Random(41)
    for _ in range(20):
        q, p = random_field(rng), random_field(rng)
        a = prolong2(q + p)
        b = prolong2(q)
        c = prolong2(p)
        for k, coeff in a.coefficients().items():
            assert coeff == b.coefficients()[k] + c.coefficients()[k]


def test_annihilation_of_the_stated_invariants():
    n = 4
    p = prolong2(VectorField(exp_lin(-n), Z, Z))
    for inv in (
        var("x"),
        var("u"),
        var("u_x"),
        var("u_xx"),
        var("u_tx") / var("u_t"),
        exp_lin(-n) * var("u_t"),
        exp_lin(-2 * n) * var("u_tt") - con(n) * exp_lin(-2 * n) * var("u_t"),
    ):
        assert pr_apply(p, inv).is_zero()


def test_substitute_jet_on_manifold():
    eu = exp_lin(0, 0, 1)
    assert substitute_jet(var("u_tx") - eu, "u_tx", eu).is_zero()
    f1 = fsym("f", "t", 1)
    residual = -f1 * (var("u_tx") - eu)
    assert substitute_jet(residual, "u_tx", eu).is_zero()


def test_substitute_jet_occurrence_check():
    with pytest.raises(JetOrderError):
        substitute_jet(var("u_tx"), "u_tx", var("u_tx") + 1)
    with pytest.raises(JetOrderError):
        substitute_jet(var("u"), "u", con(1))


def test_jet_order():
    assert jet_order(var("u")) == 0
    assert jet_order(var("u_x") * var("u")) == 1
    assert jet_order(var("u_tx") / var("u_t")) == 2


def test_liouville_residual_shape_before_restriction():
    f, f1 = fsym("f", "t"), fsym("f", "t", 1)
    q = VectorField(f, Z, -f1)
    eu = exp_lin(0, 0, 1)
    res = pr_apply(prolong2(q), var("u_tx") - eu)
    assert res == -f1 * (var("u_tx") - eu)
