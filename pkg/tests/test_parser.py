"""Mini-language grammar, error reporting, and print round-trips."""

import random

import pytest

from conftest import random_poly, random_ratio
from wittcheck.expr import DeclaredAtom, con, datom, exp_lin, fsym, radical, var
from wittcheck.parser import ParseError, UnknownSymbolError, parse


def test_parse_exponential():
    assert parse("exp(-2*t)") == exp_lin(-2)
    assert parse("exp(t - x)") == exp_lin(1, -1)
    assert parse("exp(0)") == con(1)
    assert parse("exp(-2*t + x - 3*u)") == exp_lin(-2, 1, -3)


def test_parse_function_symbols():
    assert parse("exp(x) - phi(u)") == exp_lin(0, 1) - fsym("phi", "u")
    assert parse("phi''(u)") == fsym("phi", "u", 2)
    assert parse("g'(x)*h(t)") == fsym("g", "x", 1) * fsym("h", "t")


def test_parse_order2_denominator_of_the_fraction_family():
    got = parse("(exp(2*x) - exp(x)*phi(u) - 1)")
    assert got == exp_lin(0, 2) - exp_lin(0, 1) * fsym("phi", "u") - con(1)


def test_parse_rationals_and_precedence():
    assert parse("1/2*x") == con(1) / con(2) * var("x")
    assert parse("3/4") == con(3) / con(4)
    assert parse("2*x^2 - x") == con(2) * var("x") ** 2 - var("x")
    assert parse("x^-1") == con(1) / var("x")
    assert parse("-x^2") == -(var("x") ** 2)


def test_parse_jet_variables():
    assert parse("u_tx/u_t") == var("u_tx") / var("u_t")
    assert parse("u_xx - 2*u_x") == var("u_xx") - con(2) * var("u_x")


def test_parse_radical_needs_context():
    r = radical(var("u") ** 2 + 4)
    assert parse("rad^2", rad=r) == var("u") ** 2 + 4
    with pytest.raises(UnknownSymbolError):
        parse("rad")


def test_parse_declared_atoms():
    w = DeclaredAtom("w")
    assert parse("w^2 - w", atoms={"w": w}) == datom(w) ** 2 - datom(w)


def test_syntax_error_offset():
    with pytest.raises(ParseError) as err:
        parse("exp(x) + $")
    assert err.value.offset == 9
    with pytest.raises(ParseError) as err:
        parse("1 + ")
    assert err.value.offset == 4


def test_unknown_symbol_error():
    with pytest.raises(UnknownSymbolError):
        parse("x + bogus")


def test_whitespace_insensitive():
    assert parse(" exp( x )-1 ") == parse("exp(x) - 1")


def test_division_by_zero_expression():
    with pytest.raises(ParseError):
        parse("1/(x - x)")


def test_roundtrip_on_random_canonical_ratios():
    rng = random.Random(23)
    for i in range(100):
        r = random_ratio(rng, with_funcs=(i % 2 == 0))
        back = parse(str(r))
        assert back.num == r.num and back.den == r.den, str(r)


def test_roundtrip_on_jet_expressions():
    rng = random.Random(29)
    for _ in range(40):
        r = random_poly(rng, variables=("u", "u_t", "u_x", "u_tx"), with_funcs=True)
        back = parse(str(r))
        assert back.num == r.num and back.den == r.den
