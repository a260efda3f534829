"""Shared random generators for the property suites.

Draw parameters follow the bounds that keep bracket/Jacobi term growth
manageable: exponential exponent vectors in [-2, 2]^3, bare-variable powers
at most 2, small rational coefficients.
"""

from __future__ import annotations

import random

from gmpy2 import mpq

from wittcheck.expr import Ratio, con, exp_lin, fsym, var

BASE = ("t", "x", "u")
JETS = ("u_t", "u_x", "u_tt", "u_tx", "u_xx")

_FUNCS = (("phi", "u"), ("g", "x"), ("h", "t"))


def random_monomial(rng: random.Random, variables=BASE, with_exp=True, with_funcs=False) -> Ratio:
    coeff = mpq(rng.randint(-6, 6) or 1, rng.randint(1, 4))
    m = con(coeff)
    if with_exp:
        m = m * exp_lin(rng.randint(-2, 2), rng.randint(-2, 2), rng.randint(-2, 2))
    for v in variables:
        p = rng.choice((0, 0, 1, 2))
        if p:
            m = m * var(v) ** p
    if with_funcs and rng.random() < 0.5:
        name, arg = rng.choice(_FUNCS)
        m = m * fsym(name, arg, rng.randint(0, 2)) ** rng.choice((1, 1, 2))
    return m


def random_poly(rng: random.Random, variables=BASE, terms=3, with_exp=True,
                with_funcs=False) -> Ratio:
    out = con(0)
    for _ in range(rng.randint(1, terms)):
        out = out + random_monomial(rng, variables, with_exp, with_funcs)
    return out


def random_ratio(rng: random.Random, variables=BASE, with_funcs=False) -> Ratio:
    num = random_poly(rng, variables, with_funcs=with_funcs)
    while True:
        den = random_poly(rng, variables, terms=2, with_funcs=with_funcs)
        if not den.is_zero():
            return num / den


def random_field(rng: random.Random):
    from wittcheck.vecfield import VectorField

    return VectorField(
        random_poly(rng, terms=2),
        random_poly(rng, terms=2),
        random_poly(rng, terms=2),
    )
