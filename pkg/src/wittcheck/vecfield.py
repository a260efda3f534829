"""Vector fields on R^3 and the Lie bracket.

A field ``Q = tau*d_t + xi*d_x + eta*d_u`` acts on scalars as a derivation;
the bracket ``[Q, P] = QP - PQ`` is again a field, computed componentwise as
``Q(P_i) - P(Q_i)``.  Components are canonical :class:`~wittcheck.expr.Ratio`
values, so fields are immutable and freely shareable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from gmpy2 import mpq

from .expr import Ratio, con, rename_vars

__all__ = ["VectorField", "lin_comb"]

Scalar = Union[int, mpq]

_COORDS = ("t", "x", "u")


@dataclass(frozen=True)
class VectorField:
    """Coefficients of ``d_t``, ``d_x``, ``d_u`` in that order."""

    tau: Ratio
    xi: Ratio
    eta: Ratio

    @staticmethod
    def zero() -> "VectorField":
        return VectorField(con(0), con(0), con(0))

    def components(self) -> tuple:
        return (self.tau, self.xi, self.eta)

    def is_zero(self) -> bool:
        return self.tau.is_zero() and self.xi.is_zero() and self.eta.is_zero()

    def apply(self, f: Ratio) -> Ratio:
        """Derivation action: ``tau*df/dt + xi*df/dx + eta*df/du``."""
        return self.tau * f.diff("t") + self.xi * f.diff("x") + self.eta * f.diff("u")

    def bracket(self, other: "VectorField") -> "VectorField":
        return VectorField(
            self.apply(other.tau) - other.apply(self.tau),
            self.apply(other.xi) - other.apply(self.xi),
            self.apply(other.eta) - other.apply(self.eta),
        )

    def scale(self, c: Scalar) -> "VectorField":
        q = con(c)
        return VectorField(q * self.tau, q * self.xi, q * self.eta)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.tau + other.tau, self.xi + other.xi, self.eta + other.eta)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.tau - other.tau, self.xi - other.xi, self.eta - other.eta)

    def __neg__(self) -> "VectorField":
        return VectorField(-self.tau, -self.xi, -self.eta)

    def translate(self, mapping: dict) -> "VectorField":
        """Relabel coordinates by a permutation of ``t, x, u``.

        The coefficient of ``d_v`` becomes the coefficient of ``d_mapping[v]``
        with the same renaming applied inside each component.
        """
        comps = dict(zip(_COORDS, self.components()))
        new = {}
        for v in _COORDS:
            target = mapping.get(v, v)
            new[target] = rename_vars(comps[v], mapping)
        return VectorField(new["t"], new["x"], new["u"])

    def cancel_factor(self, factor: Ratio) -> "VectorField":
        return VectorField(
            self.tau.cancel_factor(factor),
            self.xi.cancel_factor(factor),
            self.eta.cancel_factor(factor),
        )

    def __str__(self) -> str:
        parts = []
        for comp, v in zip(self.components(), _COORDS):
            if not comp.is_zero():
                parts.append("(%s)*d_%s" % (comp, v))
        return " + ".join(parts) if parts else "0"


def lin_comb(c1: Scalar, q1: VectorField, c2: Scalar, q2: VectorField) -> VectorField:
    return q1.scale(c1) + q2.scale(c2)
