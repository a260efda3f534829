"""Second-order jet expressions, total derivatives and prolongation.

Jet expressions are ordinary kernel ratios over the extended variable set
``(t, x, u, u_t, u_x, u_tt, u_tx, u_xx)``; the mixed derivative has the
single representative ``u_tx``.  Total derivatives accept only expressions
of jet order <= 1 because third-order coordinates are not modeled, and the
second prolongation of a field is computed verbatim from its coefficients::

    eta^t  = D_t(eta) - u_t*D_t(tau) - u_x*D_t(xi)
    eta^x  = D_x(eta) - u_t*D_x(tau) - u_x*D_x(xi)
    eta^tt = D_t(eta^t) - u_tt*D_t(tau) - u_tx*D_t(xi)
    eta^tx = D_x(eta^t) - u_tt*D_x(tau) - u_tx*D_x(xi)
    eta^xx = D_x(eta^x) - u_tx*D_x(tau) - u_xx*D_x(xi)
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import JET_VARS, Ratio, substitute_var, var
from .vecfield import VectorField

__all__ = [
    "JetOrderError",
    "ProlongedField",
    "jet_order",
    "total_dt",
    "total_dx",
    "prolong2",
    "pr_apply",
    "substitute_jet",
]

_ORDER = {"t": 0, "x": 0, "u": 0, "u_t": 1, "u_x": 1, "u_tt": 2, "u_tx": 2, "u_xx": 2}
_FIRST = ("u_t", "u_x")
_SECOND = ("u_tt", "u_tx", "u_xx")


class JetOrderError(ValueError):
    """An operation would need jet coordinates beyond order two."""


def jet_order(e: Ratio) -> int:
    order = 0
    for v in e.variables():
        order = max(order, _ORDER.get(v, 0))
    return order


def total_dt(e: Ratio) -> Ratio:
    """D_t = d_t + u_t*d_u + u_tt*d_{u_t} + u_tx*d_{u_x}."""
    if jet_order(e) > 1:
        raise JetOrderError("total derivative of a second-order expression")
    return (
        e.diff("t")
        + var("u_t") * e.diff("u")
        + var("u_tt") * e.diff("u_t")
        + var("u_tx") * e.diff("u_x")
    )


def total_dx(e: Ratio) -> Ratio:
    """D_x = d_x + u_x*d_u + u_tx*d_{u_t} + u_xx*d_{u_x}."""
    if jet_order(e) > 1:
        raise JetOrderError("total derivative of a second-order expression")
    return (
        e.diff("x")
        + var("u_x") * e.diff("u")
        + var("u_tx") * e.diff("u_t")
        + var("u_xx") * e.diff("u_x")
    )


@dataclass(frozen=True)
class ProlongedField:
    """A field together with its five second-prolongation coefficients."""

    base: VectorField
    eta_t: Ratio
    eta_x: Ratio
    eta_tt: Ratio
    eta_tx: Ratio
    eta_xx: Ratio

    def coefficients(self) -> dict:
        return {
            "u_t": self.eta_t,
            "u_x": self.eta_x,
            "u_tt": self.eta_tt,
            "u_tx": self.eta_tx,
            "u_xx": self.eta_xx,
        }


def prolong2(q: VectorField) -> ProlongedField:
    tau, xi, eta = q.tau, q.xi, q.eta
    u_t, u_x = var("u_t"), var("u_x")
    u_tt, u_tx, u_xx = var("u_tt"), var("u_tx"), var("u_xx")
    eta_t = total_dt(eta) - u_t * total_dt(tau) - u_x * total_dt(xi)
    eta_x = total_dx(eta) - u_t * total_dx(tau) - u_x * total_dx(xi)
    eta_tt = total_dt(eta_t) - u_tt * total_dt(tau) - u_tx * total_dt(xi)
    eta_tx = total_dx(eta_t) - u_tt * total_dx(tau) - u_tx * total_dx(xi)
    eta_xx = total_dx(eta_x) - u_tx * total_dx(tau) - u_xx * total_dx(xi)
    return ProlongedField(q, eta_t, eta_x, eta_tt, eta_tx, eta_xx)


def pr_apply(p: ProlongedField, e: Ratio) -> Ratio:
    """Apply the prolonged field to a jet expression of order <= 2."""
    out = p.base.apply(e)
    for v, coeff in p.coefficients().items():
        if not coeff.is_zero():
            out = out + coeff * e.diff(v)
    return out


def substitute_jet(e: Ratio, v: str, r: Ratio) -> Ratio:
    """Replace the jet coordinate ``v`` by ``r`` (on-manifold restriction)."""
    if v not in JET_VARS:
        raise JetOrderError("%r is not a jet coordinate" % v)
    if jet_order(r) > 2:
        raise JetOrderError("replacement exceeds jet order two")
    if v in r.variables():
        raise JetOrderError("occurrence check failed: %r appears in the replacement" % v)
    return substitute_var(e, v, r)
