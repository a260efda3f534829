"""Floating-point evaluation and independent numeric adjudication.

Every symbolic verdict of the verification suite is cross-checked here.
The adjudication never evaluates an already-normalized zero (which would be
vacuous): identities are rebuilt as float combinations of catalog-level
component values and their partial derivatives, so a normalization bug in
the exact kernel shows up as a symbolic/numeric disagreement.  Symbolic
differentiation itself is validated separately against finite differences
(:func:`fd_derivative_check`).

Tolerances are scale-aware: a residual is compared against the largest
individual term of the combination that produced it, so large-coefficient
cancellations are judged fairly.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

from .expr import BASE_VARS, VARS, FuncSym, Ratio
from .jet import ProlongedField
from .vecfield import VectorField

__all__ = [
    "Inadmissible",
    "SamplePlan",
    "DEFAULT_SEED",
    "eval_ratio",
    "cross_check",
    "bracket_check_numeric",
    "annihilation_check_numeric",
    "fd_derivative_check",
    "solution_d2_numeric",
    "numeric_hodograph_check",
]

DEFAULT_SEED = 42


class Inadmissible(Exception):
    """The assignment violates a denominator or radicand constraint."""


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic sampling recipe for numeric checks."""

    seed: int = DEFAULT_SEED
    points: int = 20
    abs_tol: float = 1e-9
    rel_tol: float = 1e-6
    eps_rad: float = 1e-6
    eps_den: float = 1e-8
    budget_factor: int = 10
    var_range: float = 1.5
    wide_range: float = 3.5  # draws constrained by a radicand use this


def _rng_for(seed: int, label: str) -> random.Random:
    digest = hashlib.sha256(("%d:%s" % (seed, label)).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# ---------------------------------------------------------------------------
# assignments
# ---------------------------------------------------------------------------


def _requirements(exprs: Sequence[Ratio]):
    names: set = set()
    funcs: set = set()
    atoms: set = set()
    rad = None
    for e in exprs:
        names |= e.variables()
        funcs |= e.func_instances()
        atoms |= e.declared_atoms()
        r = e.rad_atom()
        if r is not None:
            if rad is not None and rad != r:
                raise Inadmissible("mixed radical atoms in one check")
            rad = r
    wide: set = set()
    if rad is not None:
        radicand = Ratio(dict(rad.radicand))
        wide |= radicand.variables()
        wide |= {a.name for a in radicand.declared_atoms()}
    return sorted(names), sorted(funcs), sorted(a.name for a in atoms), rad, wide


def _draw(rng: random.Random, reqs, plan: SamplePlan) -> dict:
    names, funcs, atoms, rad, wide = reqs
    asg: dict = {}
    for v in names:
        lim = plan.wide_range if v in wide else plan.var_range
        asg[v] = rng.uniform(-lim, lim)
    for f in funcs:
        asg[f] = rng.uniform(-plan.var_range, plan.var_range)
    for a in atoms:
        lim = plan.wide_range if a in wide else plan.var_range
        asg[("atom", a)] = rng.uniform(-lim, lim)
    asg[("radsign",)] = 1.0 if rng.random() < 0.5 else -1.0
    return asg


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _eval_poly(p: dict, asg: dict, plan: SamplePlan):
    """Return (value, scale): the sum and the largest |monomial| seen."""
    total = 0.0
    scale = 0.0
    for key, coeff in p.items():
        exp, vp, fs, ats, rd = key
        v = float(coeff)
        arg = 0.0
        for i in range(3):
            if exp[i]:
                arg += exp[i] * asg[BASE_VARS[i]]
        if arg:
            v *= math.exp(arg)
        for i, pw in enumerate(vp):
            if pw:
                v *= asg[VARS[i]] ** pw
        for f, pw in fs:
            v *= asg[f] ** pw
        for a, pw in ats:
            v *= asg[("atom", a.name)] ** pw
        if rd is not None:
            rv, _ = _eval_poly(rd.radicand, asg, plan)
            if rv < plan.eps_rad:
                raise Inadmissible("radicand %.3g below threshold" % rv)
            v *= asg[("radsign",)] * math.sqrt(rv)
        total += v
        scale = max(scale, abs(v))
    return total, scale


def eval_ratio(r: Ratio, asg: dict, plan: Optional[SamplePlan] = None) -> float:
    plan = plan or SamplePlan()
    nv, _ = _eval_poly(r.num, asg, plan)
    if r.is_poly():
        return nv
    dv, dscale = _eval_poly(r.den, asg, plan)
    if abs(dv) < plan.eps_den or abs(dv) < 1e-9 * dscale:
        raise Inadmissible("denominator %.3g below threshold" % dv)
    return nv / dv


def _eval_scaled(r: Ratio, asg: dict, plan: SamplePlan):
    """(value, magnitude): magnitude bounds the evaluation's term sizes.

    The magnitude carries the largest monomial met while evaluating, so a
    downstream residual can be judged against the conditioning of its own
    inputs instead of their cancelled values.
    """
    nv, ns = _eval_poly(r.num, asg, plan)
    if r.is_poly():
        return nv, max(ns, abs(nv))
    dv, ds = _eval_poly(r.den, asg, plan)
    if abs(dv) < plan.eps_den or abs(dv) < 1e-9 * ds:
        raise Inadmissible("denominator %.3g below threshold" % dv)
    val = nv / dv
    return val, (ns + abs(val) * ds) / abs(dv)


def _scaled_residual(r: Ratio, asg: dict, plan: SamplePlan) -> float:
    """|numerator| relative to its own largest monomial (zero-test metric)."""
    if r.is_zero():
        return 0.0
    if not r.is_poly():
        dv, dscale = _eval_poly(r.den, asg, plan)
        if abs(dv) < plan.eps_den or abs(dv) < 1e-9 * dscale:
            raise Inadmissible("denominator below threshold")
    nv, nscale = _eval_poly(r.num, asg, plan)
    return abs(nv) / max(1.0, nscale)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


def _verdict(sampler: Callable[[random.Random], float], plan: SamplePlan, label: str) -> str:
    """Run the point loop: 'zero' | 'nonzero' | 'inadmissible'.

    ``sampler`` draws one admissible point and returns the scaled residual;
    it raises :class:`Inadmissible` to request a resample.
    """
    rng = _rng_for(plan.seed, label)
    good = 0
    tries = 0
    max_tries = plan.budget_factor * plan.points
    worst = 0.0
    while good < plan.points and tries < max_tries:
        tries += 1
        try:
            s = sampler(rng)
        except Inadmissible:
            continue
        except (OverflowError, ZeroDivisionError):
            continue
        good += 1
        worst = max(worst, s)
        if s > plan.rel_tol:
            return "nonzero"
    if good < plan.points:
        return "inadmissible"
    if worst < plan.abs_tol:
        return "zero"
    return "inadmissible"  # gray zone: neither clearly zero nor nonzero


def cross_check(exprs, plan: Optional[SamplePlan] = None, label: str = "") -> str:
    """Adjudicate whether the given expression(s) vanish identically."""
    if isinstance(exprs, Ratio):
        exprs = [exprs]
    exprs = list(exprs)
    plan = plan or SamplePlan()
    if all(e.is_zero() for e in exprs):
        return "zero"
    reqs = _requirements(exprs)

    def sampler(rng: random.Random) -> float:
        asg = _draw(rng, reqs, plan)
        return max(_scaled_residual(e, asg, plan) for e in exprs)

    return _verdict(sampler, plan, "cross:" + label)


# ---------------------------------------------------------------------------
# independent combinations (floats over component values and partials)
# ---------------------------------------------------------------------------


class _FieldEvaluator:
    """Component values and symbolic partials of one vector field."""

    def __init__(self, vf: VectorField):
        self.comps = vf.components()
        self.partials = [[c.diff(v) for v in BASE_VARS] for c in self.comps]

    def exprs(self):
        out = list(self.comps)
        for row in self.partials:
            out.extend(row)
        return out


# keyed by id with a strong reference to the field, so ids cannot be recycled
_EVALUATOR_CACHE: dict = {}


def _field_evaluator(vf: VectorField) -> _FieldEvaluator:
    entry = _EVALUATOR_CACHE.get(id(vf))
    if entry is not None and entry[0] is vf:
        return entry[1]
    ev = _FieldEvaluator(vf)
    if len(_EVALUATOR_CACHE) > 4096:
        _EVALUATOR_CACHE.clear()
    _EVALUATOR_CACHE[id(vf)] = (vf, ev)
    return ev


def bracket_check_numeric(
    q: VectorField,
    p: VectorField,
    coeff,
    expected: Optional[VectorField],
    plan: SamplePlan,
    label: str,
) -> str:
    """Evaluate ``[q, p] - coeff*expected`` as a float combination.

    The bracket is reassembled numerically from component values and their
    symbolic partial derivatives; no symbolic cancellation is trusted.
    """
    qe, pe = _field_evaluator(q), _field_evaluator(p)
    pool = qe.exprs() + pe.exprs()
    ee = None
    cf = float(coeff)
    if expected is not None and cf:
        ee = _field_evaluator(expected)
        pool += list(ee.comps)
    reqs = _requirements([e for e in pool if not e.is_zero()] or [q.tau])

    def sampler(rng: random.Random) -> float:
        asg = _draw(rng, reqs, plan)
        worst = 0.0
        for i in range(3):
            terms = []
            mags = []
            for j in range(3):
                qj, qm = _eval_scaled(qe.comps[j], asg, plan)
                pj, pm = _eval_scaled(pe.comps[j], asg, plan)
                if not pe.partials[i][j].is_zero():
                    dv, dm = _eval_scaled(pe.partials[i][j], asg, plan)
                    terms.append(qj * dv)
                    mags.append(qm * dm)
                if not qe.partials[i][j].is_zero():
                    dv, dm = _eval_scaled(qe.partials[i][j], asg, plan)
                    terms.append(-pj * dv)
                    mags.append(pm * dm)
            if ee is not None and not ee.comps[i].is_zero():
                ev, em = _eval_scaled(ee.comps[i], asg, plan)
                terms.append(-cf * ev)
                mags.append(abs(cf) * em)
            if not terms:
                continue
            resid = abs(math.fsum(terms))
            worst = max(worst, resid / max(1.0, max(mags)))
        return worst

    return _verdict(sampler, plan, "bracket:" + label)


def annihilation_check_numeric(
    pr: ProlongedField,
    arg: Ratio,
    plan: SamplePlan,
    label: str,
    constraint: Optional[Callable[[dict], None]] = None,
) -> str:
    """Evaluate ``pr(arg)`` as a float combination of coefficients and partials.

    ``constraint`` may rewrite the assignment first (on-manifold checks pin
    one jet coordinate to the equation's right-hand side).
    """
    coeffs = {"t": pr.base.tau, "x": pr.base.xi, "u": pr.base.eta}
    coeffs.update(pr.coefficients())
    partials = {v: arg.diff(v) for v in coeffs}
    pool = [c for c in coeffs.values() if not c.is_zero()]
    pool += [d for d in partials.values() if not d.is_zero()]
    pool.append(arg)
    reqs = _requirements(pool)

    def sampler(rng: random.Random) -> float:
        asg = _draw(rng, reqs, plan)
        if constraint is not None:
            constraint(asg)
        terms = []
        mags = []
        for v, c in coeffs.items():
            if c.is_zero() or partials[v].is_zero():
                continue
            cv, cm = _eval_scaled(c, asg, plan)
            dv, dm = _eval_scaled(partials[v], asg, plan)
            terms.append(cv * dv)
            mags.append(cm * dm)
        if not terms:
            return 0.0
        resid = abs(math.fsum(terms))
        return resid / max(1.0, max(mags))

    return _verdict(sampler, plan, "annihilation:" + label)


def difference_check_numeric(a: Ratio, b: Ratio, plan: SamplePlan, label: str) -> str:
    """Adjudicate ``a == b`` by evaluating both sides independently."""
    reqs = _requirements([a, b])

    def sampler(rng: random.Random) -> float:
        asg = _draw(rng, reqs, plan)
        av, am = _eval_scaled(a, asg, plan)
        bv, bm = _eval_scaled(b, asg, plan)
        return abs(av - bv) / max(1.0, am, bm)

    return _verdict(sampler, plan, "diff:" + label)


# ---------------------------------------------------------------------------
# finite-difference validation of symbolic differentiation
# ---------------------------------------------------------------------------


def fd_derivative_check(
    e: Ratio, v: str, plan: Optional[SamplePlan] = None, h: float = 1e-5, rel: float = 1e-5
) -> bool:
    """Central difference versus the symbolic derivative at plan points.

    Function symbols are interpreted as random polynomials so their sampled
    values respond consistently to shifting the argument; stencil points
    stay well clear of radicand and denominator boundaries, where the
    truncation error explodes.
    """
    plan = plan or SamplePlan(points=10)
    fd_plan = replace(plan, eps_rad=max(plan.eps_rad, 1e-2), eps_den=max(plan.eps_den, 1e-4))
    sym = e.diff(v)
    reqs = _requirements([e, sym])
    funcs = reqs[1]
    families: dict = {}
    for f in funcs:
        key = (f.name, f.arg)
        families[key] = max(families.get(key, 0), f.order)
    rng = _rng_for(plan.seed, "fd:%s:%s" % (v, e))

    def interpret(asg: dict) -> None:
        # p(z) = sum c_j z^j, so p^(k)(z) = sum_{j>=k} c_j * j!/(j-k)! * z^(j-k)
        for (name, arg), maxod in families.items():
            cs = coeffs[(name, arg)]
            z = asg[arg]
            for k in range(maxod + 1):
                val = 0.0
                for j in range(k, len(cs)):
                    fall = 1.0
                    for i in range(j, j - k, -1):
                        fall *= i
                    val += cs[j] * fall * z ** (j - k)
                asg[FuncSym(name, arg, k)] = val

    good = 0
    tries = 0
    while good < plan.points and tries < plan.budget_factor * plan.points:
        tries += 1
        coeffs = {
            key: [rng.uniform(-1.0, 1.0) for _ in range(maxod + 3)]
            for key, maxod in families.items()
        }
        asg = _draw(rng, reqs, fd_plan)
        try:
            interpret(asg)
            up = dict(asg)
            up[v] = asg.get(v, 0.0) + h
            dn = dict(asg)
            dn[v] = asg.get(v, 0.0) - h
            interpret(up)
            interpret(dn)
            fd = (eval_ratio(e, up, fd_plan) - eval_ratio(e, dn, fd_plan)) / (2 * h)
            sv = eval_ratio(sym, asg, fd_plan)
        except (Inadmissible, OverflowError):
            continue
        good += 1
        if abs(fd - sv) > rel * max(1.0, abs(fd), abs(sv)):
            return False
    return good == plan.points


# ---------------------------------------------------------------------------
# closed-form solution spot checks (fully concrete, no kernel involved)
# ---------------------------------------------------------------------------


def solution_d2_numeric(lam, plan: Optional[SamplePlan] = None) -> bool:
    """Check u = ln(g'/(h - lam*g)) against u_tx = lam*u_t*e^u numerically.

    Uses g(x) = x^3 + x and h(t) = t^2 + 3 shifted to keep the logarithm
    argument positive; derivatives are the hand closed forms, so the check
    is independent of the symbolic pipeline.
    """
    plan = plan or SamplePlan()
    lamf = float(lam)
    rng = _rng_for(plan.seed, "d2:%s" % lam)
    good = 0
    tries = 0
    while good < plan.points and tries < plan.budget_factor * plan.points:
        tries += 1
        t = rng.uniform(-plan.var_range, plan.var_range)
        x = rng.uniform(-plan.var_range, plan.var_range)
        g = x**3 + x
        g1 = 3 * x**2 + 1
        g2 = 6 * x
        h = t**2 + 30.0 if lamf > 0 else t**2 + 3.0
        h1 = 2 * t
        w = h - lamf * g
        if abs(w) < 1e-3 or g1 / w <= 1e-6:
            continue
        good += 1
        u_t = -h1 / w
        u_x = g2 / g1 + lamf * g1 / w
        u_tx = -lamf * h1 * g1 / (w * w)
        e_u = g1 / w  # exp(u) for u = ln(g'/w)
        resid = u_tx - lamf * u_t * e_u
        scale = max(abs(u_tx), abs(lamf * u_t * e_u), 1.0)
        if abs(resid) / scale > plan.abs_tol:
            return False
    return good == plan.points


def _hodograph_profile(s: float, y: float, lam_shift: float) -> float:
    # v(s, y) = ln(2 f'(s)) - 2 ln(f(s) + y) solves v_sy = exp(v)
    f = s**3 / 3.0 + s + lam_shift
    return math.log(2.0 * (s * s + 1.0)) - 2.0 * math.log(f + y)


def numeric_hodograph_check(lam, plan: Optional[SamplePlan] = None, rel: float = 1e-4) -> bool:
    """Spot-check that swapping x and u maps the exponential-profile solution
    onto ``u_t*u_xx - u_x*u_tx = lam*e^x*u_x^3``.

    A solution of ``v_sy = e^v`` is transplanted via ``x = v(lam*t, u)``;
    ``u(t, x)`` is recovered by numeric inversion (bisection) and its jet is
    estimated by finite differences, so nothing symbolic is reused.
    """
    plan = plan or SamplePlan(points=10)
    lamf = float(lam)
    if lamf == 0:
        raise ValueError("lambda must be nonzero")
    shift = 15.0  # keeps f(s) + y positive over the sampled box
    rng = _rng_for(plan.seed, "hodograph:%s" % lam)

    def u_of(t: float, x: float) -> float:
        s = lamf * t
        lo, hi = -2.5, 2.5
        flo = _hodograph_profile(s, lo, shift) - x
        fhi = _hodograph_profile(s, hi, shift) - x
        if flo * fhi > 0:
            raise Inadmissible("inversion bracket failed")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = _hodograph_profile(s, mid, shift) - x
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
            if hi - lo < 1e-15:
                break
        return 0.5 * (lo + hi)

    good = 0
    tries = 0
    h = 3e-4
    while good < plan.points and tries < plan.budget_factor * plan.points:
        tries += 1
        t = rng.uniform(-plan.var_range, plan.var_range)
        u_true = rng.uniform(-1.2, 1.2)
        x = _hodograph_profile(lamf * t, u_true, shift)
        try:
            upp = u_of(t + h, x + h)
            upm = u_of(t + h, x - h)
            ump = u_of(t - h, x + h)
            umm = u_of(t - h, x - h)
            uxp = u_of(t, x + h)
            uxm = u_of(t, x - h)
            u00 = u_of(t, x)
            utp = u_of(t + h, x)
            utm = u_of(t - h, x)
        except Inadmissible:
            continue
        good += 1
        u_t = (utp - utm) / (2 * h)
        u_x = (uxp - uxm) / (2 * h)
        u_xx = (uxp - 2 * u00 + uxm) / (h * h)
        u_tx = (upp - upm - ump + umm) / (4 * h * h)
        lhs = u_t * u_xx - u_x * u_tx
        rhs = lamf * math.exp(x) * u_x**3
        scale = max(abs(u_t * u_xx), abs(u_x * u_tx), abs(rhs), 1e-30)
        if abs(lhs - rhs) / scale > rel:
            return False
    return good == plan.points
