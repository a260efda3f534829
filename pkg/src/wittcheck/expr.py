"""Exact-arithmetic scalar kernel with canonical normal forms.

A scalar (:class:`Ratio`) is a quotient of two multivariate "polynomials"
over a fixed generator set:

* one exponential atom ``exp(a*t + b*x + c*u)`` with integer exponent
  vector ``(a, b, c)`` (multiplicative, Laurent-style),
* bare variables ``t, x, u`` and the jet coordinates
  ``u_t, u_x, u_tt, u_tx, u_xx`` with non-negative integer powers,
* formal function symbols such as ``phi(u)`` or ``g''(x)`` whose only
  interpreted property is that differentiation raises the tick count,
* declared atoms carrying a fixed table of partial derivatives,
* at most one live square-root atom ``rad`` whose square rewrites to its
  radicand (so every normal form is linear in ``rad``).

Coefficients are exact rationals (``gmpy2.mpq``); the kernel never touches
floating point, so zero tests are exact.  Equality of two ratios is decided
by cross-multiplication.  All values are immutable after construction.
"""

from __future__ import annotations

from typing import Callable, Iterable, NamedTuple, Optional, Union

from gmpy2 import mpq

__all__ = [
    "BASE_VARS",
    "JET_VARS",
    "VARS",
    "ExprError",
    "DomainError",
    "FuncSym",
    "DeclaredAtom",
    "RadAtom",
    "Ratio",
    "con",
    "var",
    "exp_lin",
    "fsym",
    "datom",
    "radical",
    "rename_vars",
    "substitute_funcsym",
    "substitute_var",
]

BASE_VARS = ("t", "x", "u")
JET_VARS = ("u_t", "u_x", "u_tt", "u_tx", "u_xx")
VARS = BASE_VARS + JET_VARS
_VIDX = {v: i for i, v in enumerate(VARS)}
_NVARS = len(VARS)
_ZEROPOW = (0,) * _NVARS

_Q0 = mpq(0)
_Q1 = mpq(1)

Scalar = Union[int, mpq]


class ExprError(Exception):
    """Base error of the expression kernel."""


class DomainError(ExprError):
    """Division by zero, incompatible radicals, or an invalid operation."""


class FuncSym(NamedTuple):
    """Formal function symbol: name, argument variable, derivative order.

    Differentiation with respect to the argument raises ``order`` by one;
    differentiation with respect to any other variable gives zero.
    """

    name: str
    arg: str
    order: int = 0

    def tick(self) -> "FuncSym":
        return FuncSym(self.name, self.arg, self.order + 1)

    def __str__(self) -> str:
        return "%s%s(%s)" % (self.name, "'" * self.order, self.arg)


class DeclaredAtom:
    """Opaque generator with a fixed derivative table.

    The table maps each base variable to a :class:`Ratio`; missing entries
    mean the derivative is zero (jet variables always differentiate to
    zero).  The table is fixed at declaration and may reference only
    generators that already exist.
    """

    __slots__ = ("name", "_partials")

    def __init__(self, name: str, partials: Optional[dict] = None):
        self.name = name
        self._partials = dict(partials) if partials else {}

    def partial(self, v: str) -> Optional["Ratio"]:
        return self._partials.get(v)

    def is_constant(self) -> bool:
        return all(r.is_zero() for r in self._partials.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, DeclaredAtom) and other.name == self.name

    def __lt__(self, other) -> bool:
        return self.name < other.name

    def __hash__(self) -> int:
        return hash(("atom", self.name))

    def __repr__(self) -> str:
        return "DeclaredAtom(%r)" % self.name


class RadAtom:
    """Square-root atom ``rad`` with ``rad**2`` rewriting to its radicand.

    The radicand is a rad-free polynomial fixed at construction.  Only one
    radical atom may be live in any expression; mixing two different ones
    is a :class:`DomainError`.
    """

    __slots__ = ("name", "radicand", "_hash")

    def __init__(self, radicand: "Ratio", name: str = "rad"):
        if not radicand.is_poly():
            raise DomainError("radicand must be polynomial")
        if any(k[4] is not None for k in radicand.num):
            raise DomainError("radicand may not contain a radical")
        self.name = name
        self.radicand = radicand.num  # poly dict
        self._hash = hash((name, _poly_freeze(radicand.num)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RadAtom)
            and other.name == self.name
            and other.radicand == self.radicand
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "RadAtom(%s)" % _poly_str(self.radicand)


# ---------------------------------------------------------------------------
# monomial keys
#
# key = (exp, vp, fs, ats, rd)
#   exp: (a, b, c) integer exponent vector of exp(a*t + b*x + c*u)
#   vp:  8-tuple of non-negative powers, one slot per entry of VARS
#   fs:  sorted tuple of (FuncSym, power >= 1)
#   ats: sorted tuple of (DeclaredAtom, power >= 1)
#   rd:  None or the RadAtom (power is always exactly 1)
# ---------------------------------------------------------------------------

KEY_ONE = ((0, 0, 0), _ZEROPOW, (), (), None)


def _merge_pows(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, v in b:
        n = d.get(k, 0) + v
        if n:
            d[k] = n
        else:
            del d[k]
    return tuple(sorted(d.items()))


def _key_sort(key) -> tuple:
    exp, vp, fs, ats, rd = key
    return (
        exp,
        vp,
        tuple((f.name, f.arg, f.order, p) for f, p in fs),
        tuple((a.name, p) for a, p in ats),
        0 if rd is None else 1,
    )


def _shared_rad(p: dict, q: dict) -> Optional[RadAtom]:
    rad = None
    for poly in (p, q):
        for key in poly:
            rd = key[4]
            if rd is not None:
                if rad is None:
                    rad = rd
                elif rad != rd:
                    raise DomainError("two distinct radical atoms in one expression")
    return rad


def _poly_freeze(p: dict) -> tuple:
    return tuple(sorted(((_key_sort(k), str(c)) for k, c in p.items())))


# ---------------------------------------------------------------------------
# polynomial arithmetic on plain dicts {key: mpq}
# ---------------------------------------------------------------------------


def _p_add_into(out: dict, p: dict, c: Scalar = 1) -> None:
    for k, v in p.items():
        n = out.get(k, _Q0) + c * v
        if n:
            out[k] = n
        else:
            out.pop(k, None)


def _p_add(p: dict, q: dict) -> dict:
    out = dict(p)
    _p_add_into(out, q)
    return out


def _p_neg(p: dict) -> dict:
    return {k: -v for k, v in p.items()}


def _p_scale(p: dict, c: Scalar) -> dict:
    if not c:
        return {}
    return {k: c * v for k, v in p.items()}


def _p_mul_monomial(p: dict, key, coeff: Scalar, out: dict) -> None:
    # free multiplication; caller guarantees no rad**2 can occur
    exp2, vp2, fs2, ats2, rd2 = key
    for k, v in p.items():
        exp1, vp1, fs1, ats1, rd1 = k
        if rd1 is not None and rd2 is not None:
            raise DomainError("internal: rad collision in monomial product")
        nk = (
            (exp1[0] + exp2[0], exp1[1] + exp2[1], exp1[2] + exp2[2]),
            tuple(a + b for a, b in zip(vp1, vp2)),
            _merge_pows(fs1, fs2),
            _merge_pows(ats1, ats2),
            rd1 if rd1 is not None else rd2,
        )
        n = out.get(nk, _Q0) + coeff * v
        if n:
            out[nk] = n
        else:
            out.pop(nk, None)


def _p_mul(p: dict, q: dict) -> dict:
    if not p or not q:
        return {}
    rad = _shared_rad(p, q)
    out: dict = {}
    for k1, c1 in p.items():
        exp1, vp1, fs1, ats1, rd1 = k1
        for k2, c2 in q.items():
            exp2, vp2, fs2, ats2, rd2 = k2
            c = c1 * c2
            nk = (
                (exp1[0] + exp2[0], exp1[1] + exp2[1], exp1[2] + exp2[2]),
                tuple(a + b for a, b in zip(vp1, vp2)),
                _merge_pows(fs1, fs2),
                _merge_pows(ats1, ats2),
                None,
            )
            if rd1 is not None and rd2 is not None:
                # rad**2 -> radicand: fold the radicand into this term
                _p_mul_monomial(rad.radicand, nk, c, out)
                continue
            rd = rd1 if rd1 is not None else rd2
            if rd is not None:
                nk = (nk[0], nk[1], nk[2], nk[3], rd)
            n = out.get(nk, _Q0) + c
            if n:
                out[nk] = n
            else:
                out.pop(nk, None)
    return out


def _p_pow(p: dict, k: int) -> dict:
    if k < 0:
        raise DomainError("negative polynomial power")
    result = {KEY_ONE: _Q1}
    base = p
    while k:
        if k & 1:
            result = _p_mul(result, base)
        k >>= 1
        if k:
            base = _p_mul(base, base)
    return result


def _p_conjugate(p: dict) -> dict:
    """Flip the sign of every rad-bearing monomial."""
    return {k: (-v if k[4] is not None else v) for k, v in p.items()}


def _p_rad_split(p: dict) -> tuple[dict, dict]:
    """Split into (rad-free part, rad coefficient part with rad stripped)."""
    a: dict = {}
    b: dict = {}
    for k, v in p.items():
        if k[4] is None:
            a[k] = v
        else:
            b[(k[0], k[1], k[2], k[3], None)] = v
    return a, b


# ---------------------------------------------------------------------------
# exact division (probe): returns the quotient poly or None
# ---------------------------------------------------------------------------


def _division_frame(polys: Iterable[dict]):
    """Collect every funcsym/atom instance to get a fixed exponent frame."""
    fsyms: dict = {}
    atoms: dict = {}
    for p in polys:
        for key in p:
            for f, _ in key[2]:
                fsyms.setdefault(f, None)
            for a, _ in key[3]:
                atoms.setdefault(a, None)
    fs_list = sorted(fsyms)
    at_list = sorted(atoms)
    fs_idx = {f: i for i, f in enumerate(fs_list)}
    at_idx = {a: i for i, a in enumerate(at_list)}

    nf, na = len(fs_list), len(at_list)

    def vec(key):
        exp, vp, fs, ats, rd = key
        fv = [0] * nf
        for f, p in fs:
            fv[fs_idx[f]] = p
        av = [0] * na
        for a, p in ats:
            av[at_idx[a]] = p
        return exp + vp + tuple(fv) + tuple(av) + (0 if rd is None else 1,)

    def unvec(v, rad_atom):
        exp = v[:3]
        vp = v[3 : 3 + _NVARS]
        fs = tuple((fs_list[i], v[3 + _NVARS + i]) for i in range(nf) if v[3 + _NVARS + i])
        ats = tuple(
            (at_list[i], v[3 + _NVARS + nf + i]) for i in range(na) if v[3 + _NVARS + nf + i]
        )
        rd = rad_atom if v[-1] else None
        return (exp, vp, fs, ats, rd)

    return vec, unvec


def _p_exact_div_free(num: dict, den: dict, max_steps: int) -> Optional[dict]:
    """Exact division in the free (rad-free divisor) setting.

    The dividend may carry rad monomials; since the divisor is rad-free the
    rad flag behaves as an ordinary 0/1 exponent.  Exponential exponents are
    Laurent (always divisible); all other slots require componentwise >=.
    ``max_steps`` bounds the quotient term count; an exhausted budget means
    "treat as not divisible", which is always safe.
    """
    if not num:
        return {}
    vec, unvec = _division_frame((num, den))
    rad_atom = None
    for k in num:
        if k[4] is not None:
            rad_atom = k[4]
            break
    nvec = {vec(k): c for k, c in num.items()}
    dvec = {vec(k): c for k, c in den.items()}
    dlt = max(dvec)
    dc = dvec[dlt]
    nfree = 3  # leading Laurent block (exp exponents)
    quotient: dict = {}
    rem = dict(nvec)
    while rem:
        max_steps -= 1
        if max_steps < 0:
            return None
        rlt = max(rem)
        qv = tuple(a - b for a, b in zip(rlt, dlt))
        if any(e < 0 for e in qv[nfree:]):
            return None
        qc = rem[rlt] / dc
        quotient[qv] = qc
        for dv, dcf in dvec.items():
            kv = tuple(a + b for a, b in zip(qv, dv))
            if kv[-1] > 1:
                return None  # would need rad**2: not a free product
            n = rem.get(kv, _Q0) - qc * dcf
            if n:
                rem[kv] = n
            else:
                rem.pop(kv, None)
    return {unvec(v, rad_atom): c for v, c in quotient.items()}


def _p_exact_div(
    num: dict, den: dict, max_steps: Optional[int] = None, cheap: bool = True
) -> Optional[dict]:
    """Exact division probe in the quotient ring (rad**2 = radicand).

    With ``cheap=True`` the probe refuses work whose setup cost alone would
    rival a full multiplication (big rad-bearing divisors); a ``None`` from
    an exhausted budget simply means "keep the fraction unreduced".
    """
    if not den:
        raise DomainError("division by zero polynomial")
    if not num:
        return {}
    if max_steps is None:
        max_steps = 2 * (len(num) // max(1, len(den)) + 1) + 48
    try:
        _shared_rad(num, den)
    except DomainError:
        return None
    den_has_rad = any(k[4] is not None for k in den)
    if not den_has_rad:
        return _p_exact_div_free(num, den, max_steps)
    if cheap and (len(num) + len(den)) ** 2 > 40000:
        return None
    # conjugate trick: num/den = num*conj(den) / (den*conj(den)), the latter
    # being rad-free because rad**2 rewrites to the radicand
    conj = _p_conjugate(den)
    rho = _p_mul(den, conj)
    if any(k[4] is not None for k in rho):
        raise DomainError("internal: conjugate product kept a radical")
    lifted = _p_mul(num, conj)
    return _p_exact_div_free(lifted, rho, max_steps)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def _exp_str(exp) -> str:
    parts = []
    for coef, name in zip(exp, BASE_VARS):
        if not coef:
            continue
        if coef == 1:
            term = name
        elif coef == -1:
            term = "-" + name
        else:
            term = "%d*%s" % (coef, name)
        if parts and not term.startswith("-"):
            parts.append("+" + term)
        else:
            parts.append(term)
    return "exp(%s)" % "".join(parts)


def _coeff_str(c) -> str:
    return str(c)  # mpq prints as "p" or "p/q"


def _monomial_str(key, coeff) -> tuple[bool, str]:
    """Return (negative, body) for one monomial."""
    exp, vp, fs, ats, rd = key
    factors = []
    if any(exp):
        factors.append(_exp_str(exp))
    for i, p in enumerate(vp):
        if p == 1:
            factors.append(VARS[i])
        elif p:
            factors.append("%s^%d" % (VARS[i], p))
    for f, p in fs:
        factors.append(str(f) if p == 1 else "%s^%d" % (f, p))
    for a, p in ats:
        factors.append(a.name if p == 1 else "%s^%d" % (a.name, p))
    if rd is not None:
        factors.append(rd.name)
    neg = coeff < 0
    mag = -coeff if neg else coeff
    if not factors:
        return neg, _coeff_str(mag)
    if mag == 1:
        return neg, "*".join(factors)
    return neg, "%s*%s" % (_coeff_str(mag), "*".join(factors))


def _poly_str(p: dict) -> str:
    if not p:
        return "0"
    keys = sorted(p, key=_key_sort, reverse=True)
    out = []
    for i, k in enumerate(keys):
        neg, body = _monomial_str(k, p[k])
        if i == 0:
            out.append("-" + body if neg else body)
        else:
            out.append(" - " + body if neg else " + " + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# Ratio
# ---------------------------------------------------------------------------


def _normalize(num: dict, den: dict) -> tuple[dict, dict]:
    if not den:
        raise DomainError("division by zero")
    if not num:
        return {}, {KEY_ONE: _Q1}
    _shared_rad(num, den)  # consistency check

    # pull the exponential content out of the denominator (always invertible)
    mins = [min(k[0][i] for k in den) for i in range(3)]
    if any(mins):
        shift = (-mins[0], -mins[1], -mins[2])
        skey = (shift, _ZEROPOW, (), (), None)
        nnum: dict = {}
        nden: dict = {}
        _p_mul_monomial(num, skey, _Q1, nnum)
        _p_mul_monomial(den, skey, _Q1, nden)
        num, den = nnum, nden

    if len(den) == 1:
        ((dkey, dc),) = den.items()
        if dkey == KEY_ONE:
            if dc != 1:
                num = _p_scale(num, 1 / dc)
            return num, {KEY_ONE: _Q1}
        q = _p_exact_div(num, den, 4 * len(num) + 64)
        if q is not None:
            return q, {KEY_ONE: _Q1}
        if dc != 1:
            num = _p_scale(num, 1 / dc)
            den = {dkey: _Q1}
        return num, den

    # make the leading denominator coefficient 1 for a reproducible form
    dlt = max(den, key=_key_sort)
    dc = den[dlt]
    if dc != 1:
        num = _p_scale(num, 1 / dc)
        den = _p_scale(den, 1 / dc)
    if len(num) * len(den) <= 20000:
        q = _p_exact_div(num, den, 4 * len(num) + 64)
        if q is not None:
            return q, {KEY_ONE: _Q1}
    return num, den


class Ratio:
    """Canonical quotient of two kernel polynomials.

    Zero is uniquely the empty numerator over 1.  Construction normalizes:
    exponential content and the leading rational coefficient are pulled out
    of the denominator, and an exact-division probe collapses quotients that
    are in fact polynomial (so ``a / a`` is literally ``1``).  There is no
    general gcd; equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: Optional[dict] = None, _raw: bool = False):
        if den is None:
            den = {KEY_ONE: _Q1}
        if not _raw:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_poly(self) -> bool:
        return self.den == {KEY_ONE: _Q1}

    def is_constant(self) -> bool:
        return self.is_zero() or (self.is_poly() and set(self.num) == {KEY_ONE})

    def as_constant(self) -> mpq:
        if self.is_zero():
            return _Q0
        if not self.is_constant():
            raise DomainError("not a constant")
        return self.num[KEY_ONE]

    def variables(self) -> set:
        """Names of bare variables occurring anywhere (incl. exponents/args)."""
        out: set = set()
        for poly in (self.num, self.den):
            for key in poly:
                exp, vp, fs, ats, rd = key
                for i, c in enumerate(exp):
                    if c:
                        out.add(BASE_VARS[i])
                for i, p in enumerate(vp):
                    if p:
                        out.add(VARS[i])
                for f, _ in fs:
                    out.add(f.arg)
                if rd is not None:
                    out |= Ratio(rd.radicand).variables()
        return out

    def rad_atom(self) -> Optional[RadAtom]:
        return _shared_rad(self.num, self.den)

    def func_instances(self) -> set:
        out: set = set()
        for poly in (self.num, self.den):
            for key in poly:
                for f, _ in key[2]:
                    out.add(f)
                rd = key[4]
                if rd is not None:
                    out |= Ratio(rd.radicand).func_instances()
        return out

    def declared_atoms(self) -> set:
        out: set = set()
        for poly in (self.num, self.den):
            for key in poly:
                for a, _ in key[3]:
                    out.add(a)
                rd = key[4]
                if rd is not None:
                    out |= Ratio(rd.radicand).declared_atoms()
        return out

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> Optional["Ratio"]:
        if isinstance(other, Ratio):
            return other
        if isinstance(other, (int, type(_Q1))):
            return con(other)
        return None

    def __add__(self, other) -> "Ratio":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return Ratio(_p_add(self.num, o.num), dict(self.den))
        # cheap relative-divisibility probes keep chained sums small
        q = _p_exact_div(o.den, self.den)
        if q is not None:
            return Ratio(_p_add(_p_mul(self.num, q), o.num), dict(o.den))
        q = _p_exact_div(self.den, o.den)
        if q is not None:
            return Ratio(_p_add(self.num, _p_mul(o.num, q)), dict(self.den))
        return Ratio(
            _p_add(_p_mul(self.num, o.den), _p_mul(o.num, self.den)),
            _p_mul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self) -> "Ratio":
        return Ratio(_p_neg(self.num), dict(self.den), _raw=True)

    def __sub__(self, other) -> "Ratio":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Ratio":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> "Ratio":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n1, d1, n2, d2 = self.num, self.den, o.num, o.den
        # cross-cancellation probes
        if d2 != {KEY_ONE: _Q1}:
            q = _p_exact_div(n1, d2)
            if q is not None:
                n1, d2 = q, {KEY_ONE: _Q1}
        if d1 != {KEY_ONE: _Q1}:
            q = _p_exact_div(n2, d1)
            if q is not None:
                n2, d1 = q, {KEY_ONE: _Q1}
        return Ratio(_p_mul(n1, n2), _p_mul(d1, d2))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Ratio":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DomainError("division by zero ratio")
        return self * Ratio(dict(o.den), dict(o.num))

    def __rtruediv__(self, other) -> "Ratio":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int) -> "Ratio":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_zero():
                raise DomainError("zero to a negative power")
            return Ratio(_p_pow(self.den, -k), _p_pow(self.num, -k))
        return Ratio(_p_pow(self.num, k), _p_pow(self.den, k))

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.num == o.num and self.den == o.den:
            return True
        return not _p_add(_p_mul(self.num, o.den), _p_neg(_p_mul(o.num, self.den)))

    __hash__ = None  # equality is semantic, not structural

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __str__(self) -> str:
        if self.is_poly():
            return _poly_str(self.num)
        return "(%s)/(%s)" % (_poly_str(self.num), _poly_str(self.den))

    def __repr__(self) -> str:
        return "Ratio(%s)" % self

    # -- calculus ------------------------------------------------------------

    def diff(self, v: str) -> "Ratio":
        if v not in _VIDX:
            raise DomainError("unknown variable %r" % v)
        dn = _poly_diff(self.num, v)
        if self.is_poly():
            return dn
        dd = _poly_diff(self.den, v)
        den_r = Ratio(dict(self.den), _raw=True)
        num_r = Ratio(dict(self.num), _raw=True)
        return (dn * den_r - num_r * dd) / (den_r * den_r)

    def cancel_factor(self, factor: "Ratio") -> "Ratio":
        """Divide numerator and denominator by ``factor`` while both divide.

        Pure representation maintenance for recursions whose denominators
        are powers of a known polynomial; the value never changes.
        """
        if not factor.is_poly():
            raise DomainError("cancel_factor needs a polynomial factor")
        f = factor.num
        num, den = self.num, self.den
        changed = False
        while True:
            qd = _p_exact_div(den, f, 8 * len(den) + 256, cheap=False)
            if qd is None or not qd:
                break
            qn = _p_exact_div(num, f, 8 * len(num) + 256, cheap=False)
            if qn is None:
                break
            num, den, changed = qn, qd, True
        if not changed:
            return self
        return Ratio(num, den)


# ---------------------------------------------------------------------------
# differentiation of a bare polynomial (returns a Ratio: the radical rule
# introduces the radicand in a denominator)
# ---------------------------------------------------------------------------


def _poly_diff(p: dict, v: str) -> Ratio:
    vi = _VIDX[v]
    base: dict = {}
    radnum: dict = {}  # rad-monomials waiting for the radicand chain rule
    extra: Optional[Ratio] = None
    rad_atom: Optional[RadAtom] = None
    for key, c in p.items():
        exp, vp, fs, ats, rd = key
        if vi < 3 and exp[vi]:
            n = base.get(key, _Q0) + c * exp[vi]
            if n:
                base[key] = n
            else:
                base.pop(key, None)
        if vp[vi]:
            nvp = list(vp)
            nvp[vi] -= 1
            nk = (exp, tuple(nvp), fs, ats, rd)
            n = base.get(nk, _Q0) + c * vp[vi]
            if n:
                base[nk] = n
            else:
                base.pop(nk, None)
        for f, pw in fs:
            if f.arg != v:
                continue
            rest = tuple((g, q) for g, q in fs if g != f)
            lowered = _merge_pows(rest, ((f, pw - 1),) if pw > 1 else ())
            nk = (exp, vp, _merge_pows(lowered, ((f.tick(), 1),)), ats, rd)
            n = base.get(nk, _Q0) + c * pw
            if n:
                base[nk] = n
            else:
                base.pop(nk, None)
        for a, pw in ats:
            d = a.partial(v)
            if d is None or d.is_zero():
                continue
            rest = tuple((b, q) for b, q in ats if b != a)
            lowered = _merge_pows(rest, ((a, pw - 1),) if pw > 1 else ())
            term = Ratio({(exp, vp, fs, lowered, rd): c * pw})
            contrib = term * d
            extra = contrib if extra is None else extra + contrib
        if rd is not None:
            rad_atom = rd
            n = radnum.get(key, _Q0) + c
            if n:
                radnum[key] = n
            else:
                radnum.pop(key, None)
    result = Ratio(base)
    if radnum:
        # d(rad)/dv = (d radicand / dv) * rad / (2 * radicand)
        dp = _poly_diff(rad_atom.radicand, v)
        if not dp.is_zero():
            half = Ratio({KEY_ONE: mpq(1, 2)})
            rad_part = Ratio(radnum) * dp * half / Ratio(dict(rad_atom.radicand))
            result = result + rad_part
    if extra is not None:
        result = result + extra
    return result


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def con(q: Scalar) -> Ratio:
    q = mpq(q)
    if not q:
        return Ratio({})
    return Ratio({KEY_ONE: q}, _raw=True)


ZERO = con(0)
ONE = con(1)
HALF = con(mpq(1, 2))


def var(name: str) -> Ratio:
    if name not in _VIDX:
        raise DomainError("unknown variable %r" % name)
    vp = list(_ZEROPOW)
    vp[_VIDX[name]] = 1
    return Ratio({((0, 0, 0), tuple(vp), (), (), None): _Q1}, _raw=True)


def exp_lin(a: int, b: int = 0, c: int = 0) -> Ratio:
    """exp(a*t + b*x + c*u) with integer exponents."""
    return Ratio({((a, b, c), _ZEROPOW, (), (), None): _Q1}, _raw=True)


def fsym(name: str, arg: str, order: int = 0) -> Ratio:
    if arg not in BASE_VARS:
        raise DomainError("function argument must be one of %s" % (BASE_VARS,))
    f = FuncSym(name, arg, order)
    return Ratio({((0, 0, 0), _ZEROPOW, ((f, 1),), (), None): _Q1}, _raw=True)


def datom(atom: DeclaredAtom) -> Ratio:
    return Ratio({((0, 0, 0), _ZEROPOW, (), ((atom, 1),), None): _Q1}, _raw=True)


def radical(radicand: Ratio, name: str = "rad") -> Ratio:
    """The square root of ``radicand`` as a live radical atom.

    A radicand that is a perfect square of a rational collapses to the
    exact non-negative root, keeping the quotient ring an integral domain.
    """
    root = _perfect_square_root(radicand)
    if root is not None:
        return con(root)
    _assert_not_square(radicand)
    atom = RadAtom(radicand, name)
    return Ratio({((0, 0, 0), _ZEROPOW, (), (), atom): _Q1}, _raw=True)


def _perfect_square_root(p: Ratio) -> Optional[mpq]:
    if not p.is_constant():
        return None
    c = p.as_constant()
    if c < 0:
        return None
    if c == 0:
        return _Q0
    from gmpy2 import is_square, isqrt

    a, b = c.numerator, c.denominator
    if is_square(a) and is_square(b):
        return mpq(isqrt(a), isqrt(b))
    return None


def _assert_not_square(p: Ratio) -> None:
    """Guard the integral-domain assumption for non-constant radicands.

    Every radicand in the catalog is a non-square rational constant or
    ``v**2 + k`` (``atom**2 + k``) with ``k != 0``, never a square in the
    base ring.  Anything else is rejected rather than silently risking
    zero divisors.
    """
    if p.is_constant():
        return  # caller already ruled out perfect squares
    keys = sorted(p.num, key=_key_sort, reverse=True)
    if len(keys) == 2 and keys[1] == KEY_ONE and p.num[KEY_ONE] != 0:
        lead = keys[0]
        exp, vp, fs, ats, rd = lead
        if not any(exp) and not fs and rd is None:
            if sum(vp) == 2 and sorted(vp)[-1] == 2 and not ats:
                return
            if not any(vp) and len(ats) == 1 and ats[0][1] == 2:
                return
    raise DomainError("unsupported radicand (cannot certify it is not a square)")


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------


def _map_radatom(rd: RadAtom, transform: Callable[[Ratio], Ratio]) -> Ratio:
    new_rad = transform(Ratio(dict(rd.radicand)))
    if not new_rad.is_poly():
        raise DomainError("substitution made the radicand non-polynomial")
    return radical(new_rad, rd.name)


def _rebuild(poly: dict, monomial_map: Callable) -> Ratio:
    out = ZERO
    for key, c in poly.items():
        out = out + monomial_map(key, c)
    return out


def substitute_funcsym(r: Ratio, name: str, arg: str, repl: Ratio) -> Ratio:
    """Replace the whole derivative family ``name(arg)`` homomorphically.

    ``name(arg)`` maps to ``repl``, each tick to the next derivative of
    ``repl`` (so ``phi := u`` forces ``phi' -> 1``, ``phi'' -> 0``, ...).
    """
    derivs = [repl]

    def d(order: int) -> Ratio:
        while len(derivs) <= order:
            derivs.append(derivs[-1].diff(arg))
        return derivs[order]

    def mono(key, c) -> Ratio:
        exp, vp, fs, ats, rd = key
        keep = tuple((f, p) for f, p in fs if not (f.name == name and f.arg == arg))
        out = Ratio({(exp, vp, keep, ats, None): c}, _raw=True)
        for f, p in fs:
            if f.name == name and f.arg == arg:
                out = out * d(f.order) ** p
        if rd is not None:
            out = out * _map_radatom(rd, lambda q: substitute_funcsym(q, name, arg, repl))
        return out

    num = _rebuild(r.num, mono)
    den = _rebuild(r.den, mono)
    if den.is_zero():
        raise DomainError("substitution made the denominator vanish")
    return num / den


def substitute_var(r: Ratio, v: str, repl: Ratio) -> Ratio:
    """Replace a bare variable by an expression.

    When the variable occurs inside exponential exponents or as a function
    argument the replacement must itself be a bare variable (a renaming);
    otherwise any replacement is allowed.
    """
    if v not in _VIDX:
        raise DomainError("unknown variable %r" % v)
    rname = None
    if len(repl.num) == 1 and repl.is_poly():
        ((k, c),) = repl.num.items()
        if c == 1 and k[0] == (0, 0, 0) and not k[2] and not k[3] and k[4] is None:
            if sum(k[1]) == 1:
                rname = VARS[k[1].index(1)]
    needs_rename = False
    vi = _VIDX[v]
    for poly in (r.num, r.den):
        for key in poly:
            if vi < 3 and key[0][vi]:
                needs_rename = True
            if any(f.arg == v for f, _ in key[2]):
                needs_rename = True
    if needs_rename:
        if rname is None:
            raise DomainError(
                "variable %r occurs in an exponent or function argument; "
                "only a renaming is supported there" % v
            )
        return _collapse_var(r, v, rname)
    if rname is not None and rname != v:
        return _collapse_var(r, v, rname)

    def mono(key, c) -> Ratio:
        exp, vp, fs, ats, rd = key
        p = vp[vi]
        nvp = list(vp)
        nvp[vi] = 0
        out = Ratio({(exp, tuple(nvp), fs, ats, None): c}, _raw=True)
        if p:
            out = out * repl**p
        if rd is not None:
            out = out * _map_radatom(rd, lambda q: substitute_var(q, v, repl))
        return out

    num = _rebuild(r.num, mono)
    den = _rebuild(r.den, mono)
    if den.is_zero():
        raise DomainError("substitution made the denominator vanish")
    return num / den


def _collapse_var(r: Ratio, v: str, target: str) -> Ratio:
    """Substitute one bare variable by another (not necessarily injective)."""
    vi, ti = _VIDX[v], _VIDX[target]

    def conv(poly: dict) -> dict:
        out: dict = {}
        for key, c in poly.items():
            exp, vp, fs, ats, rd = key
            if vi < 3 and exp[vi]:
                if ti >= 3:
                    raise DomainError("cannot move an exponent onto a jet variable")
                e = list(exp)
                e[ti] += e[vi]
                e[vi] = 0
                exp = tuple(e)
            if vp[vi]:
                nvp = list(vp)
                nvp[ti] += nvp[vi]
                nvp[vi] = 0
                vp = tuple(nvp)
            if any(f.arg == v for f, _ in fs):
                if ti >= 3:
                    raise DomainError("function arguments must stay base variables")
                merged: tuple = ()
                for f, p in fs:
                    nf = FuncSym(f.name, target, f.order) if f.arg == v else f
                    merged = _merge_pows(merged, ((nf, p),))
                fs = merged
            if rd is not None:
                rr = _collapse_var(Ratio(dict(rd.radicand)), v, target)
                if not rr.is_poly():
                    raise DomainError("substitution made the radicand non-polynomial")
                rd = RadAtom(rr, rd.name)
            nk = (exp, vp, fs, ats, rd)
            nv = out.get(nk, _Q0) + c
            if nv:
                out[nk] = nv
            else:
                out.pop(nk, None)
        return out

    num = conv(r.num)
    den = conv(r.den)
    if not den:
        raise DomainError("substitution made the denominator vanish")
    return Ratio(num, den)


def rename_vars(r: Ratio, mapping: dict) -> Ratio:
    """Apply a variable renaming (must stay injective on the used variables).

    Base variables may only map to base variables because of the exponential
    exponent vector; declared atoms must have constant (all-zero) derivative
    tables since their tables are not rewritten.
    """
    full = {v: mapping.get(v, v) for v in VARS}
    if sorted(full.values()) != sorted(VARS):
        raise DomainError("renaming must be a permutation of the variables")
    for v in BASE_VARS:
        if full[v] not in BASE_VARS:
            raise DomainError("base variables may only be renamed to base variables")

    perm = [_VIDX[full[v]] for v in VARS]

    def mono(key, c):
        exp, vp, fs, ats, rd = key
        nexp = [0, 0, 0]
        for i in range(3):
            nexp[_VIDX[full[BASE_VARS[i]]]] = exp[i]
        nvp = [0] * _NVARS
        for i, p in enumerate(vp):
            nvp[perm[i]] = p
        nfs = tuple(sorted(((FuncSym(f.name, full[f.arg], f.order), p) for f, p in fs)))
        for a, _ in ats:
            if not a.is_constant():
                raise DomainError("cannot rename variables under a non-constant atom")
        nrd = rd
        if rd is not None:
            rr = rename_vars(Ratio(dict(rd.radicand)), mapping)
            nrd = RadAtom(rr, rd.name)
        return ((tuple(nexp), tuple(nvp), nfs, ats, nrd), c)

    num = dict(mono(k, c) for k, c in r.num.items())
    den = dict(mono(k, c) for k, c in r.den.items())
    return Ratio(num, den)
