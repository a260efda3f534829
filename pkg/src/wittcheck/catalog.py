"""Machine-readable catalog of the vector-field realizations and equations.

Each realization id maps to a generator rule ``n -> VectorField`` over a
declared finite parameter grid.  Conventions baked into the rules:

* empty sums vanish: every ``sum_{j=1}^{|n|-1}`` is 0 for ``|n| <= 1``,
* ``sgn(0) = 0``,
* negative powers of ``exp(x) - gamma``-type factors are denominator
  factors; non-negative ones are multiplied into the numerator,
* ``phit`` (the ``u``-or-constant slot of several families) runs over
  ``u``, a list of representative rationals, and one opaque constant
  symbol ``c`` with zero derivatives,
* the two seed families with no closed form per mode (``W4``, ``W7``)
  store explicit generators for ``|n| <= 2`` and extend by the bracket
  recursions ``L_{n+1} = (1-n)^{-1}[L_1, L_n]`` and
  ``L_{-n-1} = (n-1)^{-1}[L_{-1}, L_{-n}]`` up to a configurable bound.

``W4`` carries two unresolved sign slots (one inside ``L_{-2}``, one shared
by the order-2 fraction pair ``f``, ``g`` and their denominator ``r``); the
four pairings are adjudicated at run time against ``[L_2, L_{-2}] = 4 L_0``
by :func:`w4_pairing_scan`, and the default parameter grid keeps only the
surviving pairings.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional

from gmpy2 import mpq

from .expr import (
    DeclaredAtom,
    DomainError,
    Ratio,
    con,
    datom,
    exp_lin,
    fsym,
    radical,
    var,
)
from .vecfield import VectorField

__all__ = [
    "CatalogError",
    "Params",
    "PhiMode",
    "EMPTY",
    "WITT_IDS",
    "DSUM_IDS",
    "CENTRAL_IDS",
    "REALIZATION_IDS",
    "EQUATION_IDS",
    "DEFAULT_RECURSION_BOUND",
    "generator",
    "witt_generator",
    "param_grid",
    "sl2_triplet",
    "direct_sum_rules",
    "central_context",
    "central_candidate",
    "virasoro_case1",
    "virasoro_case2",
    "liouville_generator",
    "invariant_args",
    "equation_realization",
    "solved_form",
    "w4_pairing_scan",
    "catalog_export",
]

DEFAULT_RECURSION_BOUND = 4

_Z = con(0)
_ONE = con(1)
_HALF = con(mpq(1, 2))

# opaque constant symbol used by the "sym" phit mode (all derivatives zero)
CONST_SYMBOL = DeclaredAtom("c")


class CatalogError(ValueError):
    """Invalid parameters, unknown id, or a recursion bound overflow."""


class PhiMode(NamedTuple):
    """The ``u``-or-constant slot: kind is 'u', 'c' (value set) or 'sym'."""

    kind: str
    value: Optional[mpq] = None

    def ratio(self) -> Ratio:
        if self.kind == "u":
            return var("u")
        if self.kind == "c":
            return con(self.value)
        if self.kind == "sym":
            return datom(CONST_SYMBOL)
        raise CatalogError("bad phi mode %r" % (self.kind,))

    def __str__(self) -> str:
        if self.kind == "c":
            return "c=%s" % self.value
        return self.kind


PHI_U = PhiMode("u")
PHI_SYM = PhiMode("sym")


def phi_c(q) -> PhiMode:
    return PhiMode("c", mpq(q))


@dataclass(frozen=True)
class Params:
    """Discrete parameters a realization may declare.

    Families validate that exactly their declared fields are present;
    reading an undeclared field is an error.
    """

    alpha: Optional[int] = None
    beta: Optional[int] = None
    gamma: Optional[int] = None
    sign: Optional[int] = None
    signs: Optional[str] = None  # W4/D9 sign pairing: "++", "+-", "-+", "--"
    phi: Optional[PhiMode] = None
    lam: Optional[mpq] = None

    def fields(self) -> frozenset:
        return frozenset(
            name
            for name in ("alpha", "beta", "gamma", "sign", "signs", "phi", "lam")
            if getattr(self, name) is not None
        )

    def as_dict(self) -> dict:
        out = {}
        for name in ("alpha", "beta", "gamma", "sign", "lam"):
            v = getattr(self, name)
            if v is not None:
                out[name] = str(v)
        if self.sign is not None:
            out["sign"] = "+" if self.sign > 0 else "-"
        if self.signs is not None:
            out["signs"] = self.signs
        if self.phi is not None:
            out["phi"] = str(self.phi)
        return out

    def key(self) -> str:
        return ",".join("%s=%s" % kv for kv in sorted(self.as_dict().items()))

    def __str__(self) -> str:
        return self.key() or "-"


EMPTY = Params()

_DECLARED = {
    "W1": frozenset(),
    "W2": frozenset({"alpha"}),
    "W3": frozenset({"gamma"}),
    "W4": frozenset({"gamma", "phi", "signs"}),
    "W5": frozenset({"sign"}),
    "W6": frozenset({"gamma"}),
    "W7": frozenset({"gamma", "phi"}),
    "W8": frozenset({"gamma"}),
    "W9": frozenset({"phi"}),
    "W10": frozenset(),
    "W11": frozenset({"alpha"}),
    "REP1": frozenset(),
    "REP2": frozenset({"alpha", "beta", "phi"}),
    "D1": frozenset(),
    "D2": frozenset(),
    "D3": frozenset(),
    "D4": frozenset({"gamma"}),
    "D5": frozenset({"gamma"}),
    "D6": frozenset({"sign"}),
    "D7": frozenset({"gamma"}),
    "D8": frozenset({"phi"}),
    "D9": frozenset({"gamma", "phi", "signs"}),
    "D10": frozenset({"gamma", "phi"}),
    "C1": frozenset(),
    "C2": frozenset({"lam"}),
    "C3": frozenset(),
    "C4": frozenset(),
    "C5": frozenset(),
    "C6": frozenset(),
    "V4_CASE1": frozenset(),
    "V4_CASE2": frozenset(),
    "LIOUVILLE_F": frozenset(),
    "LIOUVILLE_G": frozenset(),
}

WITT_IDS = tuple("W%d" % i for i in range(1, 12))
DSUM_IDS = tuple("D%d" % i for i in range(1, 11))
CENTRAL_IDS = tuple("C%d" % i for i in range(1, 7))
REALIZATION_IDS = (
    WITT_IDS
    + ("REP1", "REP2")
    + DSUM_IDS
    + CENTRAL_IDS
    + ("V4_CASE1", "V4_CASE2", "LIOUVILLE_F", "LIOUVILLE_G")
)

EQUATION_IDS = (
    "T1_W1",
    "T1_W2_a0",
    "T1_W2_a1",
    "T1_W6",
    "T1_W8",
    "T1_W10",
    "D1_EQ",
    "D2_EQ",
    "D3_EQ",
    "D6_EQ",
    "LIO_EQ",
)


def _check_params(rid: str, p: Params, allow_missing: frozenset = frozenset()) -> None:
    declared = _DECLARED.get(rid)
    if declared is None:
        raise CatalogError("unknown realization id %r" % rid)
    have = p.fields()
    if have - declared:
        raise CatalogError("%s does not declare parameters %s" % (rid, sorted(have - declared)))
    missing = declared - have - allow_missing
    if missing:
        raise CatalogError("%s requires parameters %s" % (rid, sorted(missing)))


# ---------------------------------------------------------------------------
# integer helpers (explicit conventions)
# ---------------------------------------------------------------------------


def _sgn(n: int) -> int:
    return (n > 0) - (n < 0)


def _sum_j_jp1(k: int) -> int:
    # sum_{j=1}^{k} j(j+1); empty for k <= 0
    return k * (k + 1) * (k + 2) // 3 if k > 0 else 0


def _sum_2jp1(k: int) -> int:
    # sum_{j=1}^{k} (2j+1); empty for k <= 0
    return k * k + 2 * k if k > 0 else 0


def _sum_j_jm1(k: int) -> int:
    # sum_{j=1}^{k} j(j-1); empty for k <= 0
    return k * (k + 1) * (k - 1) // 3 if k > 0 else 0


# ---------------------------------------------------------------------------
# closed-form families
# ---------------------------------------------------------------------------


def _w1(n: int, p: Params) -> VectorField:
    return VectorField(exp_lin(-n), _Z, _Z)


def _w2(n: int, p: Params) -> VectorField:
    a = p.alpha
    e = exp_lin(-n)
    xi = e * (con(n) + _HALF * con(n * (n - 1) * a) * exp_lin(0, -1))
    return VectorField(e, xi, _Z)


def _w3(n: int, p: Params) -> VectorField:
    g = p.gamma
    pre = exp_lin(-n, n - 1)
    base = exp_lin(0, 1) - con(g)
    tau = pre * (exp_lin(0, 2) - con((n + 1) * g) * exp_lin(0, 1) + _HALF * con(n * (n + 1) * g * g)) * base ** (-(n + 1))
    xi = pre * (con(n) * exp_lin(0, 1) - _HALF * con(n * (n + 1) * g)) * base ** (-n)
    return VectorField(tau, xi, _Z)


def _w5(n: int, p: Params) -> VectorField:
    s = p.sign
    pre = exp_lin(-n, n - 1)
    base = exp_lin(0, 1) + con(s)
    tau = pre * (exp_lin(0, 1) + con(s * n)) * base ** (-n)
    xi = con(n) * pre * base ** (1 - n)
    return VectorField(tau, xi, _Z)


def _w6(n: int, p: Params) -> VectorField:
    g = p.gamma
    base = exp_lin(0, 1) - con(g)
    xi = con(g) * exp_lin(-n) * (exp_lin(0, n) - base**n) * base ** (1 - n)
    return VectorField(exp_lin(-n), xi, _Z)


def _w8(n: int, p: Params) -> VectorField:
    g = p.gamma
    e = exp_lin(-n)
    xi = e * (con(n) - con(_sgn(n) * g) * _HALF * con(_sum_j_jp1(abs(n) - 1)) * exp_lin(0, -2))
    return VectorField(e, xi, _Z)


def _w9(n: int, p: Params) -> VectorField:
    phit = p.phi.ratio()
    s2 = _sum_2jp1(abs(n) - 1)
    s1 = _sum_j_jp1(abs(n) - 1)
    pre = exp_lin(-n, n - 1)
    base = exp_lin(0, 1) - _ONE
    ex, ex2, ex3 = exp_lin(0, 1), exp_lin(0, 2), exp_lin(0, 3)
    tau = (
        pre
        * (con((-1 + s2) * n) + con(2 * n + 1) * ex - con(n + 2) * ex2 + ex3
           + con(_sgn(n)) * _HALF * con(s1) * phit)
        * base ** (-(n + 2))
    )
    xi = (
        pre
        * (con((1 - s2) * n) - con(2 * n) * ex + con(n) * ex2
           - con(_sgn(n)) * _HALF * con(s1) * phit)
        * base ** (-(n + 1))
    )
    return VectorField(tau, xi, _Z)


def _w10(n: int, p: Params) -> VectorField:
    eta = con(_sgn(n)) * _HALF * con(_sum_j_jm1(abs(n))) * exp_lin(-n, -2)
    return VectorField(exp_lin(-n), con(n) * exp_lin(-n), eta)


def _w11(n: int, p: Params) -> VectorField:
    a = p.alpha
    e = exp_lin(-n)
    xi = e * (con(n) + con(a * n * (n - 1)) * _HALF * exp_lin(0, -1))
    eta = con(n * (n - 1)) * _HALF * exp_lin(-n, -1)
    return VectorField(e, xi, eta)


def _rep1(n: int, p: Params) -> VectorField:
    if n not in (0, 1, -1):
        raise CatalogError("REP1 is the order-(0, 1, -1) triplet")
    return VectorField(exp_lin(-n), _Z, _Z)


def _rep2_phi(p: Params) -> Ratio:
    # here 'sym' means a genuinely arbitrary smooth function of u
    if p.phi.kind == "sym":
        return fsym("phi", "u")
    return p.phi.ratio()


def _rep2(n: int, p: Params) -> VectorField:
    if n not in (0, 1, -1):
        raise CatalogError("REP2 is the order-(0, 1, -1) triplet")
    if n == 0:
        return VectorField(_ONE, _Z, _Z)
    if n == 1:
        return VectorField(exp_lin(-1), exp_lin(-1), _Z)
    a, b = p.alpha, p.beta
    phi = _rep2_phi(p)
    et = exp_lin(1)
    tau = et * (_ONE + con(a) * exp_lin(0, -2))
    xi = et * (-_ONE + phi * exp_lin(0, -1) + con(a) * exp_lin(0, -2))
    eta = con(b) * exp_lin(1, -1)
    return VectorField(tau, xi, eta)


# ---------------------------------------------------------------------------
# seed-plus-recursion families (W4, W7)
# ---------------------------------------------------------------------------


def _sign_pair(signs: str) -> tuple[int, int]:
    if signs not in ("++", "+-", "-+", "--"):
        raise CatalogError("sign pairing must be one of ++ +- -+ --, got %r" % signs)
    return (1 if signs[0] == "+" else -1, 1 if signs[1] == "+" else -1)


def _rep2_like_seeds(gamma: int, phit: Ratio) -> dict:
    l0 = VectorField(_ONE, _Z, _Z)
    l1 = VectorField(exp_lin(-1), exp_lin(-1), _Z)
    et = exp_lin(1)
    lm1 = VectorField(
        et * (_ONE + con(gamma) * exp_lin(0, -2)),
        et * (-_ONE + con(gamma) * exp_lin(0, -2) + exp_lin(0, -1) * phit),
        _Z,
    )
    return {0: l0, 1: l1, -1: lm1}


def _w4_pieces(gamma: int, phi: PhiMode, signs: str):
    """Seed fields of W4 and the fraction denominator ``r``."""
    s1, s2 = _sign_pair(signs)
    phit = phi.ratio()
    p4 = con(4 * gamma) + phit * phit
    rt = radical(p4)  # exact rational when the radicand is a perfect square
    if rt.is_zero():
        s1 = s2 = 1  # degenerate radical: the sign slots are inert
    cube = p4 * rt  # (4*gamma + phit^2)^(3/2)
    seeds = _rep2_like_seeds(gamma, phit)
    ex = exp_lin(0, 1)
    g2 = gamma * gamma

    psi1 = -_HALF * (con(6 * gamma) * phit + phit**3 + con(s1) * cube)
    e2t = exp_lin(2)
    seeds[-2] = VectorField(
        e2t * (_ONE + con(3 * gamma) * exp_lin(0, -2) + psi1 * exp_lin(0, -3)),
        e2t
        * (
            -con(2)
            + con(3) * exp_lin(0, -1) * phit
            + con(6 * gamma) * exp_lin(0, -2)
            + psi1 * exp_lin(0, -3)
        ),
        _Z,
    )

    tail = -con(64 * g2) - con(54 * gamma) * phit**2 - con(9) * phit**4 - con(s2) * con(9) * phit * cube
    f_num = ex * (
        con(4) * exp_lin(0, 4)
        - con(10) * exp_lin(0, 3) * phit
        - con(36 * gamma) * exp_lin(0, 2)
        + con(2) * ex * (con(31 * gamma) * phit + con(6) * phit**3 + con(s2) * con(6) * cube)
        + tail
    )
    g_num = ex * (
        con(8) * exp_lin(0, 4)
        - con(16) * exp_lin(0, 3) * phit
        - con(2) * exp_lin(0, 2) * (con(44 * gamma) + con(5) * phit**2)
        + con(2) * ex * (con(44 * gamma) * phit + con(9) * phit**3 + con(s2) * con(9) * cube)
        + tail
    )
    r = (
        con(4) * exp_lin(0, 5)
        - con(10) * exp_lin(0, 4) * phit
        - con(40 * gamma) * exp_lin(0, 3)
        + con(10) * exp_lin(0, 2) * (con(6 * gamma) * phit + phit**3 + con(s2) * cube)
        - con(10) * ex * (con(6 * g2) + con(6 * gamma) * phit**2 + phit**4 + con(s2) * phit * cube)
        + con(30 * g2) * phit
        + con(20 * gamma) * phit**3
        + con(3) * phit**5
        + con(s2) * (con(2 * gamma) + con(3) * phit**2) * cube
    )
    if r.is_zero():
        raise CatalogError("degenerate W4 parameters: the fraction denominator vanishes")
    e2mt = exp_lin(-2)
    seeds[2] = VectorField(e2mt * f_num / r, e2mt * g_num / r, _Z)
    return seeds, r


def _w7_pieces(gamma: int, phi: PhiMode):
    phit = phi.ratio()
    seeds = _rep2_like_seeds(gamma, phit)
    ex = exp_lin(0, 1)
    q = exp_lin(0, 2) - ex * phit - con(gamma)
    if q.is_zero():
        raise CatalogError("degenerate W7 parameters: the order-2 denominator vanishes")
    pre2 = exp_lin(-2, 1)
    seeds[2] = VectorField(pre2 * (ex - phit) / q, pre2 * (con(2) * ex - phit) / q, _Z)
    prem2 = exp_lin(2, -3)
    seeds[-2] = VectorField(
        prem2 * (exp_lin(0, 3) + con(3 * gamma) * ex - con(gamma) * phit),
        prem2 * (con(2) * ex - phit) * (-exp_lin(0, 2) + ex * phit + con(gamma)),
        _Z,
    )
    return seeds, q


class _SeedAlgebra:
    """Bracket-recursion closure of an explicit seed set.

    ``L_{n+1} = (1-n)^{-1} [L_1, L_n]`` and
    ``L_{-n-1} = (n-1)^{-1} [L_{-1}, L_{-n}]`` for ``n >= 2``; after every
    bracket the known denominator factor is cancelled to keep components
    in lowest terms (pure representation maintenance).
    """

    def __init__(self, seeds: dict, reduce_factor: Optional[Ratio]):
        self.fields = dict(seeds)
        self.reduce_factor = reduce_factor

    def generator(self, n: int) -> VectorField:
        if n not in self.fields:
            k = max(self.fields) if n > 0 else min(self.fields)
            while (n > 0 and k < n) or (n < 0 and k > n):
                if n > 0:
                    nxt = self.fields[1].bracket(self.fields[k]).scale(mpq(1, 1 - k))
                    k += 1
                else:
                    nxt = self.fields[-1].bracket(self.fields[k]).scale(mpq(1, -k - 1))
                    k -= 1
                if self.reduce_factor is not None:
                    nxt = nxt.cancel_factor(self.reduce_factor)
                self.fields[k] = nxt
        return self.fields[n]


_ALGEBRA_CACHE: dict = {}


def _seed_algebra(rid: str, p: Params, perm: Optional[dict] = None) -> _SeedAlgebra:
    key = (rid, p.key(), tuple(sorted(perm.items())) if perm else None)
    alg = _ALGEBRA_CACHE.get(key)
    if alg is None:
        if rid == "W4":
            seeds, factor = _w4_pieces(p.gamma, p.phi, p.signs)
        elif rid == "W7":
            seeds, factor = _w7_pieces(p.gamma, p.phi)
        else:
            raise CatalogError("no seed algebra for %r" % rid)
        if perm:
            seeds = {n: f.translate(perm) for n, f in seeds.items()}
            from .expr import rename_vars

            factor = rename_vars(factor, perm)
        alg = _SeedAlgebra(seeds, factor)
        _ALGEBRA_CACHE[key] = alg
    return alg


def _recursion_generator(rid: str, n: int, p: Params, bound: Optional[int], perm=None) -> VectorField:
    limit = DEFAULT_RECURSION_BOUND if bound is None else bound
    if abs(n) > limit:
        raise CatalogError("|n|=%d exceeds the recursion bound %d for %s" % (abs(n), limit, rid))
    return _seed_algebra(rid, p, perm).generator(n)


# ---------------------------------------------------------------------------
# W4 sign-pairing adjudication
# ---------------------------------------------------------------------------

_PAIRING_CACHE: dict = {}


def w4_pairing_scan(gamma: int, phi: PhiMode) -> dict:
    """Outcome of ``[L_2, L_{-2}] = 4 L_0`` for every sign pairing.

    Returns ``{"++": bool, ...}``; with a degenerate (zero) radical the four
    pairings coincide and only ``"++"`` is reported.  The surviving pairings
    form the default verification grid; the scan itself is recorded by the
    verification suite, so a paper-side sign ambiguity is an observable
    outcome rather than a hard-coded guess.
    """
    key = (gamma, str(phi))
    cached = _PAIRING_CACHE.get(key)
    if cached is not None:
        return cached
    p4 = con(4 * gamma) + phi.ratio() ** 2
    pairings = ("++",) if radical(p4).is_zero() else ("++", "+-", "-+", "--")
    out = {}
    four_l0 = VectorField(con(4), _Z, _Z)
    for signs in pairings:
        seeds, _ = _w4_pieces(gamma, phi, signs)
        residual = seeds[2].bracket(seeds[-2]) - four_l0
        out[signs] = residual.is_zero()
    _PAIRING_CACHE[key] = out
    return out


def _w4_surviving(gamma: int, phi: PhiMode) -> list:
    return [signs for signs, ok in w4_pairing_scan(gamma, phi).items() if ok]


# ---------------------------------------------------------------------------
# central candidates and the order-2 central extension attempts
# ---------------------------------------------------------------------------


def central_context() -> tuple[VectorField, VectorField]:
    """The fixed pair (L_0, L_1) the central candidates commute with."""
    l0 = VectorField(_ONE, _Z, _Z)
    l1 = VectorField(exp_lin(-1), exp_lin(-1), _Z)
    return l0, l1


def central_candidate(cid: str, p: Params = EMPTY) -> VectorField:
    _check_params(cid, p)
    emx = exp_lin(0, -1)
    if cid == "C1":
        return VectorField(emx, emx + var("u"), _Z)
    if cid == "C2":
        return VectorField(emx, emx + con(p.lam), _Z)
    if cid == "C3":
        return VectorField(emx, emx, _ONE)
    if cid == "C4":
        return VectorField(_Z, _Z, _ONE)
    if cid == "C5":
        return VectorField(_Z, var("u"), _Z)
    if cid == "C6":
        return VectorField(_Z, _ONE, _Z)
    raise CatalogError("unknown central candidate %r" % cid)


def virasoro_case1() -> dict:
    """Central candidate and order-2 operator over the one-variable triplet."""
    return {
        "L0": _rep1(0, EMPTY),
        "L1": _rep1(1, EMPTY),
        "L-1": _rep1(-1, EMPTY),
        "L2": VectorField(exp_lin(-2), _Z, _Z),
        "C": VectorField(_Z, _Z, _ONE),
    }


def virasoro_case2() -> dict:
    """The explicitly constructed operators over <L_0, L_1, C_1>."""
    l0, l1 = central_context()
    u = var("u")
    ex = exp_lin(0, 1)
    uex1 = u * ex + _ONE
    lm1 = VectorField(
        exp_lin(1, -2) * (u**2 * exp_lin(0, 2) - _ONE) / u**2,
        -exp_lin(1, -2) * uex1**2 / u**2,
        _Z,
    )
    l2 = VectorField(
        u * ex * (u * ex + con(2)) / (exp_lin(2) * uex1**2),
        con(2) * u * ex / (exp_lin(2) * uex1),
        _Z,
    )
    return {"L0": l0, "L1": l1, "L-1": lm1, "L2": l2, "C": central_candidate("C1")}


def liouville_generator(which: str) -> VectorField:
    """Symmetry fields of the hyperbolic exponential equation u_tx = exp(u)."""
    if which in ("f", "LIOUVILLE_F"):
        return VectorField(fsym("f", "t"), _Z, -fsym("f", "t", 1))
    if which in ("g", "LIOUVILLE_G"):
        return VectorField(_Z, fsym("g", "x"), -fsym("g", "x", 1))
    raise CatalogError("unknown symmetry label %r" % which)


# ---------------------------------------------------------------------------
# public generator access
# ---------------------------------------------------------------------------

_CLOSED = {
    "W1": _w1,
    "W2": _w2,
    "W3": _w3,
    "W5": _w5,
    "W6": _w6,
    "W8": _w8,
    "W9": _w9,
    "W10": _w10,
    "W11": _w11,
    "REP1": _rep1,
    "REP2": _rep2,
}

_GEN_CACHE: dict = {}


def witt_generator(rid: str, n: int, p: Params = EMPTY, bound: Optional[int] = None) -> VectorField:
    """Generator rule for the single-algebra ids (W*, REP*)."""
    _check_params(rid, p)
    key = (rid, n, p.key())
    got = _GEN_CACHE.get(key)
    if got is not None:
        return got
    if rid in _CLOSED:
        vf = _CLOSED[rid](n, p)
    elif rid in ("W4", "W7"):
        vf = _recursion_generator(rid, n, p, bound)
    else:
        raise CatalogError("%r has no integer-indexed generator rule" % rid)
    _GEN_CACHE[key] = vf
    return vf


def sl2_triplet(rep: str, p: Params = EMPTY) -> tuple:
    if rep not in ("REP1", "REP2"):
        raise CatalogError("sl2 triplet ids are REP1 and REP2")
    return (
        witt_generator(rep, 0, p),
        witt_generator(rep, 1, p),
        witt_generator(rep, -1, p),
    )


_T3 = {"t": "x", "x": "u", "u": "t"}  # (t, x) -> (x, u) relabeling
_SWAP_TU = {"t": "u", "u": "t"}


def _d7_factor2(n: int, p: Params) -> VectorField:
    # transcribed as stated, with the gamma-free 1/2 n(n+1) constant term
    g = p.gamma
    pre = exp_lin(0, -n, n - 1)
    base = exp_lin(0, 0, 1) - con(g)
    eu, eu2 = exp_lin(0, 0, 1), exp_lin(0, 0, 2)
    xi = pre * (eu2 - con((n + 1) * g) * eu + _HALF * con(n * (n + 1))) * base ** (-(n + 1))
    eta = pre * (con(n) * eu - _HALF * con(n * (n + 1) * g)) * base ** (-n)
    return VectorField(_Z, xi, eta)


def direct_sum_rules(did: str, p: Params = EMPTY, bound: Optional[int] = None) -> tuple:
    """Pair of commuting generator rules ``(m -> Q_m, n -> P_n)``."""
    _check_params(did, p)

    def w1_rule(m: int) -> VectorField:
        return witt_generator("W1", m, EMPTY)

    e = EMPTY
    if did == "D1":
        return w1_rule, lambda n: witt_generator("W1", n, e).translate(_T3)
    if did == "D2":
        return w1_rule, lambda n: witt_generator("W2", n, Params(alpha=0)).translate(_T3)
    if did == "D3":
        return (
            lambda m: witt_generator("W2", m, Params(alpha=0)),
            lambda n: witt_generator("W2", n, Params(alpha=0)).translate(_SWAP_TU),
        )
    if did == "D4":
        return w1_rule, lambda n: witt_generator("W6", n, Params(gamma=p.gamma)).translate(_T3)
    if did == "D5":
        return w1_rule, lambda n: witt_generator("W8", n, Params(gamma=p.gamma)).translate(_T3)
    if did == "D6":
        return w1_rule, lambda n: witt_generator("W5", n, Params(sign=p.sign)).translate(_T3)
    if did == "D7":
        return w1_rule, lambda n: _d7_factor2(n, p)
    if did == "D8":
        return w1_rule, lambda n: witt_generator("W9", n, Params(phi=p.phi)).translate(_T3)
    if did == "D9":
        q = Params(gamma=p.gamma, phi=p.phi, signs=p.signs)
        return w1_rule, lambda n: _recursion_generator("W4", n, q, bound, perm=_T3)
    if did == "D10":
        q = Params(gamma=p.gamma, phi=p.phi)
        return w1_rule, lambda n: _recursion_generator("W7", n, q, bound, perm=_T3)
    raise CatalogError("unknown direct-sum id %r" % did)


def generator(rid: str, n: int, p: Params = EMPTY, factor: Optional[int] = None,
              bound: Optional[int] = None) -> VectorField:
    """Uniform generator access across the whole catalog."""
    if rid in _CLOSED or rid in ("W4", "W7"):
        return witt_generator(rid, n, p, bound)
    if rid in DSUM_IDS:
        rules = direct_sum_rules(rid, p, bound)
        if factor not in (1, 2):
            raise CatalogError("direct sums need factor=1 or factor=2")
        return rules[factor - 1](n)
    if rid in CENTRAL_IDS:
        if n != 0:
            raise CatalogError("central candidates are not integer-indexed")
        return central_candidate(rid, p)
    if rid in ("LIOUVILLE_F", "LIOUVILLE_G"):
        return liouville_generator(rid)
    raise CatalogError("no generator rule for %r" % rid)


# ---------------------------------------------------------------------------
# parameter grids
# ---------------------------------------------------------------------------

PHI_CONSTS = (mpq(0), mpq(1), mpq(-2), mpq(1, 3))
# with gamma = -1 the radicand 4*gamma + c*c must stay >= 0 for a real field
PHI_CONSTS_NEG = (mpq(-2), mpq(3))

LAMBDA_REPS = (mpq(1), mpq(-1), mpq(2))


def _phi_grid(consts, with_u: bool = True, with_sym: bool = True) -> list:
    out = []
    if with_u:
        out.append(PHI_U)
    out.extend(phi_c(c) for c in consts)
    if with_sym:
        out.append(PHI_SYM)
    return out


def param_grid(rid: str) -> list:
    """The full finite parameter grid of a realization.

    For W4/D9 the grid enumerates only sign pairings that survive the
    ``[L_2, L_{-2}] = 4 L_0`` adjudication (see :func:`w4_pairing_scan`).
    """
    if rid in ("W1", "W10", "REP1", "D1", "D2", "D3", "C1", "C3", "C4", "C5", "C6",
               "V4_CASE1", "V4_CASE2", "LIOUVILLE_F", "LIOUVILLE_G"):
        return [EMPTY]
    if rid in ("W2", "W11"):
        return [Params(alpha=a) for a in (-1, 0, 1)]
    if rid in ("W3", "W6", "W8"):
        return [Params(gamma=g) for g in (-1, 1)]
    if rid == "W4":
        out = []
        for g in (1, -1):
            consts = PHI_CONSTS if g == 1 else PHI_CONSTS_NEG
            for phi in _phi_grid(consts):
                for signs in _w4_surviving(g, phi):
                    out.append(Params(gamma=g, phi=phi, signs=signs))
        return out
    if rid == "W5":
        return [Params(sign=s) for s in (1, -1)]
    if rid == "W7":
        return [Params(gamma=g, phi=phi) for g in (1, -1) for phi in _phi_grid(PHI_CONSTS)]
    if rid == "W9":
        return [Params(phi=phi) for phi in _phi_grid(PHI_CONSTS)]
    if rid == "REP2":
        return [
            Params(alpha=a, beta=b, phi=phi)
            for a in (-1, 0, 1)
            for b in (0, 1)
            for phi in _phi_grid(PHI_CONSTS)
        ]
    if rid in ("D4", "D5", "D7"):
        return [Params(gamma=g) for g in (-1, 1)]
    if rid == "D6":
        return [Params(sign=s) for s in (1, -1)]
    if rid == "D8":
        return [Params(phi=phi) for phi in _phi_grid(PHI_CONSTS, with_u=False)]
    if rid == "D9":
        out = []
        for g in (1, -1):
            consts = PHI_CONSTS if g == 1 else PHI_CONSTS_NEG
            for phi in _phi_grid(consts, with_u=False):
                for signs in _w4_surviving(g, phi):
                    out.append(Params(gamma=g, phi=phi, signs=signs))
        return out
    if rid == "D10":
        return [
            Params(gamma=g, phi=phi)
            for g in (1, -1)
            for phi in _phi_grid(PHI_CONSTS, with_u=False)
        ]
    if rid == "C2":
        return [Params(lam=q) for q in LAMBDA_REPS]
    raise CatalogError("unknown realization id %r" % rid)


# ---------------------------------------------------------------------------
# invariant equations
# ---------------------------------------------------------------------------


def equation_realization(eq: str) -> tuple:
    """(realization id, parameter grid) whose symmetry the equation admits."""
    table = {
        "T1_W1": ("W1", [EMPTY]),
        "T1_W2_a0": ("W2", [Params(alpha=0)]),
        "T1_W2_a1": ("W2", [Params(alpha=-1), Params(alpha=1)]),
        "T1_W6": ("W6", [Params(gamma=g) for g in (-1, 1)]),
        "T1_W8": ("W8", [Params(gamma=g) for g in (-1, 1)]),
        "T1_W10": ("W10", [EMPTY]),
        "D1_EQ": ("D1", [EMPTY]),
        "D2_EQ": ("D2", [EMPTY]),
        "D3_EQ": ("D3", [EMPTY]),
        "D6_EQ": ("D6", [Params(sign=s) for s in (1, -1)]),
        "LIO_EQ": ("LIOUVILLE_F", [EMPTY]),
    }
    if eq not in table:
        raise CatalogError("unknown equation id %r" % eq)
    return table[eq]


def invariant_args(eq: str, p: Params = EMPTY) -> list:
    """The invariant arguments of an equation, as canonical jet ratios."""
    u, ux, uxx = var("u"), var("u_x"), var("u_xx")
    ut, utx = var("u_t"), var("u_tx")
    ex = exp_lin(0, 1)
    if eq == "T1_W1":
        return [var("x"), u, ux, uxx, utx / ut]
    if eq == "T1_W2_a0":
        return [u, ux, uxx, (ut * uxx - ux * utx) / (ex * ux)]
    if eq == "T1_W2_a1":
        a = con(p.alpha)
        third = (ut * ux - ut * uxx + ux * utx + ux**2) / (ex * ux) - con(2) * a * ux
        return [u, (uxx - ux) / ux**2, third]
    if eq == "T1_W6":
        g = con(p.gamma)
        big = (g * (uxx + utx) - ex * (ux + uxx)) / (ux * (g * (ut + ux) - ex * ux))
        return [u, big]
    if eq == "T1_W8":
        return [u, (uxx - con(2) * ux) / ux**2]
    if eq == "T1_W10":
        return [ux + con(2) * u, uxx - con(4) * u]
    if eq == "D1_EQ":
        return [u, utx / (ut * ux)]
    if eq == "D2_EQ":
        return [(utx / ut) * exp_lin(0, 0, -1)]
    if eq == "D3_EQ":
        return [((ut * uxx - ux * utx) / ux**3) * exp_lin(0, -1)]
    if eq == "D6_EQ":
        s = con(p.sign)
        eu = exp_lin(0, 0, 1)
        num = utx * (_ONE - ux + s * eu) + ut * (uxx - ux**2 + ux)
        den = ut * (exp_lin(0, 0, 2) + (ux - _ONE) * (ux - _ONE - con(2) * s * eu))
        return [num / den]
    if eq == "LIO_EQ":
        return []
    raise CatalogError("unknown equation id %r" % eq)


def solved_form(eq: str, p: Params = EMPTY) -> Optional[tuple]:
    """Optional solved form ``(jet variable, rhs)`` of an equation."""
    if eq == "LIO_EQ":
        return ("u_tx", exp_lin(0, 0, 1))
    if eq == "D2_EQ":
        lam = p.lam if p.lam is not None else mpq(1)
        return ("u_tx", con(lam) * var("u_t") * exp_lin(0, 0, 1))
    return None


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def catalog_export(max_n: int = 3, bound: Optional[int] = None) -> dict:
    """JSON-ready document: ids, parameter grids, printed generators."""
    limit = DEFAULT_RECURSION_BOUND if bound is None else bound
    doc = {"schema": "wittcheck-catalog/1", "max_n": max_n, "realizations": []}
    for rid in REALIZATION_IDS:
        entry = {"id": rid, "parameters": []}
        for p in param_grid(rid):
            item = {"params": p.as_dict()}
            if rid in WITT_IDS or rid in ("REP1", "REP2"):
                span = range(-1, 2) if rid in ("REP1", "REP2") else range(-max_n, max_n + 1)
                gens = {}
                for n in span:
                    if rid in ("W4", "W7") and abs(n) > limit:
                        continue
                    gens[str(n)] = str(witt_generator(rid, n, p, bound))
                item["generators"] = gens
            elif rid in DSUM_IDS:
                rules = direct_sum_rules(rid, p, bound)
                for which, rule in zip(("factor1", "factor2"), rules):
                    gens = {}
                    for n in range(-max_n, max_n + 1):
                        if rid in ("D9", "D10") and abs(n) > limit:
                            continue
                        gens[str(n)] = str(rule(n))
                    item[which] = gens
            elif rid in CENTRAL_IDS:
                item["generators"] = {"C": str(central_candidate(rid, p))}
            elif rid == "V4_CASE1":
                item["generators"] = {k: str(v) for k, v in virasoro_case1().items()}
            elif rid == "V4_CASE2":
                item["generators"] = {k: str(v) for k, v in virasoro_case2().items()}
            else:
                item["generators"] = {"Q": str(liouville_generator(rid))}
            entry["parameters"].append(item)
        doc["realizations"].append(entry)
    eqs = []
    for eq in EQUATION_IDS:
        rid, grid = equation_realization(eq)
        for p in grid:
            eqs.append(
                {
                    "id": eq,
                    "realization": rid,
                    "params": p.as_dict(),
                    "arguments": [str(a) for a in invariant_args(eq, p)],
                }
            )
    doc["equations"] = eqs
    return doc
