"""Parser for the ASCII expression mini-language.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-')* power
    power   := atom ('^' intexp)?
    atom    := INT | '(' expr ')' | 'exp' '(' linear ')'
             | NAME ticks '(' basevar ')' | varname | 'rad' | atomname
    intexp  := ['-'] INT | '(' ['-'] INT ')'
    linear  := ['+'|'-'] linterm (('+' | '-') linterm)* | '0'
    linterm := INT '*' basevar | INT basevar? | basevar

Integers and rationals (``p/q`` through division), variables ``t x u`` and
the jet coordinates ``u_t u_x u_tt u_tx u_xx``, function symbols with
derivative ticks (``phi'(u)``, ``g''(x)``), the context radical ``rad`` and
context-declared atom names.  ``print`` (i.e. ``str(ratio)``) emits this
same grammar deterministically and ``parse(str(r)) == r`` bit-for-bit on
canonical forms.
"""

from __future__ import annotations

from typing import Optional

from .expr import (
    BASE_VARS,
    VARS,
    DeclaredAtom,
    Ratio,
    con,
    datom,
    exp_lin,
    fsym,
    var,
)

__all__ = ["ParseError", "UnknownSymbolError", "parse"]


class ParseError(ValueError):
    """Syntax error; ``offset`` is the byte offset into the input."""

    def __init__(self, message: str, offset: int):
        super().__init__("%s (at offset %d)" % (message, offset))
        self.offset = offset


class UnknownSymbolError(ParseError):
    """A name that is neither a variable, function call, nor declared atom."""


_OPS = set("+-*/^()")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._run()

    def _run(self):
        text, n = self.text, len(self.text)
        i = 0
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.tokens.append(("INT", int(text[i:j]), i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                name = text[i:j]
                ticks = 0
                while j < n and text[j] == "'":
                    ticks += 1
                    j += 1
                self.tokens.append(("NAME", (name, ticks), i))
                i = j
                continue
            if ch in _OPS:
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            raise ParseError("unexpected character %r" % ch, i)
        self.tokens.append(("EOF", None, n))


class _Parser:
    def __init__(self, text: str, rad: Optional[Ratio], atoms: dict):
        self.text = text
        self.tokens = _Lexer(text).tokens
        self.i = 0
        self.rad = rad
        self.atoms = atoms

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError("expected %r" % kind, tok[2])
        return tok

    def parse(self) -> Ratio:
        r = self.expr()
        tok = self.peek()
        if tok[0] != "EOF":
            raise ParseError("trailing input", tok[2])
        return r

    def expr(self) -> Ratio:
        r = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            r = r + rhs if op == "+" else r - rhs
        return r

    def term(self) -> Ratio:
        r = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.next()
            rhs = self.unary()
            if op == "*":
                r = r * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", pos)
                r = r / rhs
        return r

    def unary(self) -> Ratio:
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.next()[0] == "-":
                sign = -sign
        r = self.power()
        return r if sign > 0 else -r

    def power(self) -> Ratio:
        r = self.atom()
        if self.peek()[0] == "^":
            _, _, pos = self.next()
            k = self.intexp()
            if k < 0 and r.is_zero():
                raise ParseError("zero to a negative power", pos)
            r = r**k
        return r

    def intexp(self) -> int:
        tok = self.peek()
        if tok[0] == "(":
            self.next()
            k = self.intexp()
            self.expect(")")
            return k
        sign = 1
        if tok[0] == "-":
            self.next()
            sign = -1
        tok = self.next()
        if tok[0] != "INT":
            raise ParseError("expected integer exponent", tok[2])
        return sign * tok[1]

    def atom(self) -> Ratio:
        tok = self.next()
        kind, value, pos = tok
        if kind == "INT":
            return con(value)
        if kind == "(":
            r = self.expr()
            self.expect(")")
            return r
        if kind == "NAME":
            name, ticks = value
            if name == "exp":
                if ticks:
                    raise ParseError("exp takes no derivative ticks", pos)
                self.expect("(")
                coeffs = self.linear()
                self.expect(")")
                return exp_lin(*coeffs)
            if name == "rad":
                if ticks:
                    raise ParseError("rad takes no derivative ticks", pos)
                if self.rad is None:
                    raise UnknownSymbolError("no radical in this context", pos)
                return self.rad
            if self.peek()[0] == "(":
                self.next()
                atok = self.next()
                if atok[0] != "NAME" or atok[1][1] or atok[1][0] not in BASE_VARS:
                    raise ParseError("function argument must be one of t, x, u", atok[2])
                self.expect(")")
                return fsym(name, atok[1][0], ticks)
            if ticks:
                raise ParseError("derivative ticks need a function call", pos)
            if name in VARS:
                return var(name)
            if name in self.atoms:
                return datom(self.atoms[name])
            raise UnknownSymbolError("unknown symbol %r" % name, pos)
        raise ParseError("unexpected token", pos)

    def linear(self) -> tuple:
        coeffs = {v: 0 for v in BASE_VARS}
        sign = 1
        tok = self.peek()
        if tok[0] in ("+", "-"):
            if self.next()[0] == "-":
                sign = -1
        saw_zero = False
        while True:
            tok = self.next()
            if tok[0] == "INT":
                k = tok[1]
                if self.peek()[0] == "*":
                    self.next()
                    vtok = self.next()
                    if vtok[0] != "NAME" or vtok[1][1] or vtok[1][0] not in BASE_VARS:
                        raise ParseError("expected t, x or u in exponent", vtok[2])
                    coeffs[vtok[1][0]] += sign * k
                elif self.peek()[0] == "NAME" and self.peek()[1][0] in BASE_VARS:
                    vtok = self.next()
                    coeffs[vtok[1][0]] += sign * k
                elif k == 0:
                    saw_zero = True
                else:
                    raise ParseError("exponent terms must be multiples of t, x, u", tok[2])
            elif tok[0] == "NAME" and not tok[1][1] and tok[1][0] in BASE_VARS:
                coeffs[tok[1][0]] += sign
            else:
                raise ParseError("expected an exponent term", tok[2])
            nxt = self.peek()
            if nxt[0] in ("+", "-"):
                sign = 1 if self.next()[0] == "+" else -1
                continue
            break
        if saw_zero and not any(coeffs.values()):
            pass  # exp(0) is 1
        return tuple(coeffs[v] for v in BASE_VARS)


def parse(
    text: str,
    rad: Optional[Ratio] = None,
    atoms: Optional[dict] = None,
) -> Ratio:
    """Parse ``text`` into a canonical :class:`Ratio`.

    ``rad`` supplies the meaning of the ``rad`` token (the context's live
    radical, or an exact rational if the radicand was a perfect square);
    ``atoms`` maps declared-atom names to :class:`DeclaredAtom` instances.
    """
    named = dict(atoms) if atoms else {}
    return _Parser(text, rad, named).parse()
