"""wittcheck: exact symbolic verifier for Witt-algebra vector-field realizations.

The package provides an exact-arithmetic expression kernel (:mod:`.expr`,
:mod:`.parser`), vector fields with the Lie bracket (:mod:`.vecfield`),
second-order jet prolongation (:mod:`.jet`), a machine-readable catalog of
operator families and invariant equations (:mod:`.catalog`), a verification
suite producing structured reports (:mod:`.verify`), an independent numeric
oracle (:mod:`.oracle`) and a command-line driver (:mod:`.cli`).
"""

from .expr import (
    DeclaredAtom,
    DomainError,
    ExprError,
    FuncSym,
    RadAtom,
    Ratio,
    con,
    datom,
    exp_lin,
    fsym,
    radical,
    rename_vars,
    substitute_funcsym,
    substitute_var,
    var,
)
from .parser import ParseError, UnknownSymbolError, parse

__version__ = "0.1.0"
