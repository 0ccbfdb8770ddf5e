"""Abstract syntax of multi-sorted first-order formulas, and a printer.

Nodes are frozen dataclasses.  Source spans and inferred sorts are carried
along but excluded from equality, so structurally equal formulas compare
equal regardless of where they came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int = 1
    col: int = 1


def _span():
    return field(default=None, compare=False, repr=False)


# -- terms --------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    span: Span | None = _span()
    sort: str | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()
    span: Span | None = _span()
    sort: str | None = field(default=None, compare=False, repr=False)


Term = Union[Var, App]


# -- formulas -----------------------------------------------------------------


@dataclass(frozen=True)
class Top:
    span: Span | None = _span()


@dataclass(frozen=True)
class Bottom:
    span: Span | None = _span()


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple = ()
    span: Span | None = _span()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term
    span: Span | None = _span()


@dataclass(frozen=True)
class Not:
    body: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class Forall:
    var: str
    sort: str
    body: "Formula"
    span: Span | None = _span()


Formula = Union[Top, Bottom, Rel, Eq, Not, And, Or, Implies, Exists, Forall]
Quantifier = (Exists, Forall)
Binary = (And, Or, Implies)


def free_vars(node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, (App, Rel)):
        return frozenset().union(*(free_vars(a) for a in node.args))
    if isinstance(node, Eq):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Not):
        return free_vars(node.body)
    if isinstance(node, Binary):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Quantifier):
        return free_vars(node.body) - {node.var}
    return frozenset()


def depth(phi) -> int:
    """Connective nesting depth; atoms have depth 0."""
    if isinstance(phi, Not):
        return 1 + depth(phi.body)
    if isinstance(phi, Quantifier):
        return 1 + depth(phi.body)
    if isinstance(phi, Binary):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 0


def substitute_term(t: Term, var: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == var else t
    return App(t.fn, tuple(substitute_term(a, var, s) for a in t.args), span=t.span)


def substitute(phi: Formula, var: str, t: Term) -> Formula:
    """Capture-avoiding substitution ``phi[t/var]``."""
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(substitute_term(a, var, t) for a in phi.args), span=phi.span)
    if isinstance(phi, Eq):
        return Eq(substitute_term(phi.left, var, t), substitute_term(phi.right, var, t), span=phi.span)
    if isinstance(phi, Not):
        return Not(substitute(phi.body, var, t), span=phi.span)
    if isinstance(phi, Binary):
        return type(phi)(substitute(phi.left, var, t), substitute(phi.right, var, t), span=phi.span)
    if phi.var == var:
        return phi
    bound, body = phi.var, phi.body
    incoming = free_vars(t)
    if bound in incoming and var in free_vars(body):
        taken = incoming | free_vars(body)
        n = 0
        while f"{bound}{n}" in taken:
            n += 1
        fresh = f"{bound}{n}"
        body = substitute(body, bound, Var(fresh))
        bound = fresh
    return type(phi)(bound, phi.sort, substitute(body, var, t), span=phi.span)


# -- printing -------------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}
_OPS = {Implies: "=>", Or: "or", And: "and"}


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"{t.fn}({', '.join(print_term(a) for a in t.args)})"


def print_formula(phi: Formula) -> str:
    """Render a formula in the concrete syntax accepted by the parser."""
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Rel):
        if not phi.args:
            return phi.name
        return f"{phi.name}({', '.join(print_term(a) for a in phi.args)})"
    if isinstance(phi, Eq):
        return f"{print_term(phi.left)} = {print_term(phi.right)}"
    if isinstance(phi, Quantifier):
        kw = "exists" if isinstance(phi, Exists) else "forall"
        return f"{kw} {phi.var}:{phi.sort}. {print_formula(phi.body)}"
    if isinstance(phi, Not):
        return f"not {_operand(phi.body, 4)}"
    prec = _PREC[type(phi)]
    if isinstance(phi, Implies):
        left, right = _operand(phi.left, prec + 1), _operand(phi.right, prec)
    else:
        left, right = _operand(phi.left, prec), _operand(phi.right, prec + 1)
    return f"{left} {_OPS[type(phi)]} {right}"


def _operand(phi: Formula, min_prec: int) -> str:
    # binder bodies extend as far right as possible, so a quantifier used
    # as an operand always needs parentheses
    text = print_formula(phi)
    if isinstance(phi, Quantifier):
        return f"({text})"
    if _PREC.get(type(phi), 5) < min_prec:
        return f"({text})"
    return text
