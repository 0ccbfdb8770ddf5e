"""Signatures and sort checking."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from ..errors import ToposError, ValidationError
from .syntax import (
    And,
    App,
    Bottom,
    Eq,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    Rel,
    Top,
    Var,
)


class TypeCheckError(ToposError):
    def __init__(self, message, span=None):
        self.span = span
        where = f"{span.line}:{span.col}: " if span is not None else ""
        super().__init__(where + message)


class UnboundVariable(TypeCheckError):
    pass


class ArityMismatch(TypeCheckError):
    pass


class SortMismatch(TypeCheckError):
    pass


class UnknownSymbol(TypeCheckError):
    pass


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    functions: Mapping[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    relations: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.sorts)
        if len(known) != len(self.sorts):
            raise ValidationError("duplicate sort names")
        for f, (args, res) in self.functions.items():
            for s in (*args, res):
                if s not in known:
                    raise ValidationError(f"function {f} mentions unknown sort {s!r}")
        for r, args in self.relations.items():
            for s in args:
                if s not in known:
                    raise ValidationError(f"relation {r} mentions unknown sort {s!r}")
        clash = set(self.functions) & set(self.relations)
        if clash:
            raise ValidationError(f"names used both as function and relation: {sorted(clash)}")


Context = Sequence[tuple[str, str]]


def lookup(ctx: Context, name: str) -> str | None:
    for v, s in reversed(ctx):
        if v == name:
            return s
    return None


def typecheck_term(t, sig: Signature, ctx: Context = ()):
    """Return ``t`` with every node annotated by its sort.

    A bare identifier that is not a bound variable is read as a constant
    (a 0-ary function symbol).
    """
    if isinstance(t, Var):
        s = lookup(ctx, t.name)
        if s is not None:
            return replace(t, sort=s)
        if t.name in sig.functions:
            return typecheck_term(App(t.name, (), span=t.span), sig, ctx)
        raise UnboundVariable(f"unbound variable {t.name!r}", t.span)
    if t.fn not in sig.functions:
        raise UnknownSymbol(f"unknown function symbol {t.fn!r}", t.span)
    arg_sorts, result = sig.functions[t.fn]
    args = _check_args(t.fn, t.args, arg_sorts, sig, ctx, t.span)
    return replace(t, args=args, sort=result)


def _check_args(name, args, expected, sig, ctx, span):
    if len(args) != len(expected):
        raise ArityMismatch(f"{name} takes {len(expected)} argument(s), got {len(args)}", span)
    typed = []
    for a, want in zip(args, expected):
        ta = typecheck_term(a, sig, ctx)
        if ta.sort != want:
            raise SortMismatch(f"argument of {name} has sort {ta.sort}, expected {want}", a.span)
        typed.append(ta)
    return tuple(typed)


def typecheck(phi, sig: Signature, ctx: Context = ()):
    """Sort-check a formula in context ``ctx`` (a list of ``(var, sort)``)."""
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Rel):
        if phi.name not in sig.relations:
            raise UnknownSymbol(f"unknown relation symbol {phi.name!r}", phi.span)
        args = _check_args(phi.name, phi.args, sig.relations[phi.name], sig, ctx, phi.span)
        return replace(phi, args=args)
    if isinstance(phi, Eq):
        left = typecheck_term(phi.left, sig, ctx)
        right = typecheck_term(phi.right, sig, ctx)
        if left.sort != right.sort:
            raise SortMismatch(f"cannot equate terms of sorts {left.sort} and {right.sort}", phi.span)
        return replace(phi, left=left, right=right)
    if isinstance(phi, Not):
        return replace(phi, body=typecheck(phi.body, sig, ctx))
    if isinstance(phi, (And, Or, Implies)):
        return replace(phi, left=typecheck(phi.left, sig, ctx), right=typecheck(phi.right, sig, ctx))
    if isinstance(phi, (Exists, Forall)):
        if phi.sort not in sig.sorts:
            raise UnknownSymbol(f"unknown sort {phi.sort!r}", phi.span)
        return replace(phi, body=typecheck(phi.body, sig, (*ctx, (phi.var, phi.sort))))
    raise TypeError(f"not a formula: {phi!r}")
