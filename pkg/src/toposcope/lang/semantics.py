"""Semantic environments and the interpretation of terms and formulas.

A context ``[(x1, A1), ..., (xn, An)]`` is interpreted as the left-nested
product of the sort interpretations; the empty context is the terminal
presheaf.  Terms become natural transformations out of the context object,
formulas become subobjects of it.
"""

from __future__ import annotations

from functools import cached_property
from typing import Mapping, Sequence

from ..errors import MissingInterpretation, SiteMismatch, TypeMismatch, ValidationError
from .. import logic
from ..logic import Subobject
from ..presheaf import (
    NatTrans,
    Presheaf,
    bang,
    compose,
    product,
    product_many,
    tuple_map,
)
from ..site import FinCat
from .syntax import And, App, Bottom, Eq, Exists, Forall, Implies, Not, Or, Rel, Top, Var
from .typecheck import Signature, typecheck, typecheck_term


class SemanticEnvironment:
    """A site together with an interpretation of a signature over it."""

    def __init__(
        self,
        site: FinCat,
        sorts: Mapping[str, Presheaf],
        functions: Mapping[str, tuple[Sequence[str], str, NatTrans]] | None = None,
        relations: Mapping[str, tuple[Sequence[str], Subobject]] | None = None,
        name: str | None = None,
        doc: str = "",
    ):
        self.site = site
        self.name = name
        self.doc = doc
        self.sorts = dict(sorts)
        functions = dict(functions or {})
        relations = dict(relations or {})
        self.signature = Signature(
            tuple(self.sorts),
            {f: (tuple(args), res) for f, (args, res, _) in functions.items()},
            {r: tuple(args) for r, (args, _) in relations.items()},
        )
        self.functions: dict[str, NatTrans] = {f: nat for f, (_, _, nat) in functions.items()}
        self.relations: dict[str, Subobject] = {r: sub for r, (_, sub) in relations.items()}
        self._validate()
        self._cache: dict = {}

    def _validate(self):
        for s, A in self.sorts.items():
            if A.site != self.site:
                raise SiteMismatch(f"sort {s} lives on a different site")
        for f, nat in self.functions.items():
            args, res = self.signature.functions[f]
            if nat.src != self.arg_object(args) or nat.tgt != self.sorts[res]:
                raise ValidationError(f"interpretation of {f} has the wrong domain or codomain")
        for r, sub in self.relations.items():
            if sub.ambient != self.arg_object(self.signature.relations[r]):
                raise ValidationError(f"interpretation of {r} is not a subobject of its argument object")

    def arg_object(self, sorts: Sequence[str]) -> Presheaf:
        return product_many([self.sorts[s] for s in sorts], self.site)[0]

    def __repr__(self):
        return f"<SemanticEnvironment {self.name or ''} on {self.site!r}>"

    # -- contexts --------------------------------------------------------

    def context(self, ctx: Sequence[tuple[str, str]]) -> "ContextObject":
        key = ("ctx", tuple(ctx))
        if key not in self._cache:
            self._cache[key] = ContextObject(self, tuple(ctx))
        return self._cache[key]


class ContextObject:
    """The presheaf interpreting a context, with one projection per variable."""

    def __init__(self, env: SemanticEnvironment, ctx: tuple[tuple[str, str], ...]):
        for _, s in ctx:
            if s not in env.sorts:
                raise MissingInterpretation(f"sort {s!r} has no interpretation")
        self.env = env
        self.ctx = ctx
        self.presheaf, self.projections = product_many([env.sorts[s] for _, s in ctx], env.site)

    def projection(self, var: str) -> NatTrans:
        for i in range(len(self.ctx) - 1, -1, -1):
            if self.ctx[i][0] == var:
                return self.projections[i]
        raise MissingInterpretation(f"variable {var!r} not in context")

    def extension(self, var: str, sort: str) -> tuple["ContextObject", NatTrans]:
        """The extended context and its projection back onto this one."""
        ext = self.env.context((*self.ctx, (var, sort)))
        if not self.ctx:
            return ext, bang(ext.presheaf)
        _, p1, _ = product(self.presheaf, self.env.sorts[sort])
        return ext, p1

    def decode(self, c: str, z: str) -> dict[str, str]:
        """The assignment of variables encoded by an element of the context."""
        out = {}
        for (v, _), p in zip(self.ctx, self.projections):
            out[v] = p(c, z)
        return out


# -- interpretation ---------------------------------------------------------


def interpret_term(env: SemanticEnvironment, ctx, t) -> NatTrans:
    """The arrow ``[[ctx]] -> [[sort(t)]]`` denoted by ``t``."""
    ctx = tuple(ctx)
    if getattr(t, "sort", None) is None:
        t = typecheck_term(t, env.signature, ctx)
    return _term(env, env.context(ctx), t)


def _term(env, cobj: ContextObject, t) -> NatTrans:
    if isinstance(t, Var):
        return cobj.projection(t.name)
    if t.fn not in env.functions:
        raise MissingInterpretation(f"function symbol {t.fn!r} is not interpreted")
    args, _ = env.signature.functions[t.fn]
    arrows = [_term(env, cobj, a) for a in t.args]
    factors = [env.sorts[s] for s in args]
    return compose(env.functions[t.fn], tuple_map(arrows, factors, cobj.presheaf))


def interpret_formula(env: SemanticEnvironment, ctx, phi) -> Subobject:
    """The subobject of ``[[ctx]]`` carved out by ``phi``."""
    ctx = tuple(ctx)
    typed = typecheck(phi, env.signature, ctx)
    return _formula(env, env.context(ctx), typed)


def _formula(env, cobj: ContextObject, phi) -> Subobject:
    key = ("phi", cobj.ctx, phi)
    cached = env._cache.get(key)
    if cached is not None:
        return cached
    G = cobj.presheaf
    if isinstance(phi, Top):
        out = logic.top(G)
    elif isinstance(phi, Bottom):
        out = logic.bottom(G)
    elif isinstance(phi, Rel):
        if phi.name not in env.relations:
            raise MissingInterpretation(f"relation symbol {phi.name!r} is not interpreted")
        args = env.signature.relations[phi.name]
        arrows = [_term(env, cobj, a) for a in phi.args]
        tupled = tuple_map(arrows, [env.sorts[s] for s in args], G)
        out = logic.pullback_sub(tupled, env.relations[phi.name])
    elif isinstance(phi, Eq):
        from ..presheaf import equalizer_sub

        out = equalizer_sub(_term(env, cobj, phi.left), _term(env, cobj, phi.right))
    elif isinstance(phi, Not):
        out = logic.neg(_formula(env, cobj, phi.body))
    elif isinstance(phi, And):
        out = logic.meet(_formula(env, cobj, phi.left), _formula(env, cobj, phi.right))
    elif isinstance(phi, Or):
        out = logic.join(_formula(env, cobj, phi.left), _formula(env, cobj, phi.right))
    elif isinstance(phi, Implies):
        out = logic.implies(_formula(env, cobj, phi.left), _formula(env, cobj, phi.right))
    elif isinstance(phi, (Exists, Forall)):
        ext, proj = cobj.extension(phi.var, phi.sort)
        body = _formula(env, ext, phi.body)
        quant = logic.exists_along if isinstance(phi, Exists) else logic.forall_along
        out = quant(proj, body)
    else:
        raise TypeMismatch(f"not a formula: {phi!r}")
    env._cache[key] = out
    return out


def substitution_arrow(env: SemanticEnvironment, ctx, var: str, t) -> NatTrans:
    """``<id, [[t]]>: [[ctx]] -> [[ctx, var:sort(t)]]`` used for substitution."""
    ctx = tuple(ctx)
    tt = typecheck_term(t, env.signature, ctx)
    cobj = env.context(ctx)
    ext, _ = cobj.extension(var, tt.sort)
    arrows = [p for p in cobj.projections] + [_term(env, cobj, tt)]
    factors = [env.sorts[s] for _, s in ext.ctx]
    nat = tuple_map(arrows, factors, cobj.presheaf)
    if nat.tgt != ext.presheaf:
        raise TypeMismatch("substitution arrow does not land in the extended context")
    return nat
