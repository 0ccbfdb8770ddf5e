"""Kripke-Joyal forcing over a presheaf site.

This evaluator works directly on elements at stages and never builds
subobjects, so it serves as an independent check on
:func:`toposcope.lang.interpret_formula`.  With the trivial topology the
clauses are the presheaf ones: ``exists`` looks for a witness at the stage
itself and ``or`` is decided stagewise; ``=>``, ``not`` and ``forall``
range over every arrow into the stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .lang.semantics import SemanticEnvironment
from .lang.syntax import (
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
    free_vars,
    print_formula,
)
from .lang.typecheck import UnboundVariable, typecheck
from .presheaf import TERMINAL_POINT, tuple_label
from .errors import TypeMismatch


@dataclass(frozen=True)
class Stage:
    """An object of the site together with values for the free variables.

    ``bindings`` holds ``(variable, sort, element)`` triples; later bindings
    shadow earlier ones.
    """

    obj: str
    bindings: tuple[tuple[str, str, str], ...] = field(default=())

    @classmethod
    def at(cls, obj: str, bindings: Mapping[str, tuple[str, str]] | None = None) -> "Stage":
        """``Stage.at("U", {"x": ("F2", "u0")})``."""
        return cls(obj, tuple((v, s, x) for v, (s, x) in (bindings or {}).items()))

    @property
    def context(self) -> tuple[tuple[str, str], ...]:
        return tuple((v, s) for v, s, _ in self.bindings)

    def value(self, var: str) -> str:
        for v, _, x in reversed(self.bindings):
            if v == var:
                return x
        raise UnboundVariable(f"variable {var!r} has no value at stage {self.obj!r}")

    def bind(self, var: str, sort: str, x: str) -> "Stage":
        return Stage(self.obj, (*self.bindings, (var, sort, x)))

    def restrict(self, env: SemanticEnvironment, f: str) -> "Stage":
        """Move along ``f: d -> obj``, restricting every bound element."""
        d = env.site.src(f)
        return Stage(d, tuple((v, s, env.sorts[s].act(f, x)) for v, s, x in self.bindings))

    def check(self, env: SemanticEnvironment) -> None:
        for v, s, x in self.bindings:
            if s not in env.sorts:
                raise TypeMismatch(f"stage binds {v} to unknown sort {s!r}")
            if x not in env.sorts[s](self.obj):
                raise TypeMismatch(f"{x!r} is not an element of {s} at {self.obj!r}")


def term_value(env: SemanticEnvironment, stage: Stage, t) -> str:
    if isinstance(t, Var):
        return stage.value(t.name)
    nat = env.functions[t.fn]
    if not t.args:
        return nat(stage.obj, TERMINAL_POINT)
    values = [term_value(env, stage, a) for a in t.args]
    return nat(stage.obj, tuple_label(values))


def forces(stage: Stage, phi, env: SemanticEnvironment, trace: list[str] | None = None) -> bool:
    """Whether ``stage`` forces ``phi``.

    Pass a list as ``trace`` to collect an indented derivation.
    """
    stage.check(env)
    typed = typecheck(phi, env.signature, stage.context)
    return _forces(env, stage, typed, trace, 0)


def _memo_key(stage: Stage, phi):
    fv = free_vars(phi)
    relevant = []
    seen = set()
    for v, s, x in reversed(stage.bindings):
        if v in fv and v not in seen:
            seen.add(v)
            relevant.append((v, s, x))
    return (stage.obj, phi, tuple(sorted(relevant)))


def _forces(env, stage: Stage, phi, trace, level) -> bool:
    memo = env._cache.setdefault("forces", {})
    key = None
    if trace is None:
        key = _memo_key(stage, phi)
        hit = memo.get(key)
        if hit is not None:
            return hit
    result = _clause(env, stage, phi, trace, level)
    if key is not None:
        memo[key] = result
    return result


def _log(trace, level, stage, phi, note, result=None):
    if trace is None:
        return
    binds = ", ".join(f"{v}={x}" for v, _, x in stage.bindings)
    verdict = "" if result is None else f" => {'forced' if result else 'not forced'}"
    trace.append(f"{'  ' * level}{stage.obj}[{binds}] ⊩ {print_formula(phi)}  ({note}){verdict}")


def _clause(env, stage: Stage, phi, trace, level) -> bool:
    site = env.site
    c = stage.obj
    entry = len(trace) if trace is not None else 0
    sub = lambda st, psi: _forces(env, st, psi, trace, level + 1)  # noqa: E731

    if isinstance(phi, Top):
        result, note = True, "true"
    elif isinstance(phi, Bottom):
        result, note = False, "false"
    elif isinstance(phi, Rel):
        if phi.args:
            label = tuple_label([term_value(env, stage, a) for a in phi.args])
        else:
            label = TERMINAL_POINT
        result = label in env.relations[phi.name].parts[c]
        note = f"{label} ∈ {phi.name}({c})"
    elif isinstance(phi, Eq):
        a, b = term_value(env, stage, phi.left), term_value(env, stage, phi.right)
        result, note = a == b, f"{a} = {b}"
    elif isinstance(phi, And):
        _log(trace, level, stage, phi, "both conjuncts")
        result = sub(stage, phi.left) and sub(stage, phi.right)
        note = None
    elif isinstance(phi, Or):
        _log(trace, level, stage, phi, "some disjunct at this stage")
        result = sub(stage, phi.left) or sub(stage, phi.right)
        note = None
    elif isinstance(phi, (Implies, Not)):
        left, right = (phi.body, Bottom()) if isinstance(phi, Not) else (phi.left, phi.right)
        _log(trace, level, stage, phi, "every arrow into the stage")
        result = True
        for f in site.morphisms_into(c):
            st = stage.restrict(env, f)
            if sub(st, left) and not sub(st, right):
                result = False
                break
        note = None
    elif isinstance(phi, Exists):
        _log(trace, level, stage, phi, f"witness in {phi.sort}({c})")
        result = any(sub(stage.bind(phi.var, phi.sort, a), phi.body) for a in env.sorts[phi.sort](c))
        note = None
    elif isinstance(phi, Forall):
        _log(trace, level, stage, phi, "every arrow into the stage, every element")
        result = True
        for f in site.morphisms_into(c):
            st = stage.restrict(env, f)
            if not all(sub(st.bind(phi.var, phi.sort, a), phi.body) for a in env.sorts[phi.sort](st.obj)):
                result = False
                break
        note = None
    else:
        raise TypeMismatch(f"not a formula: {phi!r}")

    if trace is not None:
        if note is None:
            trace[entry] += f" => {'forced' if result else 'not forced'}"
        else:
            _log(trace, level, stage, phi, note, result)
    return result


def holds_globally(phi, env: SemanticEnvironment, trace: list[str] | None = None) -> bool:
    """Whether every stage forces the closed formula ``phi``."""
    typed = typecheck(phi, env.signature, ())
    if free_vars(typed):
        raise UnboundVariable(f"formula has free variables {sorted(free_vars(typed))}")
    return all(_forces(env, Stage(c), typed, trace, 0) for c in env.site.objects)


def forcing_subobject_parts(env: SemanticEnvironment, ctx, phi) -> dict[str, set[str]]:
    """Elements of ``[[ctx]]`` whose decoded stage forces ``phi``, per object."""
    ctx = tuple(ctx)
    typed = typecheck(phi, env.signature, ctx)
    cobj = env.context(ctx)
    parts = {}
    for c in env.site.objects:
        parts[c] = set()
        for z in cobj.presheaf(c):
            values = [p(c, z) for p in cobj.projections]
            st = Stage(c, tuple((v, s, x) for (v, s), x in zip(ctx, values)))
            if _forces(env, st, typed, None, 0):
                parts[c].add(z)
    return parts
