"""Builtin semantic environments.

The crown site is a four-object model of the circle: two arcs ``U`` and ``V``
overlapping in two disjoint pieces ``W1`` and ``W2``.  A presheaf on it is
determined by the two restriction maps out of each arc.  An n-sheeted cover
is obtained by gluing ``U x n`` and ``V x n`` with the identity over ``W1``
and a cyclic shift over ``W2``; a nonzero shift leaves no consistent global
choice of sheet.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import UnknownBuiltin
from .lang.semantics import SemanticEnvironment
from .logic import Subobject
from .presheaf import (
    TERMINAL_POINT,
    Presheaf,
    coproduct,
    constant,
    empty,
    terminal,
    validate_nat,
    validate_presheaf,
)
from .site import builtin_site


def cyclic_cover(n: int, shift: int = 1, name: str | None = None) -> Presheaf:
    """n-sheeted cover of the crown with monodromy ``j -> j + shift`` over W2."""
    C = builtin_site("crown")
    sheets = [str(i) for i in range(n)]
    sets = {
        "U": [f"u{i}" for i in range(n)],
        "V": [f"v{i}" for i in range(n)],
        "W1": sheets,
        "W2": sheets,
    }
    actions = {
        "w1U": {f"u{i}": str(i) for i in range(n)},
        "w2U": {f"u{i}": str(i) for i in range(n)},
        "w1V": {f"v{j}": str(j) for j in range(n)},
        "w2V": {f"v{j}": str((j + shift) % n) for j in range(n)},
    }
    return validate_presheaf(C, sets, actions, name=name or f"F{n}")


def double_cover(twisted: bool = True) -> Presheaf:
    return cyclic_cover(2, 1 if twisted else 0, name="F2")


def deck_rotation(F: Presheaf, n: int, shift: int = 1, step: int = 1):
    """Sheet rotation ``i -> i + step`` on a cyclic cover; natural for any shift."""
    comps = {
        "U": {f"u{i}": f"u{(i + step) % n}" for i in range(n)},
        "V": {f"v{i}": f"v{(i + step) % n}" for i in range(n)},
        "W1": {str(i): str((i + step) % n) for i in range(n)},
        "W2": {str(i): str((i + step) % n) for i in range(n)},
    }
    return validate_nat(F, F, comps, name="rot")


def set01(g_constant: bool = True) -> SemanticEnvironment:
    """Two-point sets over the terminal site; f is the identity, g is constant 0."""
    C = builtin_site("terminal")
    A = constant(C, ["0", "1"], name="A")
    B = constant(C, ["0", "1"], name="B")
    one = terminal(C)
    f = validate_nat(A, B, {"*": {"0": "0", "1": "1"}}, name="f")
    g_table = {"0": "0", "1": "0"} if g_constant else {"0": "0", "1": "1"}
    g = validate_nat(A, B, {"*": g_table}, name="g")
    c = validate_nat(one, B, {"*": {TERMINAL_POINT: "0"}}, name="c")
    P = Subobject(A, {"*": {"0"}})
    return SemanticEnvironment(
        C,
        {"A": A, "B": B},
        functions={"f": (["A"], "B", f), "g": (["A"], "B", g), "c": ([], "B", c)},
        relations={"P": (["A"], P)},
        name="set01",
        doc="Set: A = B = {0,1}, f = id, g = constant 0, c = 0, P = {0}.",
    )


def sierpinski() -> SemanticEnvironment:
    """Representables over the arrow u: • -> ★; P is supported only at •."""
    C = builtin_site("sierpinski")
    # y(★): arrows into ★; y(•): arrows into •
    Y = validate_presheaf(C, {"★": ["id_★"], "•": ["u"]}, {"u": {"id_★": "u"}}, name="Y")
    D = validate_presheaf(C, {"★": [], "•": ["id_•"]}, {"u": {}}, name="D")
    h = validate_nat(D, Y, {"★": {}, "•": {"id_•": "u"}}, name="h")
    P = Subobject(Y, {"•": {"u"}})
    return SemanticEnvironment(
        C,
        {"Y": Y, "D": D},
        functions={"h": (["D"], "Y", h)},
        relations={"P": (["Y"], P)},
        name="sierpinski",
        doc="Sierpinski site; Y = y(★), D = y(•) (not inhabited), h = y(u), P = {u} at • only.",
    )


def crown_double_cover(twisted: bool = True) -> SemanticEnvironment:
    C = builtin_site("crown")
    F2 = double_cover(twisted)
    swap = deck_rotation(F2, 2, 1 if twisted else 0)
    Z = Subobject(F2, {"U": {"u0"}, "W1": {"0"}, "W2": {"0"}})
    return SemanticEnvironment(
        C,
        {"F2": F2, "Empty": empty(C)},
        functions={"swap": (["F2"], "F2", swap)},
        relations={"Z": (["F2"], Z)},
        name="crown_double_cover",
        doc="Crown site; F2 is the connected double cover (twist over W2), swap exchanges sheets.",
    )


def crown_triple_cover() -> SemanticEnvironment:
    C = builtin_site("crown")
    F3 = cyclic_cover(3, 1)
    Z = Subobject(F3, {"U": {"u0"}, "W1": {"0"}, "W2": {"0"}})
    return SemanticEnvironment(
        C,
        {"F3": F3},
        functions={"rot": (["F3"], "F3", deck_rotation(F3, 3))},
        relations={"Z": (["F3"], Z)},
        name="crown_triple_cover",
        doc="Crown site; F3 is the connected triple cover with monodromy j -> j+1 over W2.",
    )


def crown_constant2() -> SemanticEnvironment:
    C = builtin_site("crown")
    C2 = constant(C, ["0", "1"], name="C2")
    F2 = double_cover()
    one = terminal(C)
    zero = validate_nat(one, C2, {c: {TERMINAL_POINT: "0"} for c in C.objects}, name="zero")
    k = validate_nat(F2, C2, {c: {x: "0" for x in F2(c)} for c in C.objects}, name="k")
    return SemanticEnvironment(
        C,
        {"C2": C2, "F2": F2},
        functions={"zero": ([], "C2", zero), "k": (["F2"], "C2", k)},
        name="crown_constant2",
        doc="Crown site; C2 is the constant two-element presheaf, k: F2 -> C2 is constant.",
    )


def crown_plus_one() -> SemanticEnvironment:
    C = builtin_site("crown")
    F2 = double_cover()
    S, inl, inr = coproduct(F2, terminal(C))
    pt = validate_nat(terminal(C), S, inr.components, name="pt")
    inl = validate_nat(F2, S, inl.components, name="inl")
    return SemanticEnvironment(
        C,
        {"F2": F2, "F2p1": S},
        functions={"inl": (["F2"], "F2p1", inl), "pt": ([], "F2p1", pt)},
        name="crown_plus_one",
        doc="Crown site; F2p1 = F2 + 1 with its inclusion inl and the added point pt.",
    )


@dataclass(frozen=True)
class EnvironmentSpec:
    name: str
    site: str
    doc: str
    build: Callable[[], SemanticEnvironment]


BUILTINS: dict[str, EnvironmentSpec] = {
    spec.name: spec
    for spec in [
        EnvironmentSpec("set01", "terminal", "f = id and g = constant 0 on {0,1}", set01),
        EnvironmentSpec("sierpinski", "sierpinski", "representables on the arrow category", sierpinski),
        EnvironmentSpec("crown_double_cover", "crown", "twisted double cover F2", crown_double_cover),
        EnvironmentSpec("crown_triple_cover", "crown", "connected triple cover F3", crown_triple_cover),
        EnvironmentSpec("crown_constant2", "crown", "constant two-point presheaf C2", crown_constant2),
        EnvironmentSpec("crown_plus_one", "crown", "F2 + 1", crown_plus_one),
    ]
}

_cache: dict[str, SemanticEnvironment] = {}


def builtin(name: str) -> SemanticEnvironment:
    if name not in BUILTINS:
        raise UnknownBuiltin(f"no builtin environment {name!r}; choose from {', '.join(BUILTINS)}")
    if name not in _cache:
        _cache[name] = BUILTINS[name].build()
    return _cache[name]


def builtin_names() -> list[str]:
    return list(BUILTINS)
