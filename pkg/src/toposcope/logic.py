"""Subobjects, the subobject classifier and the Heyting/quantifier structure.

Subobjects are stored canonically as restriction-closed pointwise subsets of
their ambient presheaf, so equality of subobjects is plain equality.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import combinations
from typing import Mapping

from .errors import AmbientMismatch, NotRestrictionClosed, TypeMismatch
from .presheaf import NatTrans, Presheaf
from .site import FinCat, Sieve, maximal_sieve, pullback_sieve, sieves_on


class Subobject:
    def __init__(self, ambient: Presheaf, parts: Mapping, check: bool = True):
        self.ambient = ambient
        self.parts: dict[str, frozenset[str]] = {
            c: frozenset(parts.get(c, ())) for c in ambient.site.objects
        }
        if check:
            self._check()

    def _check(self):
        A, C = self.ambient, self.ambient.site
        for c in C.objects:
            stray = self.parts[c] - set(A(c))
            if stray:
                raise NotRestrictionClosed(f"{sorted(stray)} are not elements of the ambient at {c!r}")
        for f in C.non_identities():
            c, d = C.morphisms[f]
            for x in self.parts[d]:
                if A.act(f, x) not in self.parts[c]:
                    raise NotRestrictionClosed(
                        f"{x!r} at {d!r} restricts along {f} to {A.act(f, x)!r}, which is missing at {c!r}"
                    )

    @cached_property
    def _key(self):
        return (self.ambient, tuple(self.parts.items()))

    def __eq__(self, other):
        return isinstance(other, Subobject) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __le__(self, other: "Subobject") -> bool:
        _same_ambient(self, other)
        return all(self.parts[c] <= other.parts[c] for c in self.parts)

    def __contains__(self, item):
        c, x = item
        return x in self.parts[c]

    def __repr__(self):
        body = ", ".join(f"{c}:{sorted(xs)}" for c, xs in self.parts.items())
        return f"<Subobject {{{body}}} of {self.ambient!r}>"

    def as_presheaf(self) -> tuple[Presheaf, NatTrans]:
        """The sub-presheaf and its inclusion into the ambient."""
        A, C = self.ambient, self.ambient.site
        sets = {c: [x for x in A(c) if x in self.parts[c]] for c in C.objects}
        actions = {f: {x: A.act(f, x) for x in sets[C.tgt(f)]} for f in C.morphism_ids}
        S = Presheaf(C, sets, actions)
        return S, NatTrans(S, A, {c: {x: x for x in sets[c]} for c in C.objects}, name="incl")

    def to_json(self, ambient_ref=None) -> dict:
        doc = {}
        if ambient_ref is not None:
            doc["ambient"] = ambient_ref
        order = {c: {x: i for i, x in enumerate(self.ambient(c))} for c in self.parts}
        doc["parts"] = {c: sorted(xs, key=order[c].get) for c, xs in self.parts.items()}
        return doc


def _same_ambient(S: Subobject, T: Subobject) -> None:
    if S.ambient != T.ambient:
        raise AmbientMismatch("subobjects of different presheaves")


def top(A: Presheaf) -> Subobject:
    return Subobject(A, {c: A(c) for c in A.site.objects}, check=False)


def bottom(A: Presheaf) -> Subobject:
    return Subobject(A, {}, check=False)


def subobjects(A: Presheaf) -> list[Subobject]:
    """Every subobject of ``A`` (exhaustive enumeration, deterministic order)."""
    C = A.site
    order = sorted(C.objects, key=lambda c: (len(C.morphisms_into(c)), C.objects.index(c)))
    found = []

    def extend(i, parts):
        if i == len(order):
            found.append(Subobject(A, parts, check=False))
            return
        d = order[i]
        xs = A(d)
        for k in range(len(xs) + 1):
            for chosen in combinations(xs, k):
                ok = True
                for f in C.morphisms_into(d):
                    c = C.src(f)
                    if c == d or c not in parts:
                        continue
                    if any(A.act(f, x) not in parts[c] for x in chosen):
                        ok = False
                        break
                if ok:
                    parts[d] = frozenset(chosen)
                    extend(i + 1, parts)
                    del parts[d]

    extend(0, {})
    # endomorphisms and late sources were not checked above
    return [S for S in found if _closed(S)]


def _closed(S: Subobject) -> bool:
    try:
        S._check()
    except NotRestrictionClosed:
        return False
    return True


# -- the subobject classifier ------------------------------------------------


def omega(C: FinCat) -> Presheaf:
    """Ω(c) is the set of sieves on c; Ω(f) pulls sieves back along f."""
    return _omega(C)


@lru_cache(maxsize=None)
def _omega(C: FinCat) -> Presheaf:
    sets = {c: [S.label() for S in sieves_on(C, c)] for c in C.objects}
    actions = {}
    for f in C.morphism_ids:
        d = C.tgt(f)
        actions[f] = {S.label(): pullback_sieve(C, f, S).label() for S in sieves_on(C, d)}
    return Presheaf(C, sets, actions, name="Ω")


def sieve_of_label(C: FinCat, c: str, label: str) -> Sieve:
    inner = label[1:-1]
    return Sieve(c, frozenset(inner.split(",")) if inner else frozenset())


def true_label(C: FinCat, c: str) -> str:
    return maximal_sieve(C, c).label()


def char_map(S: Subobject) -> NatTrans:
    """χ_S(c)(a) = the sieve of arrows f: d -> c along which a lands in S."""
    A = S.ambient
    C = A.site
    Om = omega(C)
    comps = {}
    for c in C.objects:
        comps[c] = {}
        for a in A(c):
            members = frozenset(f for f in C.morphisms_into(c) if A.act(f, a) in S.parts[C.src(f)])
            comps[c][a] = Sieve(c, members).label()
    return NatTrans(A, Om, comps, name="χ")


def sub_from_char(chi: NatTrans) -> Subobject:
    """The pullback of ``true`` along ``chi``."""
    A, C = chi.src, chi.site
    if chi.tgt != omega(C):
        raise TypeMismatch("characteristic maps must land in Ω")
    return Subobject(A, {c: {a for a in A(c) if chi(c, a) == true_label(C, c)} for c in C.objects})


# -- Heyting algebra ---------------------------------------------------------


def meet(S: Subobject, T: Subobject) -> Subobject:
    _same_ambient(S, T)
    return Subobject(S.ambient, {c: S.parts[c] & T.parts[c] for c in S.parts}, check=False)


def join(S: Subobject, T: Subobject) -> Subobject:
    _same_ambient(S, T)
    return Subobject(S.ambient, {c: S.parts[c] | T.parts[c] for c in S.parts}, check=False)


def implies(S: Subobject, T: Subobject) -> Subobject:
    """a ∈ (S ⇒ T)(c) iff every restriction of a that lies in S lies in T."""
    _same_ambient(S, T)
    A, C = S.ambient, S.ambient.site
    parts = {}
    for c in C.objects:
        arrows = C.morphisms_into(c)
        parts[c] = {
            a
            for a in A(c)
            if all(
                A.act(f, a) not in S.parts[C.src(f)] or A.act(f, a) in T.parts[C.src(f)]
                for f in arrows
            )
        }
    return Subobject(A, parts, check=False)


def neg(S: Subobject) -> Subobject:
    return implies(S, bottom(S.ambient))


def heyting(op: str, S: Subobject | None = None, T: Subobject | None = None, ambient: Presheaf | None = None) -> Subobject:
    """Dispatch one of ``meet join implies neg top bottom`` by name."""
    if op == "top":
        return top(ambient if ambient is not None else S.ambient)
    if op == "bottom":
        return bottom(ambient if ambient is not None else S.ambient)
    if op == "neg":
        return neg(S)
    binary = {"meet": meet, "join": join, "implies": implies}
    if op not in binary:
        raise ValueError(f"unknown Heyting operation {op!r}")
    return binary[op](S, T)


# -- change of base and quantifiers -----------------------------------------


def _check_arrow_sub(alpha: NatTrans, S: Subobject, side: str) -> None:
    ambient = alpha.src if side == "src" else alpha.tgt
    if S.ambient != ambient:
        raise TypeMismatch(f"subobject does not live over the {'domain' if side == 'src' else 'codomain'} of the arrow")


def pullback_sub(alpha: NatTrans, T: Subobject) -> Subobject:
    """α*(T): the inverse image of T under α."""
    _check_arrow_sub(alpha, T, "tgt")
    A = alpha.src
    return Subobject(
        A, {c: {a for a in A(c) if alpha(c, a) in T.parts[c]} for c in A.site.objects}, check=False
    )


def exists_along(alpha: NatTrans, S: Subobject) -> Subobject:
    """∃_α(S), the left adjoint of pullback: the pointwise image of S."""
    _check_arrow_sub(alpha, S, "src")
    B = alpha.tgt
    return Subobject(B, {c: {alpha(c, a) for a in S.parts[c]} for c in B.site.objects}, check=False)


def forall_along(alpha: NatTrans, S: Subobject) -> Subobject:
    """∀_α(S), the right adjoint of pullback."""
    _check_arrow_sub(alpha, S, "src")
    A, B, C = alpha.src, alpha.tgt, alpha.site
    fibres = {
        d: {b: [a for a in A(d) if alpha(d, a) == b] for b in B(d)} for d in C.objects
    }
    parts = {}
    for c in C.objects:
        parts[c] = {
            b
            for b in B(c)
            if all(
                a in S.parts[C.src(f)]
                for f in C.morphisms_into(c)
                for a in fibres[C.src(f)][B.act(f, b)]
            )
        }
    return Subobject(B, parts, check=False)
