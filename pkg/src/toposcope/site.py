"""Finite categories (sites) and sieves.

A :class:`FinCat` stores its composition as an explicit table.  We write
``compose(g, f)`` for ``g . f``, defined when ``tgt(f) == src(g)``.  Presheaves
over a site are contravariant, so a morphism ``f: c -> d`` acts by restriction
from the elements at ``d`` to the elements at ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from .errors import (
    IllTypedComposite,
    MissingIdentity,
    NonAssociative,
    TargetMismatch,
    UnknownObject,
    ValidationError,
)


class FinCat:
    """A validated finite category.  Build one with :func:`validate_category`."""

    def __init__(self, objects, morphisms, identity, table, name=None):
        self.objects: tuple[str, ...] = tuple(objects)
        self.morphisms: dict[str, tuple[str, str]] = dict(morphisms)
        self.identity: dict[str, str] = dict(identity)
        self._table: dict[tuple[str, str], str] = dict(table)
        self.name = name

    def src(self, f: str) -> str:
        return self.morphisms[f][0]

    def tgt(self, f: str) -> str:
        return self.morphisms[f][1]

    def compose(self, g: str, f: str) -> str | None:
        """Return ``g . f`` or None when the pair is not composable."""
        return self._table.get((g, f))

    def is_identity(self, f: str) -> bool:
        return self.identity[self.src(f)] == f

    @cached_property
    def morphism_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.morphisms))

    @cached_property
    def _into(self) -> dict[str, tuple[str, ...]]:
        into = {c: [] for c in self.objects}
        for f in self.morphism_ids:
            into[self.tgt(f)].append(f)
        return {c: tuple(fs) for c, fs in into.items()}

    def morphisms_into(self, c: str) -> tuple[str, ...]:
        """All morphisms with target ``c`` (sorted by id)."""
        self._check_object(c)
        return self._into[c]

    def hom(self, c: str, d: str) -> tuple[str, ...]:
        return tuple(f for f in self.morphisms_into(d) if self.src(f) == c)

    def non_identities(self) -> tuple[str, ...]:
        return tuple(f for f in self.morphism_ids if not self.is_identity(f))

    def _check_object(self, c: str) -> None:
        if c not in self.identity:
            raise UnknownObject(f"unknown object {c!r}")

    def key(self):
        return (
            self.objects,
            tuple(sorted(self.morphisms.items())),
            tuple(sorted(self._table.items())),
        )

    def __eq__(self, other):
        return isinstance(other, FinCat) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        label = self.name or "FinCat"
        return f"<{label}: {len(self.objects)} objects, {len(self.morphisms)} morphisms>"

    def to_json(self) -> dict:
        doc = {
            "objects": list(self.objects),
            "morphisms": [
                {"id": f, "src": self.src(f), "tgt": self.tgt(f)}
                for f in self.non_identities()
            ],
            "compose": [
                [g, f, gf]
                for (g, f), gf in sorted(self._table.items())
                if not (self.is_identity(g) or self.is_identity(f))
            ],
        }
        custom = {c: i for c, i in self.identity.items() if i != f"id_{c}"}
        if custom:
            doc["identities"] = custom
            doc["morphisms"] += [{"id": i, "src": c, "tgt": c} for c, i in custom.items()]
        return doc


def validate_category(raw: Mapping, name: str | None = None) -> FinCat:
    """Validate a raw category description and return a :class:`FinCat`.

    ``raw`` follows the site JSON format: ``objects``, ``morphisms`` (each with
    ``id``, ``src``, ``tgt``) and ``compose`` triples ``[g, f, g.f]``.  An
    object without a listed identity gets ``id_<object>``; composites with
    identities are filled in.  Every non-identity composable pair must appear
    in ``compose``.
    """
    unknown = set(raw) - {"objects", "morphisms", "compose", "identities"}
    if unknown:
        raise ValidationError(f"unknown keys in site description: {sorted(unknown)}")
    objects = list(raw.get("objects", []))
    if len(set(objects)) != len(objects):
        raise ValidationError("duplicate object ids")
    morphisms: dict[str, tuple[str, str]] = {}
    for m in raw.get("morphisms", []):
        if set(m) - {"id", "src", "tgt"}:
            raise ValidationError(f"unknown keys in morphism {m!r}")
        f, s, t = m["id"], m["src"], m["tgt"]
        if f in morphisms:
            raise ValidationError(f"duplicate morphism id {f!r}")
        for c in (s, t):
            if c not in objects:
                raise UnknownObject(f"morphism {f!r} mentions unknown object {c!r}")
        morphisms[f] = (s, t)

    identity = dict(raw.get("identities", {}))
    for c in objects:
        i = identity.get(c)
        if i is None:
            i = f"id_{c}"
            if i in morphisms and morphisms[i] != (c, c):
                raise MissingIdentity(f"{i!r} is taken by a non-endomorphism of {c!r}")
            morphisms.setdefault(i, (c, c))
            identity[c] = i
        elif morphisms.get(i) != (c, c):
            raise MissingIdentity(f"identity {i!r} of {c!r} is not an endomorphism of {c!r}")

    table: dict[tuple[str, str], str] = {}
    for entry in raw.get("compose", []):
        g, f, gf = entry
        for h in (g, f, gf):
            if h not in morphisms:
                raise IllTypedComposite(f"composite ({g}, {f}) mentions unknown morphism {h!r}")
        if morphisms[f][1] != morphisms[g][0]:
            raise IllTypedComposite(f"{g} . {f}: {f} has target {morphisms[f][1]!r}, {g} has source {morphisms[g][0]!r}")
        if morphisms[gf] != (morphisms[f][0], morphisms[g][1]):
            raise IllTypedComposite(
                f"{g} . {f} = {gf}: expected {morphisms[f][0]}->{morphisms[g][1]}, "
                f"{gf} is {morphisms[gf][0]}->{morphisms[gf][1]}"
            )
        if table.get((g, f), gf) != gf:
            raise IllTypedComposite(f"{g} . {f} is listed twice with different values")
        table[(g, f)] = gf

    for f, (s, t) in morphisms.items():
        for key, want in (((identity[t], f), f), ((f, identity[s]), f)):
            have = table.setdefault(key, want)
            if have != want:
                raise MissingIdentity(
                    f"identity law fails: {key[0]} . {key[1]} = {have}, expected {want}"
                )

    for f, (_, t) in morphisms.items():
        for g, (s2, _) in morphisms.items():
            if s2 == t and (g, f) not in table:
                raise IllTypedComposite(f"missing composite {g} . {f}")

    for (g, f), gf in table.items():
        for h, (s3, _) in morphisms.items():
            if s3 != morphisms[g][1]:
                continue
            left = table[(h, gf)]
            right = table[(table[(h, g)], f)]
            if left != right:
                raise NonAssociative(
                    f"{h} . ({g} . {f}) = {left} but ({h} . {g}) . {f} = {right}"
                )

    return FinCat(objects, morphisms, identity, table, name=name)


@dataclass(frozen=True)
class Sieve:
    target: str
    members: frozenset[str]

    def sort_key(self):
        return (len(self.members), tuple(sorted(self.members)))

    def label(self) -> str:
        return "{" + ",".join(sorted(self.members)) + "}"

    def __contains__(self, f):
        return f in self.members


def is_sieve(C: FinCat, target: str, members: Iterable[str]) -> bool:
    members = set(members)
    for f in members:
        if C.tgt(f) != target:
            return False
        for g in C.morphisms_into(C.src(f)):
            if C.compose(f, g) not in members:
                return False
    return True


def sieves_on(C: FinCat, c: str) -> list[Sieve]:
    """All sieves on ``c``, ordered by size then lexicographically."""
    into = C.morphisms_into(c)
    found = []
    for k in range(len(into) + 1):
        for subset in combinations(into, k):
            if is_sieve(C, c, subset):
                found.append(Sieve(c, frozenset(subset)))
    found.sort(key=Sieve.sort_key)
    return found


def maximal_sieve(C: FinCat, c: str) -> Sieve:
    return Sieve(c, frozenset(C.morphisms_into(c)))


def pullback_sieve(C: FinCat, f: str, S: Sieve) -> Sieve:
    """``f^* S = {g | f . g in S}``, a sieve on the source of ``f``."""
    c, d = C.morphisms[f]
    if S.target != d:
        raise TargetMismatch(f"sieve on {S.target!r} cannot be pulled back along {f}: {c}->{d}")
    return Sieve(c, frozenset(g for g in C.morphisms_into(c) if C.compose(f, g) in S.members))


# -- builtin sites ---------------------------------------------------------

TERMINAL = {"objects": ["*"], "morphisms": [], "compose": []}

SIERPINSKI = {
    "objects": ["•", "★"],
    "morphisms": [{"id": "u", "src": "•", "tgt": "★"}],
    "compose": [],
}

# Two arcs U, V covering the circle, meeting in the two pieces W1, W2.
CROWN = {
    "objects": ["U", "V", "W1", "W2"],
    "morphisms": [
        {"id": "w1U", "src": "W1", "tgt": "U"},
        {"id": "w1V", "src": "W1", "tgt": "V"},
        {"id": "w2U", "src": "W2", "tgt": "U"},
        {"id": "w2V", "src": "W2", "tgt": "V"},
    ],
    "compose": [],
}

BUILTIN_SITES = {"terminal": TERMINAL, "sierpinski": SIERPINSKI, "crown": CROWN}

_site_cache: dict[str, FinCat] = {}


def builtin_site(name: str) -> FinCat:
    if name not in BUILTIN_SITES:
        raise UnknownObject(f"no builtin site named {name!r}; choose from {sorted(BUILTIN_SITES)}")
    if name not in _site_cache:
        _site_cache[name] = validate_category(BUILTIN_SITES[name], name=name)
    return _site_cache[name]
