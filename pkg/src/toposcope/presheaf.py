"""Presheaves on a finite site and the natural transformations between them.

Element labels are strings.  Products label pairs ``(a,b)``, coproducts tag
their summands with ``inl:`` / ``inr:``.  Everything here is immutable once
built; equality is structural.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from typing import Iterator, Mapping, Sequence

from .errors import (
    ActionTypeError,
    NonFunctorial,
    NonNatural,
    SiteMismatch,
    TypeMismatch,
)
from .site import FinCat

TERMINAL_POINT = "*"


class Presheaf:
    """A functor ``C^op -> FinSet``.

    ``sets[c]`` is the ordered tuple of element labels at ``c``; ``actions[f]``
    maps each element at ``tgt(f)`` to its restriction at ``src(f)``.
    """

    def __init__(self, site: FinCat, sets: Mapping, actions: Mapping, name: str | None = None):
        self.site = site
        self.sets: dict[str, tuple[str, ...]] = {c: tuple(sets[c]) for c in site.objects}
        self.actions: dict[str, dict[str, str]] = {f: dict(actions[f]) for f in site.morphism_ids}
        self.name = name

    def __call__(self, c: str) -> tuple[str, ...]:
        return self.sets[c]

    def act(self, f: str, x: str) -> str:
        return self.actions[f][x]

    def sizes(self) -> dict[str, int]:
        return {c: len(xs) for c, xs in self.sets.items()}

    @cached_property
    def _key(self):
        return (
            self.site.key(),
            tuple((c, self.sets[c]) for c in self.site.objects),
            tuple((f, tuple(sorted(self.actions[f].items()))) for f in self.site.morphism_ids),
        )

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Presheaf) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        sizes = ", ".join(f"{c}:{n}" for c, n in self.sizes().items())
        return f"<Presheaf {self.name or ''}[{sizes}]>"

    def to_json(self, site_ref: str | None = None) -> dict:
        doc = {}
        if site_ref is not None:
            doc["site"] = site_ref
        doc["sets"] = {c: list(xs) for c, xs in self.sets.items()}
        doc["actions"] = {f: dict(self.actions[f]) for f in self.site.non_identities()}
        return doc


class NatTrans:
    """A natural transformation ``src -> tgt`` given by its components."""

    def __init__(self, src: Presheaf, tgt: Presheaf, components: Mapping, name: str | None = None):
        self.src = src
        self.tgt = tgt
        self.components: dict[str, dict[str, str]] = {
            c: dict(components[c]) for c in src.site.objects
        }
        self.name = name

    def __call__(self, c: str, x: str) -> str:
        return self.components[c][x]

    @property
    def site(self) -> FinCat:
        return self.src.site

    @cached_property
    def _key(self):
        return (
            self.src,
            self.tgt,
            tuple((c, tuple(sorted(self.components[c].items()))) for c in self.site.objects),
        )

    def __eq__(self, other):
        return isinstance(other, NatTrans) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"<NatTrans {self.name or ''} {self.src!r} -> {self.tgt!r}>"

    def to_json(self) -> dict:
        return {"components": {c: dict(m) for c, m in self.components.items()}}


# -- validation -------------------------------------------------------------


def validate_presheaf(site: FinCat, sets: Mapping, actions: Mapping, name: str | None = None) -> Presheaf:
    """Check typing and functoriality exhaustively and build the presheaf.

    Identity actions may be omitted; every non-identity morphism needs one.
    """
    for c in site.objects:
        if c not in sets:
            raise ActionTypeError(f"no set given for object {c!r}")
        xs = list(sets[c])
        if len(set(xs)) != len(xs):
            raise ActionTypeError(f"duplicate element labels at {c!r}")
    extra = set(sets) - set(site.objects)
    if extra:
        raise ActionTypeError(f"sets given for unknown objects {sorted(extra)}")
    extra = set(actions) - set(site.morphisms)
    if extra:
        raise ActionTypeError(f"actions given for unknown morphisms {sorted(extra)}")

    full = {}
    for f in site.morphism_ids:
        c, d = site.morphisms[f]
        if f in actions:
            table = {str(k): str(v) for k, v in actions[f].items()}
        elif site.is_identity(f):
            table = {x: x for x in sets[c]}
        else:
            raise ActionTypeError(f"no action given for morphism {f}: {c}->{d}")
        if set(table) != set(sets[d]):
            raise ActionTypeError(f"action of {f} must be defined exactly on the elements at {d!r}")
        bad = [v for v in table.values() if v not in set(sets[c])]
        if bad:
            raise ActionTypeError(f"action of {f} lands outside the elements at {c!r}: {bad[0]!r}")
        full[f] = table

    for c in site.objects:
        i = site.identity[c]
        for x in sets[c]:
            if full[i][x] != x:
                raise NonFunctorial(f"action of identity {i} moves {x!r} to {full[i][x]!r}")
    for g in site.morphism_ids:
        for f in site.morphisms_into(site.src(g)):
            gf = site.compose(g, f)
            for x in sets[site.tgt(g)]:
                if full[gf][x] != full[f][full[g][x]]:
                    raise NonFunctorial(
                        f"restriction along {gf} = {g} . {f} disagrees with restricting "
                        f"along {g} then {f} at element {x!r}"
                    )
    return Presheaf(site, sets, full, name=name)


def validate_nat(src: Presheaf, tgt: Presheaf, components: Mapping, name: str | None = None) -> NatTrans:
    if src.site != tgt.site:
        raise SiteMismatch("natural transformation between presheaves on different sites")
    site = src.site
    comps = {}
    for c in site.objects:
        table = {str(k): str(v) for k, v in components.get(c, {}).items()}
        if set(table) != set(src(c)):
            raise ActionTypeError(f"component at {c!r} must be defined exactly on the source elements")
        if any(v not in set(tgt(c)) for v in table.values()):
            raise ActionTypeError(f"component at {c!r} lands outside the target")
        comps[c] = table
    for f in site.non_identities():
        c, d = site.morphisms[f]
        for x in src(d):
            if tgt.act(f, comps[d][x]) != comps[c][src.act(f, x)]:
                raise NonNatural(f"naturality square for {f}: {c}->{d} fails at {x!r}")
    return NatTrans(src, tgt, comps, name=name)


def check_functorial(A: Presheaf) -> None:
    """Re-run the functoriality checks on an existing presheaf."""
    validate_presheaf(A.site, A.sets, A.actions)


# -- basic objects and arrows ----------------------------------------------


def terminal(C: FinCat) -> Presheaf:
    return _terminal(C)


@lru_cache(maxsize=None)
def _terminal(C: FinCat) -> Presheaf:
    return Presheaf(
        C,
        {c: (TERMINAL_POINT,) for c in C.objects},
        {f: {TERMINAL_POINT: TERMINAL_POINT} for f in C.morphism_ids},
        name="1",
    )


def empty(C: FinCat) -> Presheaf:
    return Presheaf(C, {c: () for c in C.objects}, {f: {} for f in C.morphism_ids}, name="0")


def constant(C: FinCat, elements: Sequence[str], name: str | None = None) -> Presheaf:
    elements = tuple(elements)
    return Presheaf(
        C,
        {c: elements for c in C.objects},
        {f: {x: x for x in elements} for f in C.morphism_ids},
        name=name,
    )


def identity(A: Presheaf) -> NatTrans:
    return NatTrans(A, A, {c: {x: x for x in A(c)} for c in A.site.objects}, name="id")


def bang(A: Presheaf) -> NatTrans:
    """The unique arrow ``A -> 1``."""
    one = terminal(A.site)
    return NatTrans(A, one, {c: {x: TERMINAL_POINT for x in A(c)} for c in A.site.objects}, name="!")


def compose(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    """``beta . alpha``."""
    if alpha.tgt != beta.src:
        raise TypeMismatch("cannot compose: codomain of the first arrow is not the domain of the second")
    return NatTrans(
        alpha.src,
        beta.tgt,
        {c: {x: beta.components[c][y] for x, y in alpha.components[c].items()} for c in alpha.site.objects},
    )


def _same_site(A: Presheaf, B: Presheaf) -> None:
    if A.site != B.site:
        raise SiteMismatch("presheaves live on different sites")


# -- finite limits and coproducts ------------------------------------------


def pair_label(a: str, b: str) -> str:
    return f"({a},{b})"


def product(A: Presheaf, B: Presheaf) -> tuple[Presheaf, NatTrans, NatTrans]:
    _same_site(A, B)
    return _product(A, B)


@lru_cache(maxsize=4096)
def _product(A: Presheaf, B: Presheaf):
    C = A.site
    sets, p1, p2 = {}, {}, {}
    for c in C.objects:
        labels = []
        p1[c], p2[c] = {}, {}
        for a in A(c):
            for b in B(c):
                z = pair_label(a, b)
                labels.append(z)
                p1[c][z], p2[c][z] = a, b
        if len(set(labels)) != len(labels):
            raise ActionTypeError(f"ambiguous pair labels at {c!r}; element labels must not contain commas")
        sets[c] = labels
    actions = {
        f: {pair_label(a, b): pair_label(A.act(f, a), B.act(f, b)) for a in A(C.tgt(f)) for b in B(C.tgt(f))}
        for f in C.morphism_ids
    }
    name = f"{A.name}×{B.name}" if A.name and B.name else None
    P = Presheaf(C, sets, actions, name=name)
    return P, NatTrans(P, A, p1, name="p1"), NatTrans(P, B, p2, name="p2")


def pairing(alpha: NatTrans, beta: NatTrans) -> NatTrans:
    """``<alpha, beta>: X -> A x B``."""
    if alpha.src != beta.src:
        raise TypeMismatch("pairing needs arrows with a common domain")
    P, _, _ = product(alpha.tgt, beta.tgt)
    return NatTrans(
        alpha.src,
        P,
        {
            c: {x: pair_label(alpha.components[c][x], beta.components[c][x]) for x in alpha.src(c)}
            for c in alpha.site.objects
        },
    )


def product_many(factors: Sequence[Presheaf], site: FinCat | None = None) -> tuple[Presheaf, list[NatTrans]]:
    """Left-nested product ``((A1 x A2) x A3) ...`` with its projections.

    The empty product is the terminal presheaf and a single factor is itself.
    """
    if not factors:
        if site is None:
            raise TypeMismatch("empty product needs an explicit site")
        return terminal(site), []
    P = factors[0]
    projections = [identity(P)]
    for A in factors[1:]:
        Q, q1, q2 = product(P, A)
        projections = [compose(p, q1) for p in projections] + [q2]
        P = Q
    return P, projections


def tuple_map(arrows: Sequence[NatTrans], factors: Sequence[Presheaf], src: Presheaf) -> NatTrans:
    """Pair arrows ``src -> factors[i]`` into the left-nested product."""
    if len(arrows) != len(factors):
        raise TypeMismatch("arity mismatch")
    if not arrows:
        return bang(src)
    result = arrows[0]
    for alpha in arrows[1:]:
        result = pairing(result, alpha)
    return result


def tuple_label(values: Sequence[str]) -> str:
    """Label of a tuple of elements in a left-nested product (len >= 1)."""
    label = values[0]
    for v in values[1:]:
        label = pair_label(label, v)
    return label


def coproduct(A: Presheaf, B: Presheaf) -> tuple[Presheaf, NatTrans, NatTrans]:
    _same_site(A, B)
    return _coproduct(A, B)


@lru_cache(maxsize=1024)
def _coproduct(A: Presheaf, B: Presheaf):
    C = A.site
    sets = {c: [f"inl:{a}" for a in A(c)] + [f"inr:{b}" for b in B(c)] for c in C.objects}
    actions = {}
    for f in C.morphism_ids:
        d = C.tgt(f)
        table = {f"inl:{a}": f"inl:{A.act(f, a)}" for a in A(d)}
        table.update({f"inr:{b}": f"inr:{B.act(f, b)}" for b in B(d)})
        actions[f] = table
    name = f"{A.name}+{B.name}" if A.name and B.name else None
    S = Presheaf(C, sets, actions, name=name)
    i1 = NatTrans(A, S, {c: {a: f"inl:{a}" for a in A(c)} for c in C.objects}, name="inl")
    i2 = NatTrans(B, S, {c: {b: f"inr:{b}" for b in B(c)} for c in C.objects}, name="inr")
    return S, i1, i2


def equalizer_sub(alpha: NatTrans, beta: NatTrans):
    """The subobject of the common domain on which ``alpha`` and ``beta`` agree."""
    from .logic import Subobject

    if alpha.src != beta.src or alpha.tgt != beta.tgt:
        raise TypeMismatch("equalizer needs two parallel arrows")
    A = alpha.src
    parts = {c: {x for x in A(c) if alpha(c, x) == beta(c, x)} for c in A.site.objects}
    return Subobject(A, parts)


def pullback(alpha: NatTrans, beta: NatTrans) -> tuple[Presheaf, NatTrans, NatTrans]:
    """Pullback of ``alpha: A -> C`` and ``beta: B -> C``, built inside ``A x B``."""
    if alpha.tgt != beta.tgt:
        raise TypeMismatch("pullback needs arrows with a common codomain")
    P, p1, p2 = product(alpha.src, beta.src)
    eq = equalizer_sub(compose(alpha, p1), compose(beta, p2))
    Q, incl = eq.as_presheaf()
    return Q, compose(p1, incl), compose(p2, incl)


# -- element-level facts -----------------------------------------------------


def _nat_search(A: Presheaf, B: Presheaf, bijective: bool = False) -> Iterator[NatTrans]:
    """Enumerate natural transformations ``A -> B`` by backtracking.

    Elements of ``A`` are assigned in a fixed order (objects with fewer
    incoming arrows first); every naturality square is checked as soon as both
    of its corners are assigned.
    """
    C = A.site
    if bijective and A.sizes() != B.sizes():
        return
    incoming = {c: len(C.morphisms_into(c)) for c in C.objects}
    order = sorted(C.objects, key=lambda c: (incoming[c], C.objects.index(c)))
    slots = [(c, x) for c in order for x in A(c)]
    pos = {s: i for i, s in enumerate(slots)}
    # square for f: c->d at y in A(d): B.act(f, img(d, y)) == img(c, A.act(f, y))
    checks: list[list[tuple[str, str, str, str]]] = [[] for _ in slots]
    for f in C.non_identities():
        c, d = C.morphisms[f]
        for y in A(d):
            x = A.act(f, y)
            later = max(pos[(d, y)], pos[(c, x)])
            checks[later].append((f, c, d, y))
    image: dict[str, dict[str, str]] = {c: {} for c in C.objects}
    used: dict[str, set[str]] = {c: set() for c in C.objects}

    def extend(i):
        if i == len(slots):
            yield NatTrans(A, B, image)
            return
        c, x = slots[i]
        for b in B(c):
            if bijective and b in used[c]:
                continue
            image[c][x] = b
            ok = all(
                B.act(f, image[d][y]) == image[cc][A.act(f, y)] for f, cc, d, y in checks[i]
            )
            if ok:
                used[c].add(b)
                yield from extend(i + 1)
                used[c].discard(b)
            del image[c][x]

    yield from extend(0)


def hom_set(A: Presheaf, B: Presheaf) -> list[NatTrans]:
    """All natural transformations ``A -> B`` in deterministic order."""
    _same_site(A, B)
    return list(_nat_search(A, B))


def global_elements(A: Presheaf) -> list[NatTrans]:
    """All arrows ``1 -> A``, i.e. the compatible families of elements."""
    return _global_elements(A)


@lru_cache(maxsize=4096)
def _global_elements(A: Presheaf) -> list[NatTrans]:
    return list(_nat_search(terminal(A.site), A))


def global_element_count(A: Presheaf) -> int:
    return len(_global_elements(A))


def is_epi(alpha: NatTrans) -> bool:
    """Pointwise surjectivity, which characterises epis of presheaves."""
    return all(set(alpha.components[c].values()) == set(alpha.tgt(c)) for c in alpha.site.objects)


def is_mono(alpha: NatTrans) -> bool:
    return all(
        len(set(alpha.components[c].values())) == len(alpha.src(c)) for c in alpha.site.objects
    )


def is_iso(alpha: NatTrans) -> bool:
    return is_epi(alpha) and is_mono(alpha)


def is_inhabited_internally(A: Presheaf) -> bool:
    """Whether ``A -> 1`` is epi, i.e. ``exists x:A. true`` holds internally."""
    return is_epi(bang(A))


def profile(A: Presheaf) -> dict:
    return {
        "stage_sizes": A.sizes(),
        "global_elements": global_element_count(A),
        "inhabited": is_inhabited_internally(A),
    }


def find_isomorphism(A: Presheaf, B: Presheaf) -> NatTrans | None:
    """A natural isomorphism ``A -> B`` if one exists, else None.  Exact."""
    _same_site(A, B)
    if A.sizes() != B.sizes():
        return None
    if global_element_count(A) != global_element_count(B):
        return None
    return next(_nat_search(A, B, bijective=True), None)
