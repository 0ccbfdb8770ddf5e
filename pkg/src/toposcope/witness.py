"""Exhaustive search over small presheaves.

Candidates are generated with stage sets ``{"0", ..., "n-1"}`` filled in
object order and restriction tables in morphism-id order.  Results are
re-checked with brute-force code that shares nothing with the backtracking
searches in :mod:`toposcope.presheaf`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations, product
from math import comb
from typing import Iterator

from .errors import BudgetExceeded, ValidationError
from .presheaf import (
    Presheaf,
    find_isomorphism,
    global_element_count,
    is_inhabited_internally,
    validate_presheaf,
)
from .site import FinCat

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class SearchBounds:
    site: FinCat
    max_size: int
    prune: bool = False
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.max_size < 0:
            raise ValidationError("max stage cardinality must be nonnegative")
        if self.budget <= 0:
            raise ValidationError("candidate budget must be positive")


def _free_objects(C: FinCat) -> set[str]:
    """Objects with no non-identity arrow out of them.

    Relabelling the elements at such an object only permutes the rows of the
    restriction tables out of it, so one ordering per multiset of rows suffices.
    """
    sources = {C.src(f) for f in C.non_identities()}
    return {c for c in C.objects if c not in sources}


def _row_choices(C: FinCat, d: str, size: dict, incoming: list[str], sorted_rows: bool):
    """Ways to fill the restriction tables out of ``d``: one row per element."""
    rows = list(product(*(range(size[C.src(f)]) for f in incoming)))
    if sorted_rows:
        r, k = len(rows), size[d]
        n = comb(r + k - 1, k) if r else int(k == 0)
        return combinations_with_replacement(rows, k), n
    return product(rows, repeat=size[d]), len(rows) ** size[d]


def count_candidates(bounds: SearchBounds) -> int:
    """Number of candidate tables :func:`enumerate_presheaves` would visit."""
    C = bounds.site
    objs = list(C.objects)
    free = _free_objects(C) if bounds.prune else set()
    into = {d: [f for f in C.non_identities() if C.tgt(f) == d] for d in objs}
    total = 0
    for sizes in product(range(bounds.max_size + 1), repeat=len(objs)):
        size = dict(zip(objs, sizes))
        n = 1
        for d in objs:
            n *= _row_choices(C, d, size, into[d], d in free)[1]
        total += n
    return total


def enumerate_presheaves(bounds: SearchBounds) -> Iterator[Presheaf]:
    """Every presheaf with stages of size at most ``max_size``.

    With ``prune`` the rows at free objects are generated as multisets,
    which keeps at least one member of every isomorphism class.  Raises
    :class:`BudgetExceeded` up front when the candidate count is over budget.
    """
    C = bounds.site
    total = count_candidates(bounds)
    if total > bounds.budget:
        raise BudgetExceeded(
            f"{total} candidates exceed the budget of {bounds.budget}; "
            "raise the budget or lower the maximum stage size",
            partial_count=0,
        )
    objs = list(C.objects)
    free = _free_objects(C) if bounds.prune else set()
    into = {d: [f for f in C.non_identities() if C.tgt(f) == d] for d in objs}
    arrows = [f for d in objs for f in into[d]]
    for sizes in product(range(bounds.max_size + 1), repeat=len(objs)):
        size = dict(zip(objs, sizes))
        sets = {c: [str(i) for i in range(size[c])] for c in objs}
        choices = [list(_row_choices(C, d, size, into[d], d in free)[0]) for d in objs]
        for fill in product(*choices):
            act = {f: [0] * size[C.tgt(f)] for f in arrows}
            for d, rows in zip(objs, fill):
                for x, row in enumerate(rows):
                    for f, y in zip(into[d], row):
                        act[f][x] = y
            if not _functorial(C, act):
                continue
            actions = {f: {str(x): str(y) for x, y in enumerate(act[f])} for f in arrows}
            for c in objs:
                actions[C.identity[c]] = {x: x for x in sets[c]}
            yield Presheaf(C, sets, actions)


def _functorial(C: FinCat, act) -> bool:
    for g in act:
        for f in act:
            if C.tgt(f) != C.src(g):
                continue
            gf = C.compose(g, f)
            if C.is_identity(gf):
                ok = all(act[f][act[g][x]] == x for x in range(len(act[g])))
            else:
                ok = all(act[gf][x] == act[f][act[g][x]] for x in range(len(act[g])))
            if not ok:
                return False
    return True


def _up_to_iso(candidates) -> list[Presheaf]:
    reps: dict[tuple, list[Presheaf]] = {}
    out = []
    for A in candidates:
        key = (tuple(sorted(A.sizes().items())), global_element_count(A))
        bucket = reps.setdefault(key, [])
        if any(find_isomorphism(A, B) is not None for B in bucket):
            continue
        bucket.append(A)
        out.append(A)
    return out


# -- independent re-checks ----------------------------------------------------


def brute_global_elements(A: Presheaf) -> int:
    """Count compatible families by trying every tuple of elements."""
    C = A.site
    objs = list(C.objects)
    n = 0
    for family in product(*(A(c) for c in objs)):
        pick = dict(zip(objs, family))
        if all(A.act(f, pick[C.tgt(f)]) == pick[C.src(f)] for f in C.morphism_ids):
            n += 1
    return n


def brute_inhabited(A: Presheaf) -> bool:
    return all(len(A(c)) > 0 for c in A.site.objects)


def brute_isomorphic(A: Presheaf, B: Presheaf) -> bool:
    """Try every family of stagewise bijections."""
    C = A.site
    if A.sizes() != B.sizes():
        return False
    objs = list(C.objects)
    for perms in product(*(permutations(B(c)) for c in objs)):
        iso = {c: dict(zip(A(c), p)) for c, p in zip(objs, perms)}
        if all(
            B.act(f, iso[C.tgt(f)][x]) == iso[C.src(f)][A.act(f, x)]
            for f in C.morphism_ids
            for x in A(C.tgt(f))
        ):
            return True
    return False


def revalidate(A: Presheaf) -> Presheaf:
    return validate_presheaf(A.site, A.sets, A.actions)


# -- searches -----------------------------------------------------------------


def search_inhabited_no_point(bounds: SearchBounds) -> list[Presheaf]:
    """Presheaves that are internally inhabited yet have no global element."""
    hits = (
        A
        for A in enumerate_presheaves(bounds)
        if is_inhabited_internally(A) and global_element_count(A) == 0
    )
    found = _up_to_iso(hits) if bounds.prune else list(hits)
    for A in found:
        revalidate(A)
        if not brute_inhabited(A) or brute_global_elements(A) != 0:
            raise AssertionError(f"search returned a presheaf failing the re-check: {A!r}")
    log.info("inhabited-no-point: %d result(s)", len(found))
    return found


def name_profile(A: Presheaf) -> tuple[int, bool]:
    """Global-element count and inhabitedness (stage sizes deliberately left out)."""
    return global_element_count(A), is_inhabited_internally(A)


def search_noniso_same_profile(bounds: SearchBounds) -> list[tuple[Presheaf, Presheaf]]:
    """Pairs of non-isomorphic presheaves sharing a name profile.

    The pairs are drawn from one representative per isomorphism class.
    """
    reps = _up_to_iso(enumerate_presheaves(SearchBounds(bounds.site, bounds.max_size, True, bounds.budget)))
    by_profile: dict[tuple, list[Presheaf]] = {}
    for A in reps:
        by_profile.setdefault(name_profile(A), []).append(A)
    pairs = []
    for group in by_profile.values():
        for i, A in enumerate(group):
            for B in group[i + 1 :]:
                pairs.append((A, B))
    for A, B in pairs:
        if (brute_global_elements(A), brute_inhabited(A)) != (brute_global_elements(B), brute_inhabited(B)):
            raise AssertionError("profile re-check failed")
        if brute_isomorphic(A, B):
            raise AssertionError("pair re-checked as isomorphic")
    return pairs
