from itertools import chain, combinations, product as cartesian

import pytest
from hypothesis import assume, given, strategies as st

from conftest import gallery_presheaves, presheaves
from toposcope.errors import AmbientMismatch, NotRestrictionClosed, TypeMismatch
from toposcope.gallery import builtin
from toposcope.logic import (
    Subobject,
    bottom,
    char_map,
    exists_along,
    forall_along,
    heyting,
    implies,
    join,
    meet,
    neg,
    omega,
    pullback_sub,
    sub_from_char,
    subobjects,
    top,
    true_label,
)
from toposcope.presheaf import bang, empty, hom_set, identity, pairing, product, terminal
from toposcope.site import builtin_site

crown = builtin_site("crown")
F2 = builtin("crown_double_cover").sorts["F2"]


def powerset(xs):
    xs = list(xs)
    return chain.from_iterable(combinations(xs, k) for k in range(len(xs) + 1))


def brute_subobjects(A):
    """Restriction-closed families among all pointwise subsets."""
    C = A.site
    objs = list(C.objects)
    out = set()
    for pick in cartesian(*(list(powerset(A(c))) for c in objs)):
        parts = {c: set(p) for c, p in zip(objs, pick)}
        if all(A.act(f, x) in parts[C.src(f)] for f in C.morphism_ids for x in parts[C.tgt(f)]):
            out.add(Subobject(A, parts))
    return out


@st.composite
def subobject_of(draw, A):
    return draw(st.sampled_from(subobjects(A)))


@st.composite
def presheaf_with_subs(draw, n=2, max_size=2):
    A = draw(gallery_presheaves(max_size))
    return (A, *(draw(subobject_of(A)) for _ in range(n)))


@st.composite
def arrow_with_subs(draw):
    A = draw(gallery_presheaves(2))
    B = draw(presheaves(A.site, 2))
    homs = hom_set(A, B)
    assume(homs)
    alpha = draw(st.sampled_from(homs))
    return alpha, draw(subobject_of(A)), draw(subobject_of(B))


# -- Ω -------------------------------------------------------------------------


def test_omega_sizes():
    assert omega(builtin_site("terminal")).sizes() == {"*": 2}
    assert omega(builtin_site("sierpinski")).sizes() == {"•": 2, "★": 3}
    assert omega(crown).sizes() == {"U": 5, "V": 5, "W1": 2, "W2": 2}


def test_omega_actions_pull_back():
    O = omega(crown)
    assert O.act("w1U", "{w1U}") == "{id_W1}"
    assert O.act("w1U", "{w2U}") == "{}"
    assert O.act("w2U", true_label(crown, "U")) == true_label(crown, "W2")


# -- classification --------------------------------------------------------------


def test_char_map_examples():
    A = builtin("set01").sorts["A"]
    chi = char_map(Subobject(A, {"*": {"0"}}))
    assert chi.components["*"] == {"0": "{id_*}", "1": "{}"}
    assert set(char_map(top(F2)).components["U"].values()) == {true_label(crown, "U")}
    assert set(char_map(bottom(F2)).components["U"].values()) == {"{}"}
    assert sub_from_char(char_map(top(A))) == top(A)
    assert len(subobjects(A)) == 4


def test_subobjects_of_double_cover():
    subs = subobjects(F2)
    assert set(subs) == brute_subobjects(F2)
    assert len(subs) == len(hom_set(F2, omega(crown))) == 47
    for S in subs:
        assert sub_from_char(char_map(S)) == S
    for chi in hom_set(F2, omega(crown)):
        assert char_map(sub_from_char(chi)) == chi


@given(gallery_presheaves(max_size=2))
def test_classification_bijection(A):
    subs = subobjects(A)
    assert len(set(subs)) == len(subs)
    assert set(subs) == brute_subobjects(A)
    chis = hom_set(A, omega(A.site))
    assert len(chis) == len(subs)
    assert {char_map(S) for S in subs} == set(chis)


def test_not_restriction_closed():
    with pytest.raises(NotRestrictionClosed):
        Subobject(F2, {"U": {"u0"}})


# -- Heyting structure -------------------------------------------------------------


def test_lattice_units():
    S = Subobject(F2, {"U": {"u0"}, "W1": {"0"}, "W2": {"0"}})
    assert meet(S, top(F2)) == S
    assert join(S, bottom(F2)) == S
    assert heyting("top", ambient=F2) == top(F2)
    assert heyting("neg", S) == neg(S)


def test_implies_is_boolean_on_sets():
    A = builtin("set01").sorts["A"]
    for S in subobjects(A):
        for T in subobjects(A):
            want = {x for x in A("*") if x not in S.parts["*"] or x in T.parts["*"]}
            assert implies(S, T).parts["*"] == want


def test_double_negation_fails_on_sierpinski():
    Y = builtin("sierpinski").sorts["Y"]
    S = Subobject(Y, {"•": set(Y("•"))})
    assert neg(neg(S)) == top(Y)
    assert neg(neg(S)) != S
    assert neg(S) == bottom(Y)
    assert join(S, neg(S)) != top(Y)


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        meet(top(F2), top(terminal(crown)))


@given(presheaf_with_subs(3))
def test_residuation(data):
    A, R, S, T = data
    assert (meet(R, S) <= T) == (R <= implies(S, T))


@given(presheaf_with_subs(2))
def test_lattice_laws(data):
    A, S, T = data
    m, j = meet(S, T), join(S, T)
    assert m <= S and m <= T and S <= j and T <= j
    assert meet(S, join(S, T)) == S == join(S, meet(S, T))
    assert neg(S) == implies(S, bottom(A))
    assert meet(S, neg(S)) == bottom(A)
    assert S <= neg(neg(S))
    assert neg(neg(neg(S))) == neg(S)
    for X in (m, j, implies(S, T), neg(S)):
        X._check()


# -- quantifiers -----------------------------------------------------------------------


def test_pullback_sub_examples():
    S = Subobject(F2, {"U": {"u0"}, "W1": {"0"}, "W2": {"0"}})
    assert pullback_sub(identity(F2), S) == S
    swap = builtin("crown_double_cover").functions["swap"]
    assert pullback_sub(swap, top(F2)) == top(F2)
    from toposcope.presheaf import equalizer_sub

    P, p1, p2 = product(F2, F2)
    diag = equalizer_sub(p1, p2)
    assert pullback_sub(pairing(identity(F2), identity(F2)), diag) == top(F2)
    with pytest.raises(TypeMismatch):
        pullback_sub(swap, top(terminal(crown)))


def test_exists_examples():
    one = terminal(crown)
    S = Subobject(F2, {"U": {"u0"}, "W1": {"0"}, "W2": {"0"}})
    assert exists_along(identity(F2), S) == S
    assert exists_along(bang(F2), top(F2)) == top(one)
    assert exists_along(bang(empty(crown)), top(empty(crown))) == bottom(one)


def test_forall_examples():
    A = builtin("set01").sorts["A"]
    S = Subobject(A, {"*": {"0"}})
    assert forall_along(identity(A), S) == S
    assert forall_along(bang(A), S) == bottom(terminal(A.site))
    assert forall_along(bang(F2), top(F2)) == top(terminal(crown))


def test_forall_is_not_stagewise():
    # over the Sierpinski site a section can hold everywhere now but fail later
    Y = builtin("sierpinski").sorts["Y"]
    S = Subobject(Y, {"•": set(Y("•"))})
    assert forall_along(bang(Y), S).parts == {"•": frozenset({"*"}), "★": frozenset()}


@given(arrow_with_subs())
def test_adjunctions(data):
    alpha, S, T = data
    assert (exists_along(alpha, S) <= T) == (S <= pullback_sub(alpha, T))
    assert (pullback_sub(alpha, T) <= S) == (T <= forall_along(alpha, S))


@given(arrow_with_subs())
def test_frobenius(data):
    alpha, S, T = data
    assert exists_along(alpha, meet(S, pullback_sub(alpha, T))) == meet(exists_along(alpha, S), T)


@given(arrow_with_subs())
def test_quantifier_outputs_closed(data):
    alpha, S, T = data
    for X in (exists_along(alpha, S), forall_along(alpha, S), pullback_sub(alpha, T)):
        X._check()
