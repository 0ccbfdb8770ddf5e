import random

import pytest
from hypothesis import given, strategies as st

from support import contexts, corpus, random_formula, terms_of_sort
from toposcope.errors import MissingInterpretation
from toposcope.gallery import builtin, builtin_names
from toposcope.lang import (
    App,
    ArityMismatch,
    Eq,
    Exists,
    Forall,
    FormulaSyntaxError,
    Implies,
    Not,
    Or,
    Rel,
    Signature,
    SortMismatch,
    Top,
    UnboundVariable,
    UnknownSymbol,
    Var,
    free_vars,
    interpret_formula,
    interpret_term,
    parse,
    parse_term,
    print_formula,
    substitute,
    substitution_arrow,
    typecheck,
    typecheck_term,
)
from toposcope.lang.syntax import And, depth
from toposcope.lang.semantics import SemanticEnvironment
from toposcope.logic import bottom, pullback_sub, top
from toposcope.presheaf import identity, terminal

SIG = Signature(("A", "B"), {"f": (("A",), "B"), "c": ((), "A"), "m": (("A", "A"), "A")}, {"P": ("A",), "Q": ("A",)})


# -- parsing -------------------------------------------------------------------


def test_parse_examples():
    assert parse("exists x:A. f(x) = c") == Exists("x", "A", Eq(App("f", (Var("x"),)), Var("c")))
    assert parse("forall x:A. (P(x) => Q(x))") == Forall("x", "A", Implies(Rel("P", (Var("x"),)), Rel("Q", (Var("x"),))))


def test_precedence():
    p, q, r = Rel("p", ()), Rel("q", ()), Rel("r", ())
    assert parse("p or q and r") == Or(p, And(q, r))
    assert parse("not p and q") == And(Not(p), q)
    assert parse("p => q => r") == Implies(p, Implies(q, r))
    assert parse("p and q => r or p") == Implies(And(p, q), Or(r, p))
    assert parse("(p => q) => r") == Implies(Implies(p, q), r)
    assert parse("p or q or r") == Or(Or(p, q), r)


def test_binder_body_extends_right():
    phi = parse("exists x:A. P(x) and Q(x) => true")
    assert isinstance(phi, Exists) and isinstance(phi.body, Implies)
    assert parse("p and exists x:A. P(x) or q") == And(Rel("p", ()), Exists("x", "A", Or(Rel("P", (Var("x"),)), Rel("q", ()))))


def test_spans():
    phi = parse("exists x:A.\n  f(x) = c")
    assert phi.span.start == 0 and phi.span.line == 1
    eq = phi.body
    assert (eq.span.line, eq.span.col) == (2, 3)
    assert eq.left.span.start == 14 and eq.left.span.end == 18


def test_missing_body():
    text = "exists x:A"
    with pytest.raises(FormulaSyntaxError) as err:
        parse(text)
    e = err.value
    assert (e.line, e.col, e.offset) == (1, len(text) + 1, len(text))
    assert e.expected == {"."}
    assert "end of input" in str(e)


@pytest.mark.parametrize(
    "text,line,col,expected",
    [
        ("P(x", 1, 4, {",", ")"}),
        ("p and", 1, 6, {"true", "false", "not", "exists", "forall", "(", "identifier"}),
        ("exists :A. p", 1, 8, {"identifier"}),
        ("exists x A. p", 1, 10, {":"}),
        ("(p or q", 1, 8, {")"}),
        ("p q", 1, 3, {"and", "or", "=>", "end of input"}),
        ("p and\n  = q", 2, 3, {"true", "false", "not", "exists", "forall", "(", "identifier"}),
        ("x = ", 1, 5, {"identifier"}),
    ],
)
def test_syntax_errors(text, line, col, expected):
    with pytest.raises(FormulaSyntaxError) as err:
        parse(text)
    assert (err.value.line, err.value.col) == (line, col)
    assert err.value.expected == expected


def test_bad_character():
    with pytest.raises(FormulaSyntaxError) as err:
        parse("p &  q")
    assert (err.value.line, err.value.col) == (1, 3)


def test_keywords_are_reserved():
    with pytest.raises(FormulaSyntaxError):
        parse("exists and:A. true")


# -- printing round-trip --------------------------------------------------------


def test_print_examples():
    assert print_formula(parse("p => (q => r)")) == "p => q => r"
    assert print_formula(parse("(p => q) => r")) == "(p => q) => r"
    assert print_formula(parse("(exists x:A. P(x)) and q")) == "(exists x:A. P(x)) and q"
    assert print_formula(parse("not (p and q)")) == "not (p and q)"
    assert print_formula(parse("f(c()) = c")) == "f(c()) = c"


@pytest.mark.parametrize("name", builtin_names())
def test_round_trip_exhaustive(name):
    sig = builtin(name).signature
    for ctx in contexts(sig):
        for phi in corpus(sig, ctx, 2, pool=2):
            assert parse(print_formula(phi)) == phi


@given(st.sampled_from(builtin_names()), st.integers(0, 10**6), st.integers(0, 4))
def test_round_trip_random(name, seed, d):
    sig = builtin(name).signature
    rng = random.Random(seed)
    phi = random_formula(sig, rng.choice(contexts(sig)), d, rng)
    text = print_formula(phi)
    assert parse(text) == phi
    assert print_formula(parse(text)) == text
    assert depth(phi) == d


# -- type checking ----------------------------------------------------------------


def test_typecheck_examples():
    t = typecheck_term(parse_term("f(x)"), SIG, [("x", "A")])
    assert t.sort == "B" and t.args[0].sort == "A"
    with pytest.raises(SortMismatch) as err:
        typecheck_term(parse_term("f(x)"), SIG, [("x", "B")])
    assert (err.value.span.col, err.value.span.start) == (3, 2)
    with pytest.raises(SortMismatch) as err:
        typecheck(parse("x = y"), SIG, [("x", "A"), ("y", "B")])
    assert err.value.span.start == 0


def test_typecheck_errors_carry_spans():
    with pytest.raises(UnboundVariable) as err:
        typecheck(parse("P(c) and P(z)"), SIG)
    assert (err.value.span.line, err.value.span.col) == (1, 12)
    with pytest.raises(ArityMismatch) as err:
        typecheck(parse("\nP(x, x)"), SIG, [("x", "A")])
    assert (err.value.span.line, err.value.span.col) == (2, 1)
    with pytest.raises(UnknownSymbol):
        typecheck(parse("R(x)"), SIG, [("x", "A")])
    with pytest.raises(SortMismatch):
        typecheck(parse("exists y:B. P(y)"), SIG)


def test_constants_and_shadowing():
    phi = typecheck(parse("P(c) and exists x:B. forall x:A. P(x)"), SIG)
    assert phi.left.args[0] == App("c", ())
    assert free_vars(parse("exists x:A. P(x) and Q(y)")) == {"y"}


def test_signature_validation():
    from toposcope.errors import ValidationError

    with pytest.raises(ValidationError):
        Signature(("A",), {"f": (("A",), "Z")})
    with pytest.raises(ValidationError):
        Signature(("A", "A"))


# -- interpretation -----------------------------------------------------------------


def test_variable_is_identity():
    env = builtin("set01")
    A = env.sorts["A"]
    assert interpret_term(env, [("x", "A")], parse_term("x")) == identity(A)


def test_constant_is_global_element():
    env = builtin("set01")
    name = interpret_term(env, [], parse_term("c"))
    assert name.src == terminal(env.site) and name.tgt == env.sorts["B"]
    assert name.components["*"] == {"*": "0"}


def test_constant_map():
    env = builtin("set01")
    assert interpret_term(env, [("x", "A")], parse_term("g(x)")) == env.functions["g"]
    assert interpret_term(env, [("x", "A")], parse_term("f(x)")) != env.functions["g"]


def test_formula_examples():
    env = builtin("crown_double_cover")
    one = terminal(env.site)
    assert interpret_formula(env, [], parse("true")) == top(one)
    assert interpret_formula(env, [], parse("false")) == bottom(one)
    assert interpret_formula(env, [], parse("exists x:F2. true")) == top(one)
    set01 = builtin("set01")
    assert interpret_formula(set01, [], parse("exists x:A. not (f(x) = g(x))")) == top(terminal(set01.site))
    assert interpret_formula(set01, [("x", "A")], parse("f(x) = g(x)")).parts["*"] == {"0"}


def test_missing_interpretation():
    env = builtin("set01")
    bare = SemanticEnvironment(env.site, env.sorts)
    with pytest.raises(MissingInterpretation):
        interpret_formula(bare, [("z", "C")], parse("true"))


def _sub_instance(name, seed, d):
    env = builtin(name)
    sig = env.signature
    rng = random.Random(seed)
    ctx = rng.choice(contexts(sig))
    s = rng.choice(sig.sorts)
    terms = terms_of_sort(sig, ctx, s)
    return env, ctx, s, terms, rng


@given(st.sampled_from(builtin_names()), st.integers(0, 10**6), st.integers(0, 3))
def test_substitution_lemma(name, seed, d):
    env, ctx, s, terms, rng = _sub_instance(name, seed, d)
    if not terms:
        return
    t = rng.choice(terms)
    phi = random_formula(env.signature, (*ctx, ("x", s)), d, rng)
    lhs = interpret_formula(env, ctx, substitute(phi, "x", t))
    rhs = pullback_sub(substitution_arrow(env, ctx, "x", t), interpret_formula(env, (*ctx, ("x", s)), phi))
    assert lhs == rhs


@given(st.sampled_from(builtin_names()), st.integers(0, 10**6), st.integers(0, 3))
def test_weakening(name, seed, d):
    env = builtin(name)
    sig = env.signature
    rng = random.Random(seed)
    ctx = rng.choice(contexts(sig))
    phi = random_formula(sig, ctx, d, rng)
    s = rng.choice(sig.sorts)
    ext, proj = env.context(ctx).extension("w", s)
    assert interpret_formula(env, ext.ctx, phi) == pullback_sub(proj, interpret_formula(env, ctx, phi))


def test_substitute_avoids_capture():
    phi = parse("exists y:A. x = y")
    out = substitute(phi, "x", Var("y"))
    assert isinstance(out, Exists) and out.var != "y"
    assert free_vars(out) == {"y"}
    assert substitute(parse("forall x:A. P(x)"), "x", Var("c")) == parse("forall x:A. P(x)")
    assert substitute(parse("P(x) and Top"), "x", App("c", ())) == And(Rel("P", (App("c", ()),)), Rel("Top", ()))
    assert isinstance(parse("true"), Top)
