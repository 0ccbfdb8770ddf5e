"""Shared generators for the test suite: formula corpora and random presheaves.

Formula depth counts connectives and binders (atoms have depth 0).  The
exhaustive corpus enumerates every formula up to a given depth built from a
small, deterministic pool of atoms per context, so its size stays bounded.
"""

from __future__ import annotations

import random
from itertools import product as cartesian

from toposcope.lang import App, Bottom, Eq, Exists, Forall, Implies, Not, Or, Rel, Top, Var
from toposcope.lang.syntax import And, depth, free_vars
from toposcope.logic import Subobject, subobjects
from toposcope.presheaf import Presheaf, validate_presheaf

BINARY = (And, Or, Implies)
QUANT = (Exists, Forall)


def terms_of_sort(sig, ctx, sort):
    """Variables, constants and unary applications to variables, in that order."""
    out = []
    seen = set()
    for v, s in reversed(ctx):
        if v not in seen and s == sort:
            out.append(Var(v))
        seen.add(v)
    for f, (args, res) in sorted(sig.functions.items()):
        if res == sort and not args:
            out.append(App(f, ()))
    for f, (args, res) in sorted(sig.functions.items()):
        if res == sort and len(args) == 1:
            out.extend(App(f, (t,)) for t in out[:] if isinstance(t, Var) and _sort_of(ctx, t.name) == args[0])
    return out


def _sort_of(ctx, name):
    for v, s in reversed(ctx):
        if v == name:
            return s
    return None


def atoms(sig, ctx):
    """All atomic formulas over ``ctx`` with terms from :func:`terms_of_sort`.

    Atoms mentioning the most recently bound variable come first so that a
    truncated pool still constrains the binder being introduced.
    """
    by_sort = {s: terms_of_sort(sig, ctx, s) for s in sig.sorts}
    found = []
    for r, args in sorted(sig.relations.items()):
        for ts in cartesian(*(by_sort[s] for s in args)):
            found.append(Rel(r, tuple(ts)))
    for s in sig.sorts:
        ts = by_sort[s]
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                found.append(Eq(ts[i], ts[j]))
    newest = ctx[-1][0] if ctx else None
    found.sort(key=lambda a: newest not in free_vars(a))
    return found + [Top(), Bottom()]


def fresh(ctx):
    return f"v{len(ctx)}"


def corpus(sig, ctx=(), max_depth=2, pool=2):
    """Every formula of depth at most ``max_depth`` over a pool of atoms.

    Quantifiers bind a fresh variable of each sort; the body is drawn from
    the corpus of the extended context.
    """
    ctx = tuple(ctx)
    memo = {}

    def build(ctx, d):
        key = (ctx, d)
        if key in memo:
            return memo[key]
        if d == 0:
            memo[key] = atoms(sig, ctx)[:pool]
            return memo[key]
        lower = build(ctx, d - 1)
        out = list(lower)
        top = [a for a in lower if depth(a) == d - 1]
        out.extend(Not(a) for a in top)
        for a in lower:
            for b in lower:
                if max(depth(a), depth(b)) == d - 1:
                    out.extend(op(a, b) for op in BINARY)
        for s in sig.sorts:
            v = fresh(ctx)
            for body in build((*ctx, (v, s)), d - 1):
                if depth(body) == d - 1:
                    out.extend(q(v, s, body) for q in QUANT)
        memo[key] = out
        return out

    return build(ctx, max_depth)


def random_formula(sig, ctx, d, rng: random.Random):
    """A formula of depth exactly ``d`` with every node chosen at random."""
    ctx = tuple(ctx)
    if d == 0:
        return rng.choice(atoms(sig, ctx))
    kind = rng.choice(["not", "bin", "bin", "bin", "quant", "quant"])
    if kind == "not":
        return Not(random_formula(sig, ctx, d - 1, rng))
    if kind == "bin":
        deep = random_formula(sig, ctx, d - 1, rng)
        other = random_formula(sig, ctx, rng.randrange(d), rng)
        if rng.random() < 0.5:
            deep, other = other, deep
        return rng.choice(BINARY)(deep, other)
    s = rng.choice(sig.sorts)
    v = fresh(ctx) if rng.random() < 0.8 or not ctx else rng.choice(ctx)[0]
    return rng.choice(QUANT)(v, s, random_formula(sig, (*ctx, (v, s)), d - 1, rng))


def contexts(sig, limit=2):
    """The empty context, every unary context and a few binary ones."""
    out = [()]
    out.extend(((f"x{0}", s),) for s in sig.sorts)
    pairs = [((f"x0", s), (f"x1", t)) for s in sig.sorts for t in sig.sorts]
    out.extend(pairs[:limit])
    return out


# -- random presheaves -------------------------------------------------------


def random_presheaf(site, rng: random.Random, max_size=3, tries=200) -> Presheaf:
    """Uniform-ish random presheaf with stages of size at most ``max_size``.

    Tables are drawn independently and rejected until functorial, which is
    immediate on sites without nontrivial composites.
    """
    for _ in range(tries):
        sets = {c: [f"e{i}" for i in range(rng.randint(0, max_size))] for c in site.objects}
        actions = {}
        ok = True
        for f in site.non_identities():
            src, tgt = sets[site.src(f)], sets[site.tgt(f)]
            if tgt and not src:
                ok = False
                break
            actions[f] = {x: rng.choice(src) for x in tgt}
        if not ok:
            continue
        try:
            return validate_presheaf(site, sets, actions)
        except Exception:
            continue
    raise RuntimeError("no functorial sample found")


def random_subobject(A: Presheaf, rng: random.Random) -> Subobject:
    """Random restriction-closed family: seed elements closed downward."""
    parts = {c: set() for c in A.site.objects}
    for c in A.site.objects:
        for x in A(c):
            if rng.random() < 0.35:
                for f in A.site.morphisms_into(c):
                    parts[A.site.src(f)].add(A.act(f, x))
    return Subobject(A, parts)


def all_subobjects(A):
    return subobjects(A)
