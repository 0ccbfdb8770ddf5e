import sys
from pathlib import Path

from hypothesis import settings, strategies as st

from toposcope.site import validate_category

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def poset_site(n, less):
    """Site for the poset on range(n) generated by the pairs in ``less``."""
    rel = {(i, j) for i, j in less if i < j}
    changed = True
    while changed:  # transitive closure
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    objs = [f"o{i}" for i in range(n)]
    mors = [{"id": f"m{i}{j}", "src": f"o{i}", "tgt": f"o{j}"} for i, j in sorted(rel)]
    comp = [[f"m{j}{k}", f"m{i}{j}", f"m{i}{k}"] for i, j in rel for j2, k in rel if j == j2]
    return validate_category({"objects": objs, "morphisms": mors, "compose": comp})


@st.composite
def poset_sites(draw, max_objects=4):
    n = draw(st.integers(1, max_objects))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    less = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return poset_site(n, less)


@st.composite
def presheaves(draw, site, max_size=3):
    """Presheaves on ``site``; non-functorial draws are rejected."""
    from hypothesis import assume

    from toposcope.errors import NonFunctorial
    from toposcope.presheaf import validate_presheaf

    size = {c: draw(st.integers(0, max_size), label=f"|{c}|") for c in site.objects}
    changed = True
    while changed:  # an arrow out of an empty stage forces its target empty
        changed = False
        for f in site.non_identities():
            if size[site.src(f)] == 0 and size[site.tgt(f)]:
                size[site.tgt(f)] = 0
                changed = True
    sets = {c: [f"e{i}" for i in range(size[c])] for c in site.objects}
    actions = {
        f: {x: draw(st.sampled_from(sets[site.src(f)])) for x in sets[site.tgt(f)]}
        for f in site.non_identities()
    }
    try:
        return validate_presheaf(site, sets, actions)
    except NonFunctorial:
        assume(False)


GALLERY_SITES = ("terminal", "sierpinski", "crown")


@st.composite
def gallery_presheaves(draw, max_size=3):
    from toposcope.site import builtin_site

    site = builtin_site(draw(st.sampled_from(GALLERY_SITES)))
    return draw(presheaves(site, max_size))


@st.composite
def presheaf_pairs(draw, max_size=2):
    from toposcope.site import builtin_site

    site = builtin_site(draw(st.sampled_from(GALLERY_SITES)))
    return draw(presheaves(site, max_size)), draw(presheaves(site, max_size))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.line(i))
