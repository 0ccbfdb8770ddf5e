"""End-to-end independence demo and its renderings (text, TSV, JSON, PNG)."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .forcing import holds_globally
from .gallery import builtin
from .lang import parse
from .lang.semantics import SemanticEnvironment
from .presheaf import (
    coproduct,
    find_isomorphism,
    global_element_count,
    is_inhabited_internally,
    terminal,
)

LEVELS = ("object", "morphism", "element", "internal logic")


@dataclass
class Fact:
    name: str
    value: object
    expected: object
    level: str

    @property
    def ok(self) -> bool:
        return self.value == self.expected


@dataclass
class Claim:
    label: str
    title: str
    varied: str  # the level that changes while the others stay fixed
    facts: list[Fact] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if self.facts and all(f.ok for f in self.facts) else "fail"

    def fact(self, name, value, expected, level):
        self.facts.append(Fact(name, value, expected, level))


@dataclass
class Report:
    claims: list[Claim]

    @property
    def passed(self) -> bool:
        return all(c.verdict == "pass" for c in self.claims)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "claims": [
                {
                    "label": c.label,
                    "title": c.title,
                    "varied": c.varied,
                    "verdict": c.verdict,
                    "facts": [{**asdict(f), "ok": f.ok} for f in c.facts],
                }
                for c in self.claims
            ],
        }


def demo_independence(
    set_env: SemanticEnvironment | None = None,
    cover_env: SemanticEnvironment | None = None,
) -> Report:
    """Check the four separation claims on the builtin fixtures.

    Either environment can be swapped for a modified one; a broken fixture
    shows up as a failing verdict rather than an exception.
    """
    set_env = set_env or builtin("set01")
    cover_env = cover_env or builtin("crown_double_cover")
    claims = []

    c1 = Claim("1", "meaning is not fixed by objects, names and existence", "morphism")
    A, B = set_env.sorts["A"], set_env.sorts["B"]
    f, g = set_env.functions["f"], set_env.functions["g"]
    c1.fact("f and g share domain and codomain", (f.src, f.tgt) == (g.src, g.tgt), True, "object")
    c1.fact("|Hom(1,A)|", global_element_count(A), 2, "element")
    c1.fact("|Hom(1,B)|", global_element_count(B), 2, "element")
    c1.fact("A, B internally inhabited", is_inhabited_internally(A) and is_inhabited_internally(B), True, "internal logic")
    c1.fact("f != g", f != g, True, "morphism")
    claims.append(c1)

    F2 = cover_env.sorts["F2"]
    one = terminal(F2.site)
    F2p1, _, _ = coproduct(F2, one)
    F2F2, _, _ = coproduct(F2, F2)

    c2 = Claim("2", "names are not fixed by objects, meanings and existence", "element")
    c2.fact("|Hom(1,F2)|", global_element_count(F2), 0, "element")
    c2.fact("|Hom(1,F2+1)|", global_element_count(F2p1), 1, "element")
    c2.fact("F2 internally inhabited", is_inhabited_internally(F2), True, "internal logic")
    c2.fact("F2+1 internally inhabited", is_inhabited_internally(F2p1), True, "internal logic")
    claims.append(c2)

    c3 = Claim("3", "internal existence without a global name", "internal logic")
    c3.fact("F2 internally inhabited (!: F2 -> 1 epi)", is_inhabited_internally(F2), True, "internal logic")
    c3.fact("forcing: every stage forces exists x:F2. true", holds_globally(parse("exists x:F2. true"), cover_env), True, "internal logic")
    c3.fact("|Hom(1,F2)|", global_element_count(F2), 0, "element")
    claims.append(c3)

    c4 = Claim("4", "objects are not fixed by name profiles", "object")
    c4.fact("F2 ≅ F2+F2", find_isomorphism(F2, F2F2) is not None, False, "object")
    c4.fact("|Hom(1,F2)| = |Hom(1,F2+F2)|", global_element_count(F2) == global_element_count(F2F2), True, "element")
    c4.fact(
        "inhabited(F2) = inhabited(F2+F2)",
        is_inhabited_internally(F2) == is_inhabited_internally(F2F2),
        True,
        "internal logic",
    )
    claims.append(c4)
    return Report(claims)


# -- renderings ---------------------------------------------------------------


def render_text(report: Report) -> str:
    """Four-level table: one row per level, one column per claim."""
    cols = [[f"({c.label}) {c.varied} varies"] for c in report.claims]
    cells = {}
    for j, c in enumerate(report.claims):
        for level in LEVELS:
            facts = [f for f in c.facts if f.level == level]
            cells[level, j] = [f"{_short(f)}{'' if f.ok else '  <-- FAIL'}" for f in facts] or ["-"]
            cols[j].extend(cells[level, j])
    widths = [max(len(t) for t in col) for col in cols]
    left = max(len(level) for level in LEVELS)

    def row(first, parts):
        return f"{first:<{left}} | " + " | ".join(f"{p:<{w}}" for p, w in zip(parts, widths))

    rule = "-" * left + "-+-" + "-+-".join("-" * w for w in widths)
    lines = [row("level", [col[0] for col in cols]), rule]
    for level in LEVELS:
        height = max(len(cells[level, j]) for j in range(len(cols)))
        for k in range(height):
            parts = [cells[level, j][k] if k < len(cells[level, j]) else "" for j in range(len(cols))]
            lines.append(row(level if k == 0 else "", parts))
        lines.append(rule)
    lines.append("")
    for c in report.claims:
        lines.append(f"({c.label}) {c.title}: {c.verdict.upper()}")
    lines.append("")
    lines.append("all claims pass" if report.passed else "SOME CLAIMS FAIL")
    return "\n".join(lines)


def _short(f: Fact) -> str:
    return f"{f.name.split(' (')[0]}: {f.value}"


def render_tsv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["claim", "level", "fact", "value", "expected", "ok", "verdict"])
    for c in report.claims:
        for f in c.facts:
            w.writerow([c.label, f.level, f.name, f.value, f.expected, f.ok, c.verdict])
    return buf.getvalue()


def render_figure(report: Report, path: Path | str) -> Path:
    """Grid of levels by claims; the varied level is highlighted per claim."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = len(report.claims)
    fig, ax = plt.subplots(figsize=(2.2 * n + 2, 4.2))
    for j, c in enumerate(report.claims):
        for i, level in enumerate(LEVELS):
            facts = [f for f in c.facts if f.level == level]
            if level == c.varied:
                color = "#8fd19e" if c.verdict == "pass" else "#f4a3a3"
            else:
                color = "#e8eef7" if facts else "#f7f7f7"
            y = len(LEVELS) - 1 - i
            ax.add_patch(plt.Rectangle((j, y), 1, 1, facecolor=color, edgecolor="white", linewidth=2))
            label = "varies" if level == c.varied else ("fixed" if facts else "")
            ax.text(j + 0.5, y + 0.5, label, ha="center", va="center", fontsize=9)
    ax.set_xlim(0, n)
    ax.set_ylim(0, len(LEVELS))
    ax.set_xticks([j + 0.5 for j in range(n)])
    ax.set_xticklabels([f"({c.label}) {c.verdict}" for c in report.claims])
    ax.set_yticks([len(LEVELS) - 1 - i + 0.5 for i in range(len(LEVELS))])
    ax.set_yticklabels(LEVELS)
    ax.tick_params(length=0)
    for spine in ax.spines.values():
        spine.set_visible(False)
    ax.set_title("Independence of the four levels")
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_sieve_counts(counts: dict[str, int], path: Path | str, title: str = "") -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(max(3, 0.8 * len(counts) + 1.5), 3))
    ax.bar(list(counts), list(counts.values()), color="#4c72b0")
    ax.set_ylabel("|Ω(c)|")
    ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(report: Report, outdir: Path | str, stem: str = "independence") -> dict[str, Path]:
    """Write the TSV table, JSON record and PNG figure side by side."""
    import json

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"tsv": out / f"{stem}.tsv", "json": out / f"{stem}.json", "png": out / f"{stem}.png"}
    paths["tsv"].write_text(render_tsv(report), encoding="utf-8")
    paths["json"].write_text(json.dumps(report.to_json(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    render_figure(report, paths["png"])
    return paths
