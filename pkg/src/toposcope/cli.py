"""Command-line interface.

Exit codes: 0 success, 1 failed check, 2 usage or parse error, 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io as tio
from .errors import BudgetExceeded, ToposError, UnknownBuiltin, UnknownObject, ValidationError
from .forcing import Stage, forces, holds_globally
from .gallery import builtin_names
from .lang import FormulaSyntaxError, TypeCheckError, parse
from .logic import omega
from .presheaf import (
    find_isomorphism,
    global_elements,
    is_epi,
    is_inhabited_internally,
    is_mono,
)
from .report import demo_independence, render_sieve_counts, render_text, write_report
from .site import sieves_on
from .witness import SearchBounds, search_inhabited_no_point, search_noniso_same_profile

log = logging.getLogger("toposcope")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out(args, text: str, doc) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        print(text)


def _expectation(args, nonempty: bool) -> int:
    if args.expect == "nonempty" and not nonempty:
        return EXIT_FAILED
    if args.expect == "empty" and nonempty:
        return EXIT_FAILED
    return EXIT_OK


def _formula_text(text: str) -> str:
    if text.endswith(".fol") and Path(text).is_file():
        return Path(text).read_text(encoding="utf-8")
    return text


# -- subcommands ---------------------------------------------------------------


def cmd_env(args) -> int:
    if args.action == "export":
        env = tio.load_environment(args.ref)
        if args.out:
            path = tio.export_environment(env, args.out)
            _out(args, f"wrote {path}", {"env": str(path)})
        else:
            print(json.dumps(tio.environment_to_json(env), indent=2, ensure_ascii=False))
        return EXIT_OK
    env = tio.load_environment(args.ref)
    doc = {
        "name": env.name,
        "site": {"objects": list(env.site.objects), "morphisms": len(env.site.morphisms)},
        "sorts": {s: A.sizes() for s, A in env.sorts.items()},
        "functions": {f: {"args": list(a), "result": r} for f, (a, r) in env.signature.functions.items()},
        "relations": {r: list(a) for r, a in env.signature.relations.items()},
    }
    lines = [f"environment {env.name}: site with objects {', '.join(env.site.objects)}"]
    lines += [f"  sort {s}: " + ", ".join(f"{c}:{n}" for c, n in sizes.items()) for s, sizes in doc["sorts"].items()]
    lines += [f"  function {f}: ({', '.join(v['args'])}) -> {v['result']}" for f, v in doc["functions"].items()]
    lines += [f"  relation {r}({', '.join(a)})" for r, a in doc["relations"].items()]
    _out(args, "\n".join(lines), doc)
    return EXIT_OK


def _sort(env, name):
    if name not in env.sorts:
        raise UsageError(f"no sort {name!r} in environment {env.name} (sorts: {', '.join(env.sorts)})")
    return env.sorts[name]


def cmd_check(args) -> int:
    env = tio.load_environment(args.env)
    if args.what == "global-elements":
        A = _sort(env, args.target)
        elems = global_elements(A)
        doc = {"sort": args.target, "count": len(elems), "elements": [g.components for g in elems]}
        _out(args, str(len(elems)), doc)
        return _expectation(args, bool(elems))
    if args.what == "inhabited":
        value = is_inhabited_internally(_sort(env, args.target))
    else:
        if args.target not in env.functions:
            raise UsageError(f"no function symbol {args.target!r} in environment {env.name}")
        nat = env.functions[args.target]
        value = is_epi(nat) if args.what == "epi" else is_mono(nat)
    _out(args, "true" if value else "false", {args.what: value, "target": args.target})
    return _expectation(args, value)


def _bindings(env, specs):
    out = {}
    for spec in specs or []:
        try:
            var, rest = spec.split("=", 1)
            sort, elem = rest.split(":", 1)
        except ValueError:
            raise UsageError(f"binding {spec!r} must look like var=Sort:element") from None
        out[var] = (sort, elem)
    return out


def cmd_eval(args) -> int:
    env = tio.load_environment(args.env)
    if args.stage not in env.site.objects:
        raise UsageError(f"unknown stage {args.stage!r}; objects are {', '.join(env.site.objects)}")
    phi = parse(_formula_text(args.formula))
    trace = [] if args.trace else None
    value = forces(Stage.at(args.stage, _bindings(env, args.bind)), phi, env, trace)
    _emit_truth(args, value, trace)
    return _expectation(args, value)


def cmd_eval_global(args) -> int:
    env = tio.load_environment(args.env)
    phi = parse(_formula_text(args.formula))
    trace = [] if args.trace else None
    value = holds_globally(phi, env, trace)
    _emit_truth(args, value, trace)
    return _expectation(args, value)


def _emit_truth(args, value, trace):
    doc = {"value": value}
    text = "true" if value else "false"
    if trace is not None:
        doc["trace"] = trace
        text = "\n".join(trace + [text])
    _out(args, text, doc)


def cmd_iso(args) -> int:
    env = tio.load_environment(args.env)
    iso = find_isomorphism(_sort(env, args.left), _sort(env, args.right))
    if iso is None:
        _out(args, "none", {"isomorphic": False})
    else:
        lines = [f"{c}: " + ", ".join(f"{x}->{y}" for x, y in m.items()) for c, m in iso.components.items()]
        _out(args, "\n".join(lines), {"isomorphic": True, "components": iso.components})
    return _expectation(args, iso is not None)


def cmd_omega(args) -> int:
    site = tio.load_site(args.site)
    Om = omega(site)
    counts = {c: len(Om(c)) for c in site.objects}
    doc = {"counts": counts, "sieves": {c: list(Om(c)) for c in site.objects}}
    text = ",".join(str(n) for n in counts.values())
    if args.trace:
        text += "\n" + "\n".join(f"{c}: {' '.join(S.label() for S in sieves_on(site, c))}" for c in site.objects)
    if args.out:
        render_sieve_counts(counts, Path(args.out) / "omega.png", title=f"Ω on {site.name or args.site}")
        (Path(args.out) / "omega.tsv").write_text(
            "object\tsieves\n" + "".join(f"{c}\t{n}\n" for c, n in counts.items()), encoding="utf-8"
        )
    _out(args, text, doc)
    return EXIT_OK


def cmd_search(args) -> int:
    site = tio.load_site(args.site)
    bounds = SearchBounds(site, args.max_size, prune=args.prune, budget=args.budget)
    site_doc = tio.site_ref(site) or site.to_json()
    if args.kind == "inhabited-no-point":
        found = search_inhabited_no_point(bounds)
        rows = [(i, A) for i, A in enumerate(found)]
        if args.out:
            for i, A in rows:
                tio.write_presheaf(A, Path(args.out) / f"witness_{i:04d}.json")
        lines = ["index\t" + "\t".join(site.objects)]
        lines += [f"{i}\t" + "\t".join(str(n) for n in A.sizes().values()) for i, A in rows]
        lines.append(f"{len(found)} presheaf(s) inhabited with no global element")
        doc = {"count": len(found), "presheaves": [A.to_json(site_ref=site_doc) for A in found]}
        _out(args, "\n".join(lines), doc)
        return _expectation(args, bool(found))
    pairs = search_noniso_same_profile(bounds)
    if args.out:
        for i, (A, B) in enumerate(pairs):
            tio.write_presheaf(A, Path(args.out) / f"pair_{i:04d}_a.json")
            tio.write_presheaf(B, Path(args.out) / f"pair_{i:04d}_b.json")
    lines = ["index\tsizes_a\tsizes_b"]
    lines += [
        f"{i}\t{','.join(map(str, A.sizes().values()))}\t{','.join(map(str, B.sizes().values()))}"
        for i, (A, B) in enumerate(pairs)
    ]
    lines.append(f"{len(pairs)} non-isomorphic pair(s) with equal name profiles")
    doc = {
        "count": len(pairs),
        "pairs": [[A.to_json(site_ref=site_doc), B.to_json(site_ref=site_doc)] for A, B in pairs],
    }
    _out(args, "\n".join(lines), doc)
    return _expectation(args, bool(pairs))


def cmd_demo(args) -> int:
    report = demo_independence()
    if args.out:
        paths = write_report(report, args.out)
        log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    _out(args, render_text(report), report.to_json())
    return EXIT_OK if report.passed else EXIT_FAILED


# -- parser ------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    p.add_argument("--trace", action="store_true", default=argparse.SUPPRESS, help="show derivations")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--expect-nonempty", dest="expect", action="store_const", const="nonempty", default=argparse.SUPPRESS)
    g.add_argument("--expect-empty", dest="expect", action="store_const", const="empty", default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="toposcope", description=__doc__, parents=[_common()])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("env", parents=[common], help="load or export environments")
    p.add_argument("action", choices=["load", "export"])
    p.add_argument("ref", help=f"builtin ({', '.join(builtin_names())}) or env JSON file")
    p.add_argument("--out", help="directory for exported files")
    p.set_defaults(func=cmd_env)

    p = sub.add_parser("check", parents=[common], help="element- and arrow-level facts")
    p.add_argument("what", choices=["global-elements", "inhabited", "epi", "mono"])
    p.add_argument("target", help="sort name (or function symbol for epi/mono)")
    p.add_argument("--env", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eval", parents=[common], help="does a stage force a formula?")
    p.add_argument("formula", help="formula text or a .fol file")
    p.add_argument("--env", required=True)
    p.add_argument("--stage", required=True)
    p.add_argument("--bind", action="append", metavar="VAR=SORT:ELEM")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("eval-global", parents=[common], help="is a closed formula forced everywhere?")
    p.add_argument("formula")
    p.add_argument("--env", required=True)
    p.set_defaults(func=cmd_eval_global)

    p = sub.add_parser("iso", parents=[common], help="decide isomorphism of two sorts")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--env", required=True)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("omega", parents=[common], help="sieve counts of the subobject classifier")
    p.add_argument("--site", required=True)
    p.add_argument("--out", help="directory for omega.tsv and omega.png")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("search", parents=[common], help="brute-force witness search")
    p.add_argument("kind", choices=["inhabited-no-point", "noniso-same-profile"])
    p.add_argument("--site", required=True)
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--prune", action="store_true", help="one presheaf per isomorphism class")
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--out", help="directory for presheaf JSON files")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("demo", parents=[common], help="reproduce the independence claims")
    p.add_argument("which", choices=["independence"])
    p.add_argument("--out", help="directory for independence.tsv/.json/.png")
    p.set_defaults(func=cmd_demo)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    for name, default in (("json", False), ("trace", False), ("expect", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, FormulaSyntaxError, TypeCheckError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: {exc} ({exc.partial_count} partial result(s))", file=sys.stderr)
        return EXIT_FAILED
    except (ValidationError, UnknownBuiltin, UnknownObject, ToposError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
