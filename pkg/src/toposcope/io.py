"""JSON file formats for sites, presheaves, arrows, subobjects and environments.

References to other documents are either builtin names, paths relative to
the referring file, or inline JSON objects.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import FormatError, UnknownBuiltin, ValidationError
from .gallery import BUILTINS, builtin
from .lang.semantics import SemanticEnvironment
from .logic import Subobject
from .presheaf import NatTrans, Presheaf, product_many, validate_nat, validate_presheaf
from .site import BUILTIN_SITES, FinCat, builtin_site, validate_category


def _read(ref: Any, base: Path) -> tuple[dict, Path]:
    if isinstance(ref, dict):
        return ref, base
    path = Path(ref)
    if not path.is_absolute():
        path = base / path
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh), path.parent
    except FileNotFoundError:
        raise FormatError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def _keys(doc: dict, allowed: set[str], what: str) -> None:
    extra = set(doc) - allowed
    if extra:
        raise FormatError(f"unknown keys in {what}: {sorted(extra)}")


def load_site(ref: Any, base: Path | str = ".") -> FinCat:
    if isinstance(ref, str) and ref in BUILTIN_SITES:
        return builtin_site(ref)
    doc, _ = _read(ref, Path(base))
    name = Path(ref).stem if isinstance(ref, str) else None
    return validate_category(doc, name=name)


def load_presheaf(ref: Any, base: Path | str = ".", site: FinCat | None = None, name=None) -> Presheaf:
    doc, here = _read(ref, Path(base))
    _keys(doc, {"site", "sets", "actions", "name"}, "presheaf")
    if "site" in doc:
        site = load_site(doc["site"], here)
    if site is None:
        raise FormatError("presheaf document does not name its site")
    return validate_presheaf(site, doc.get("sets", {}), doc.get("actions", {}), name=doc.get("name", name))


def load_nat(ref: Any, src: Presheaf, tgt: Presheaf, base: Path | str = ".", name=None) -> NatTrans:
    doc, here = _read(ref, Path(base))
    _keys(doc, {"site", "src", "tgt", "components", "name"}, "natural transformation")
    if "src" in doc:
        src = load_presheaf(doc["src"], here, src.site)
    if "tgt" in doc:
        tgt = load_presheaf(doc["tgt"], here, tgt.site)
    return validate_nat(src, tgt, doc.get("components", {}), name=doc.get("name", name))


def load_subobject(ref: Any, ambient: Presheaf | None, base: Path | str = ".") -> Subobject:
    doc, here = _read(ref, Path(base))
    _keys(doc, {"ambient", "parts"}, "subobject")
    if "ambient" in doc:
        ambient = load_presheaf(doc["ambient"], here, ambient.site if ambient else None)
    if ambient is None:
        raise FormatError("subobject document does not name its ambient presheaf")
    return Subobject(ambient, {c: set(xs) for c, xs in doc.get("parts", {}).items()})


def load_environment(ref: Any, base: Path | str = ".") -> SemanticEnvironment:
    """Resolve an environment: builtin names first, then files."""
    if isinstance(ref, str) and ref in BUILTINS:
        return builtin(ref)
    if isinstance(ref, str) and not Path(ref).exists() and not Path(base, ref).exists():
        raise UnknownBuiltin(f"{ref!r} is neither a builtin environment nor a file")
    doc, here = _read(ref, Path(base))
    _keys(doc, {"name", "doc", "site", "sorts", "functions", "relations"}, "environment")
    site = load_site(doc["site"], here) if "site" in doc else None
    sorts = {}
    for s, sref in doc.get("sorts", {}).items():
        sorts[s] = load_presheaf(sref, here, site, name=s)
        site = site or sorts[s].site
    if site is None:
        raise FormatError("environment names neither a site nor any sort")

    def arg_object(args):
        missing = [a for a in args if a not in sorts]
        if missing:
            raise ValidationError(f"unknown sorts {missing}")
        return product_many([sorts[a] for a in args], site)[0]

    functions = {}
    for f, spec in doc.get("functions", {}).items():
        _keys(spec, {"args", "result", "nat"}, f"function {f}")
        args, result = list(spec.get("args", [])), spec["result"]
        if result not in sorts:
            raise ValidationError(f"function {f} has unknown result sort {result!r}")
        nat = load_nat(spec["nat"], arg_object(args), sorts[result], here, name=f)
        functions[f] = (args, result, nat)
    relations = {}
    for r, spec in doc.get("relations", {}).items():
        _keys(spec, {"args", "sub"}, f"relation {r}")
        args = list(spec.get("args", []))
        relations[r] = (args, load_subobject(spec["sub"], arg_object(args), here))
    name = doc.get("name") or (Path(ref).stem if isinstance(ref, str) else None)
    return SemanticEnvironment(site, sorts, functions, relations, name=name, doc=doc.get("doc", ""))


def site_ref(site: FinCat) -> str | None:
    if site.name in BUILTIN_SITES and builtin_site(site.name) == site:
        return site.name
    return None


def environment_to_json(env: SemanticEnvironment) -> dict:
    """One self-contained document with every reference inlined."""
    ref = site_ref(env.site)
    site_doc = ref if ref is not None else env.site.to_json()
    return {
        "name": env.name,
        "doc": env.doc,
        "site": site_doc,
        "sorts": {s: A.to_json() for s, A in env.sorts.items()},
        "functions": {
            f: {"args": list(args), "result": res, "nat": env.functions[f].to_json()}
            for f, (args, res) in env.signature.functions.items()
        },
        "relations": {
            r: {"args": list(args), "sub": env.relations[r].to_json()}
            for r, args in env.signature.relations.items()
        },
    }


def export_environment(env: SemanticEnvironment, outdir: Path | str) -> Path:
    """Write the environment as separate JSON files; returns the env file path."""
    out = Path(outdir)
    for sub in ("sorts", "functions", "relations"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    ref = site_ref(env.site)
    if ref is None:
        _dump(env.site.to_json(), out / "site.json")
        ref = "site.json"
    doc: dict = {"name": env.name, "doc": env.doc, "site": ref, "sorts": {}, "functions": {}, "relations": {}}
    for s, A in env.sorts.items():
        _dump(A.to_json(site_ref=ref if ref != "site.json" else "../site.json"), out / "sorts" / f"{s}.json")
        doc["sorts"][s] = f"sorts/{s}.json"
    for f, (args, res) in env.signature.functions.items():
        _dump(env.functions[f].to_json(), out / "functions" / f"{f}.json")
        doc["functions"][f] = {"args": list(args), "result": res, "nat": f"functions/{f}.json"}
    for r, args in env.signature.relations.items():
        _dump(env.relations[r].to_json(), out / "relations" / f"{r}.json")
        doc["relations"][r] = {"args": list(args), "sub": f"relations/{r}.json"}
    path = out / "env.json"
    _dump(doc, path)
    return path


def write_presheaf(A: Presheaf, path: Path | str) -> None:
    ref = site_ref(A.site)
    _dump(A.to_json(site_ref=ref if ref is not None else A.site.to_json()), Path(path))


def _dump(doc, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
