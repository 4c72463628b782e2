"""Command-line front end: ``hqft check``, ``hqft invariant`` and ``hqft classify``.

Exit codes: 0 when every check passes, 1 when some check fails, 2 on input errors.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace

import click

from . import groups as groups_mod
from .frob import FrobeniusError, FrobeniusPackage, is_quasi_biangular, make_frobenius
from .galg import AlgebraError, group_algebra, load_json as load_algebra, matrix_model, model_trace
from .scalars import format_scalar, parse_scalar

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class SpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# spec files


def load_group(data) -> groups_mod.GroupTable:
    """A group from {"table": ...} or {"builtin": "cyclic", "n": k} (also "klein", "trivial")."""
    if isinstance(data, str):
        data = {"builtin": data}
    if not isinstance(data, dict):
        raise SpecError("group must be an object")
    if "builtin" in data:
        kind = data["builtin"]
        if kind == "cyclic":
            return groups_mod.cyclic(int(data.get("n", 2)))
        if kind == "klein":
            return groups_mod.klein()
        if kind == "trivial":
            return groups_mod.trivial()
        if kind == "symmetric":
            return groups_mod.symmetric(int(data.get("n", 3)))
        raise SpecError(f"unknown builtin group {kind!r}")
    try:
        return groups_mod.load_json(data)
    except groups_mod.NotAGroup as exc:
        raise SpecError(f"group: {exc}") from exc


def _scalars(xs, conductor: int, what: str) -> list:
    if not isinstance(xs, list):
        raise SpecError(f"{what} must be a list")
    try:
        return [parse_scalar(str(x), conductor) for x in xs]
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{what}: {exc}") from exc


def load_spec(data: dict) -> dict:
    """Resolve a spec document into group, algebra, Frobenius package and options."""
    from .classify import ClassifyError, build_package, model_from_json, validate_model
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    if "group" not in data:
        raise SpecError("missing section 'group'")
    G = load_group(data["group"])
    conductor = int(data.get("conductor", 1))
    out: dict = {"group": G, "stellar": data.get("stellar")}
    context = data.get("context", "identity")
    if context != "identity":
        raise SpecError("only the identity context (B = A^op) is supported in spec files")
    if "model" in data:
        try:
            md = model_from_json(G, data["model"])
        except ClassifyError as exc:
            raise SpecError(str(exc)) from exc
        rep = validate_model(md)
        if not rep.ok:
            raise SpecError(f"model invalid: {rep.failures()}")
        out["model"] = md
        t = build_package(md)
        A, lam = t.A.algebra, list(t.A.trace)
        out["blocks"] = list(md.blocks)
    else:
        alg = data.get("algebra")
        if alg is None:
            raise SpecError("missing section 'algebra' (or 'model')")
        try:
            kind = alg.get("kind", "table") if isinstance(alg, dict) else alg
            if kind == "group_algebra":
                A = group_algebra(G)
                lam = None
            elif kind == "matrix_model":
                blocks = [int(k) for k in alg["blocks"]]
                r = _scalars(alg.get("r", [1] * len(blocks)), conductor, "r")
                A = matrix_model(G, blocks, sigma=alg.get("sigma"), r=r)
                lam = model_trace(blocks, r)
                out["blocks"] = blocks
            else:
                A = load_algebra(G, alg, conductor)
                lam = None
        except (AlgebraError, KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"algebra: {exc}") from exc
    if "trace" in data:
        lam = _scalars(data["trace"], conductor, "trace")
    if lam is None:
        raise SpecError("missing section 'trace'")
    try:
        f = make_frobenius(A, lam, solve_z="z" not in data)
    except FrobeniusError as exc:
        raise SpecError(f"trace: {exc}") from exc
    if "z" in data:
        z = tuple(_scalars(data["z"], conductor, "z"))
        if len(z) != A.dims[G.e]:
            raise SpecError("z has the wrong length")
        # a supplied z is used as given so that the suites can report what breaks
        f = replace(f, z=z, z_freedom=0, _cache={})
    out["algebra"] = A
    out["frobenius"] = f
    return out


def read_spec(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from exc
    return load_spec(data)


def _stellar(spec: dict):
    from .stellar import transpose_stellar, trivial_stellar
    kind = spec.get("stellar")
    A = spec["algebra"]
    if kind in (None, "trivial"):
        return trivial_stellar(A)
    if kind == "transpose":
        if "blocks" not in spec:
            raise SpecError("the transpose stellar structure needs a matrix model")
        return transpose_stellar(A, spec["blocks"])
    raise SpecError(f"unknown stellar structure {kind!r}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default)


def _default(x):
    return format_scalar(x)


def _fail(msg: str) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_INPUT)


# ---------------------------------------------------------------------------
# commands


@click.group()
def main() -> None:
    """Exact checks for graded Frobenius algebras and their surface invariants."""


def run_check(spec: dict, mode: str) -> dict:
    from .gcenter import NotQuasiBiangular, g_center, verify_crossed
    from .tft import relation_suite, standard_package, suite_passes
    f: FrobeniusPackage = spec["frobenius"]
    sections: dict = {}
    qb = is_quasi_biangular(f)
    sections["quasi_biangular"] = qb.to_json()
    if f.z is None:
        sections["relations"] = {"pass": False, "error": "no central z solves the trace conditions"}
        return {"mode": mode, "pass": False, "sections": sections}
    t = standard_package(f)
    rel = relation_suite(t)
    sections["relations"] = {"pass": suite_passes(rel), "instances": rel,
                             "failures": [r for r in rel if not r["pass"]]}
    try:
        sections["crossed"] = verify_crossed(g_center(f))
    except NotQuasiBiangular as exc:
        sections["crossed"] = {"pass": False, "error": str(exc)}
    if mode == "unoriented":
        from .stellar import StellarError, suite_passes as un_passes, unoriented_relation_suite
        try:
            rows = unoriented_relation_suite(_stellar(spec), f)
            sections["unoriented"] = {"pass": un_passes(rows), "instances": rows}
        except StellarError as exc:
            sections["unoriented"] = {"pass": False, "error": str(exc)}
    ok = all(s["pass"] for s in sections.values())
    return {"mode": mode, "pass": ok, "sections": sections}


def _text_report(rep: dict) -> str:
    lines = [f"mode: {rep['mode']}", f"overall: {'PASS' if rep['pass'] else 'FAIL'}"]
    for name in sorted(rep["sections"]):
        sec = rep["sections"][name]
        lines.append(f"{name}: {'PASS' if sec['pass'] else 'FAIL'}")
        if name == "relations" and "failures" in sec:
            for r in sec["failures"]:
                lines.append(f"  {r['family']} {','.join(r['labels'])}: {json.dumps(r.get('witness'), sort_keys=True)}")
        if "error" in sec:
            lines.append(f"  {sec['error']}")
    return "\n".join(lines)


@main.command("check")
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["oriented", "unoriented"]), default="oriented", show_default=True)
@click.option("--report", type=click.Choice(["json", "text"]), default="json", show_default=True)
def cmd_check(input_path: str, mode: str, report: str) -> None:
    """Run the algebraic and relation suites on a spec file."""
    try:
        spec = read_spec(input_path)
        rep = run_check(spec, mode)
    except SpecError as exc:
        _fail(str(exc))
        return
    click.echo(_dump(rep) if report == "json" else _text_report(rep))
    sys.exit(EXIT_OK if rep["pass"] else EXIT_FAIL)


def parse_monodromy(text: str, G) -> tuple:
    text = text.strip()
    if not text:
        return ()
    pairs = []
    for chunk in text.split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2:
            raise SpecError(f"monodromy pair {chunk!r} must have two entries")
        try:
            pairs.append((G.index(parts[0]), G.index(parts[1])))
        except KeyError as exc:
            raise SpecError(f"unknown group element {exc.args[0]!r}") from exc
    return tuple(pairs)


@main.command("invariant")
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--genus", type=click.IntRange(min=0), required=True)
@click.option("--monodromy", default="", help='Pairs "a1,b1;a2,b2" by element name or index.')
@click.option("--audit", type=click.IntRange(min=0), default=0, help="Compare k alternative decompositions.")
def cmd_invariant(input_path: str, genus: int, monodromy: str, audit: int) -> None:
    """Print the exact invariant of a closed decorated surface."""
    from .tft import MonodromyInvalid, check_monodromy, decomposition_audit, standard_package, surface_invariant
    try:
        spec = read_spec(input_path)
        G = spec["group"]
        mono = parse_monodromy(monodromy, G)
        if len(mono) != genus:
            raise SpecError(f"genus {genus} needs {genus} monodromy pairs, got {len(mono)}")
        check_monodromy(G, mono)
        if spec["frobenius"].z is None:
            raise SpecError("no central z solves the trace conditions")
        t = standard_package(spec["frobenius"])
    except (SpecError, MonodromyInvalid) as exc:
        _fail(str(exc))
        return
    click.echo(format_scalar(surface_invariant(t, genus, mono)))
    if audit:
        ok = decomposition_audit(t, genus, mono, audit)
        click.echo(f"audit: {'pass' if ok else 'fail'} ({audit} alternatives)")
        sys.exit(EXIT_OK if ok else EXIT_FAIL)


def _read_model(path: str, G):
    from .classify import ClassifyError, model_from_json
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from exc
    if isinstance(data, dict) and "model" in data:
        data = data["model"]
    try:
        return model_from_json(G, data)
    except ClassifyError as exc:
        raise SpecError(f"{path}: {exc}") from exc


@main.command("classify")
@click.option("--group", "group_path", required=True, type=click.Path(dir_okay=False))
@click.option("--n", "n", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--value-group", "m", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--r", "r_reps", multiple=True, help='Scale vector "r1,...,rn"; repeat for several.')
@click.option("--budget", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option("--compare", nargs=2, type=click.Path(dir_okay=False), default=None)
def cmd_classify(group_path: str, n: int, m: int, r_reps: tuple, budget: int, compare) -> None:
    """List class representatives, or decide whether two models are equivalent."""
    from .classify import ClassifyError, are_equivalent, enumerate_classes, validate_model
    try:
        with open(group_path, encoding="utf-8") as fh:
            G = load_group(json.load(fh))
    except OSError as exc:
        _fail(f"cannot read {group_path}: {exc.strerror}")
        return
    except (json.JSONDecodeError, SpecError) as exc:
        _fail(str(exc))
        return
    try:
        if compare:
            m1, m2 = (_read_model(p, G) for p in compare)
            for md, p in ((m1, compare[0]), (m2, compare[1])):
                rep = validate_model(md)
                if not rep.ok:
                    raise SpecError(f"{p}: model invalid: {rep.failures()}")
            eq, witness = are_equivalent(m1, m2, budget)
            out = {"verdict": "equivalent" if eq else "inequivalent", "witness": witness}
            if witness:
                out["witness"] = {"pi": witness["pi"],
                                  "phi": {G.name(g): v for g, v in witness["phi"].items()}}
        else:
            reps = [[parse_scalar(x.strip()) for x in r.split(",")] for r in r_reps] or None
            classes = enumerate_classes(G, n, m, reps, budget=budget)
            out = {"count": len(classes), "classes": [c.to_json() for c in classes]}
    except (ClassifyError, SpecError, ValueError) as exc:
        _fail(str(exc))
        return
    click.echo(_dump(out))


if __name__ == "__main__":
    main()
