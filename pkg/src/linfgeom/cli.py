"""Command-line driver.

Exit codes: 0 all checks pass, 1 input error, 2 a mathematical verdict fails
(invalid algebroid, mismatched family endpoints, failed comparison), 3 an
internal consistency failure (a class that should be closed is not).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib import resources
from typing import Dict, List, Optional

from . import atiyah as at
from .algebroid import analyse
from .fedosov import (ANCHOR_INDEX, BIANCHI_INDEX, ConsistencyError, bracket_value, check_nilpotency,
                      family_residuals, first_nonzero, index_name, solve, solve_family)
from .poly import PolySyntaxError, format_poly
from .spec_io import GeometrySpec, SpecError, format_spec, load_spec

EXIT_OK, EXIT_INPUT, EXIT_VERDICT, EXIT_INTERNAL = 0, 1, 2, 3
SECTOR_NAMES = {0: "connection", 1: "anchor-torsion", 2: "quadratic"}


class InputError(Exception):
    pass


# report plumbing -----------------------------------------------------------------

def spec_digest(spec: GeometrySpec) -> str:
    return hashlib.sha256(format_spec(spec).encode()).hexdigest()[:16]


def spec_header(spec: GeometrySpec, cutoff: int) -> dict:
    return {"name": spec.name, "dim": spec.d, "rank": spec.r, "digest": spec_digest(spec),
            "cutoff": cutoff, "gauge": spec.gauge}


def render_text(report: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, val in report.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(val, indent + 1) if val else f"{pad}  (none)")
        elif isinstance(val, list):
            lines.append(f"{pad}{key}:" + ("" if val else " (none)"))
            for item in val:
                if isinstance(item, dict):
                    lines.append(f"{pad}  -")
                    lines.append(render_text(item, indent + 2))
                else:
                    lines.append(f"{pad}  - {item}")
        else:
            lines.append(f"{pad}{key}: {val}")
    return "\n".join(x for x in lines if x != "")


def emit(report: dict, fmt: str, out: Optional[str]):
    text = json.dumps(report, indent=2, sort_keys=True) if fmt == "json" else render_text(report)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load(path: str, cutoff: Optional[int], deg_cap: Optional[int]) -> GeometrySpec:
    try:
        spec = load_spec(path)
    except (SpecError, PolySyntaxError) as exc:
        raise InputError(str(exc)) from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    if cutoff is not None:
        if cutoff < 2:
            raise InputError("--cutoff must be at least 2")
        spec.cutoff = cutoff
    if deg_cap is not None:
        spec.deg_cap = deg_cap
    return spec


def _residual_summary(report) -> Dict[str, List[str]]:
    out = {}
    for n, items in sorted(report.items()):
        if items:
            out[f"index {n}"] = [f"{r.generator}: {r.value.to_str()}" for r in items]
    return out


def _poly_table(d: dict, nv: int) -> Dict[str, str]:
    return {",".join(str(k + 1) for k in key): format_poly(p) for key, p in sorted(d.items())}


# commands ---------------------------------------------------------------------

def cmd_check(args) -> tuple:
    spec = _load(args.spec, args.cutoff, args.deg_cap)
    alg = analyse(spec)
    state = solve(spec)
    nil = {SECTOR_NAMES[s]: check_nilpotency(state, s) for s in (0, 1, 2)}
    first = {k: first_nonzero(v) for k, v in nil.items()}
    report = {"command": "check", "spec": spec_header(spec, state.N)}
    report["algebroid"] = {
        "anchor_residuals": _poly_table(alg.anchor, spec.nvars),
        "jacobiator": _poly_table(alg.jacobiator, spec.nvars),
        "bianchi_residuals": _poly_table(alg.bianchi, spec.nvars),
    }
    report["nilpotency"] = {
        name: {"first_failure": _failure_label(first[name]), "residuals": _residual_summary(rep)}
        for name, rep in nil.items()}
    valid = alg.ok and all(v is None for v in first.values())
    report["verdict"] = "valid algebroid" if valid else "invalid algebroid"
    if not valid:
        hits = [n for n in first.values() if n is not None]
        if hits:
            n = min(hits)
            label = {ANCHOR_INDEX: "anchor", BIANCHI_INDEX: "Bianchi"}.get(n, "other")
            report["localized_at"] = f"index {n}: {label} residual"
    return report, (EXIT_OK if valid else EXIT_VERDICT)


def _failure_label(n: Optional[int]) -> str:
    return "none" if n is None else f"{n} ({index_name(n)})"


def _inputs_of(L, mask, exps):
    ins = []
    for i, k in enumerate(L.y):
        ins += [("e", k)] * exps[k]
    for j in L.v:
        if mask >> j & 1:
            ins.append(("o", j))
    return ins


def cmd_brackets(args) -> tuple:
    spec = _load(args.spec, args.cutoff, args.deg_cap)
    state = solve(spec)
    L = state.L
    gens = [("e", k) for k in L.y] + [("o", j) for j in L.v]
    report = {"command": "brackets", "spec": spec_header(spec, state.N), "components": {}}
    for sector in (0, 1):
        for n in sorted(state.Q.get(sector, {})):
            comp = {}
            for g in gens:
                img = state.image(sector, n, g)
                if not img:
                    continue
                seen = set()
                brackets = {}
                fib_terms = sorted({(m & ~L.dx_mask, ex[L.nbase:]) for (m, ex) in img.terms})
                for mask, fib in fib_terms:
                    ex = (0,) * L.nbase + fib
                    ins = _inputs_of(L, mask, ex)
                    key = tuple(ins)
                    if key in seen:
                        continue
                    seen.add(key)
                    val = bracket_value(state, sector, n, g, ins)
                    if val:
                        names = ", ".join(L.var_name(v).replace("y", "y_").replace("v", "v_") for v in ins)
                        brackets[f"({names})"] = val.to_str()
                comp[L.var_name(g)] = {"image": img.to_str(), "brackets": brackets}
            report["components"][f"{SECTOR_NAMES[sector]} {n}"] = comp
    return report, EXIT_OK


def cmd_atiyah(args) -> tuple:
    spec = _load(args.spec, args.cutoff, args.deg_cap)
    k = args.k
    if k < 1:
        raise InputError("--k must be at least 1")
    cap = args.deg_cap if args.deg_cap is not None else k
    if cap < k:
        raise InputError(f"--deg-cap {cap} is below --k {k}")
    state = solve(spec)
    report = {"command": "atiyah", "spec": spec_header(spec, state.N), "k": k}
    mat = at.atiyah_class(state)
    bad = at.atiyah_closedness(state, mat)
    report["atiyah_closed"] = {"verified_weight": state.N - 2, "ok": not bad}
    ck = at.chern_class(state, k, mat)
    wmax = at.chern_weight_cap(state, k)
    defect = at.closedness_defect(state, ck, wmax - 1)
    report["chern_class"] = {"exact_weight": wmax, "value": ck.to_str(),
                             "closed": not defect, "verified_weight": wmax - 1}
    code = EXIT_OK
    if bad or defect:
        report["verdict"] = "internal consistency failure: class not closed"
        return report, EXIT_INTERNAL
    if args.transgress or args.weil:
        try:
            cert = at.transgress(state, ck, wmax)
        except at.NotClosedError as exc:
            report["verdict"] = f"internal consistency failure: {exc}"
            return report, EXIT_INTERNAL
        report["transgression"] = {"representative": cert.alpha.to_str(),
                                   "primitives": {str(p): b.to_str() for p, b in sorted(cert.primitives.items())},
                                   "certificate": "closes" if cert.ok else "fails",
                                   "verified_weight": cert.verified_weight}
        if not cert.ok:
            return report, EXIT_INTERNAL
        if args.weil:
            w = at.weil_project(cert.alpha)
            dw = at.weil_differential(state, w).filter(
                lambda m, ex: state.L.weight(m, ex) <= wmax - 1)
            report["weil"] = {"projection": w.to_str(), "D_closed": not dw}
        if k == 1 and spec.metric is not None:
            mod = at.check_c1_modular(state)
            report["modular"] = {"modular_class": mod.modular.to_str(),
                                 "dr_modular": mod.dr_modular.to_str(),
                                 "transgressed": mod.transgressed.to_str(),
                                 "dy_dy_part": mod.dy_dy_part.to_str(),
                                 "identity": "holds" if mod.ok else "fails"}
            if not mod.ok:
                code = EXIT_VERDICT
    if spec.action_algebroid:
        act = at.action_chern(state, k)
        report["equivariant"] = {"transgressed": act.transgressed.to_str(),
                                 "equivariant": act.equivariant.to_str(),
                                 "vanishing_violations": act.vanishing,
                                 "comparison": "agrees" if act.ok else "differs"}
        if not act.ok:
            code = EXIT_VERDICT
    report["verdict"] = "pass" if code == EXIT_OK else "comparison failed"
    return report, code


def cmd_family(args) -> tuple:
    A = _load(args.spec_a, args.cutoff, args.deg_cap)
    B = _load(args.spec_b, args.cutoff, args.deg_cap)
    diffs = A.same_algebroid(B)
    report = {"command": "family", "start": spec_header(A, A.cutoff), "end": spec_header(B, B.cutoff)}
    if diffs:
        report["verdict"] = "endpoints define different algebroids"
        report["differences"] = diffs
        return report, EXIT_VERDICT
    N = args.cutoff if args.cutoff is not None else min(A.cutoff, B.cutoff)
    fam = solve_family(A, B, N)
    L = fam.L
    gens = [("e", k) for k in L.y] + [("o", j) for j in L.v]
    report["F"] = {str(s): {L.var_name(g): F.image(g).to_str() for g in gens if F.image(g)}
                   for s, F in sorted(fam.F.items())}
    res = family_residuals(fam)
    report["residuals"] = {kind: _residual_summary(r) for kind, r in res.items()}
    ok = all(not items for r in res.values() for items in r.values())
    report["verdict"] = "flat family" if ok else "family equations fail"
    return report, (EXIT_OK if ok else EXIT_INTERNAL)


def bundled_examples() -> List[str]:
    files = resources.files("linfgeom") / "data"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".spec"))


def example_path(name: str):
    return resources.files("linfgeom") / "data" / f"{name}.spec"


def cmd_examples(args) -> tuple:
    names = bundled_examples()
    if args.name is None:
        return {"command": "examples", "examples": names}, EXIT_OK
    if args.name not in names:
        raise InputError(f"no bundled example named {args.name!r}; available: {', '.join(names)}")
    text = example_path(args.name).read_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return None, EXIT_OK


# entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff", type=int, default=None, help="weight cutoff N (default: from the spec)")
    common.add_argument("--deg-cap", type=int, default=None, help="de Rham degree cap")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", default=None, help="write the report to this file")

    p = argparse.ArgumentParser(prog="linfgeom", description="Geometric L-infinity deformations of Lie algebroids.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="validate a spec and the solved differential")
    c.add_argument("spec")
    c = sub.add_parser("brackets", parents=[common], help="print the solved components and brackets")
    c.add_argument("spec")
    c = sub.add_parser("atiyah", parents=[common], help="Atiyah class and Atiyah-Chern classes")
    c.add_argument("spec")
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--transgress", action="store_true")
    c.add_argument("--weil", action="store_true")
    c = sub.add_parser("family", parents=[common], help="flat family between two specs")
    c.add_argument("spec_a")
    c.add_argument("spec_b")
    c = sub.add_parser("examples", parents=[common], help="list or print the bundled specs")
    c.add_argument("name", nargs="?")
    return p


COMMANDS = {"check": cmd_check, "brackets": cmd_brackets, "atiyah": cmd_atiyah,
            "family": cmd_family, "examples": cmd_examples}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if report is not None:
        report["timing_seconds"] = round(time.perf_counter() - started, 3)
        emit(report, args.format, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
