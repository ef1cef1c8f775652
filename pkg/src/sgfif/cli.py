"""The ``fif`` command line tool.

Subcommands: ``fif-eval`` (tabulate an FIF on a level), ``energy`` (per-level
energies, recursion residuals, finiteness classification), ``laplacian``
(renormalized Laplacian sequence and existence classification), ``dirichlet``
(closed-form solution surface, optionally cross-checked against the sparse
solver), ``harmonic eval`` (point evaluation of a harmonic function) and
``verify`` (the built-in verification suites).

Exit codes: 0 success, 1 input error, 2 verification failure, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import address, energy, laplacian, oracle, selfcheck
from .address import DepthCapError
from .fif import FifSpec, evaluate_on_level, load_spec, save_spec
from .harmonic import HarmonicFunction, eval_harmonic
from .vertexfn import VertexFunction

SCHEMA_VERSION = 1
_FMT = "{:.17g}"  # round-trip safe


def _fmt(v: float) -> str:
    return _FMT.format(float(v))


def _parse_triple(text: str, field: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"field {field!r} needs three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"field {field!r} has a non-numeric entry in {text!r}") from exc


def _parse_d(text: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ValueError(f"field 'd' has a non-numeric entry in {text!r}") from exc
    if len(vals) == 1:
        return (vals[0],) * 3
    if len(vals) == 3:
        return tuple(vals)
    raise ValueError(f"field 'd' needs one or three numbers, got {text!r}")


def _spec_from_args(args) -> FifSpec:
    if args.spec:
        return load_spec(args.spec)
    if args.boundary and args.midpoints and args.d:
        return FifSpec(
            _parse_triple(args.boundary, "boundary"),
            _parse_triple(args.midpoints, "midpoints"),
            _parse_d(args.d),
        )
    raise ValueError("provide --spec FILE or all of --boundary/--midpoints/--d")


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", help="path to a spec JSON file")
    p.add_argument("--boundary", help="inline boundary values b1,b2,b3")
    p.add_argument("--midpoints", help="inline midpoint values y1,y2,y3")
    p.add_argument("--d", help="inline scaling factor D or D1,D2,D3")


def _write_text(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _surface_text(u: VertexFunction, fmt: str) -> str:
    verts = address.vertices_at_level(u.level)
    coords = address.embedding_array(u.level)
    if fmt == "csv":
        lines = ["address,px,py,value"]
        for v, (px, py), val in zip(verts, coords, u.values):
            lines.append(f"{v},{_fmt(px)},{_fmt(py)},{_fmt(val)}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        points = [
            {"address": str(v), "px": float(px), "py": float(py), "value": float(val)}
            for v, (px, py), val in zip(verts, coords, u.values)
        ]
        return json.dumps(
            {"schema": SCHEMA_VERSION, "level": u.level, "points": points}, indent=2
        ) + "\n"
    if fmt == "table":
        lines = [f"{'address':>12} {'px':>20} {'py':>20} {'value':>22}"]
        for v, (px, py), val in zip(verts, coords, u.values):
            lines.append(f"{str(v):>12} {px:>20.12g} {py:>20.12g} {val:>22.15g}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _classification_json(result: laplacian.LaplacianClassification) -> dict:
    out = {
        "case": result.case,
        "constant_value": result.constant_value,
        "alpha": {k: float(v) for k, v in result.diagnostics["alpha"].items()},
        "harmonic_residual": result.diagnostics["harmonic_residual"],
        "constant_residual": result.diagnostics["constant_residual"],
    }
    if "note" in result.diagnostics:
        out["note"] = result.diagnostics["note"]
    return out


def _cmd_fif_eval(args) -> int:
    spec = _spec_from_args(args)
    u = evaluate_on_level(spec, args.level)
    _write_text(_surface_text(u, args.format), args.out)
    return 0


def _cmd_energy(args) -> int:
    spec = _spec_from_args(args)
    rep = energy.verify_recursion(spec, args.levels)
    e = rep.energies
    print(f"{'m':>3} {'E_m':>24} {'recursion residual':>20}")
    for m, em in enumerate(e):
        if m == 0:
            res = ""
        else:
            pred = rep.delta * (e[m - 1] - e[0]) + e[1]
            res = f"{abs(em - pred) / max(1.0, abs(em)):.3e}"
        print(f"{m:>3} {em:>24.16g} {res:>20}")
    total = None if rep.closed_form_total == float("inf") else rep.closed_form_total
    print(
        json.dumps(
            {
                "schema": SCHEMA_VERSION,
                "classification": rep.classification,
                "delta": rep.delta,
                "closed_form_total": total,
                "max_recursion_residual": rep.max_recursion_residual,
                "max_formula_residual": rep.max_formula_residual,
                "growth": energy.classify_growth(e),
            }
        )
    )
    return 0


def _cmd_laplacian(args) -> int:
    spec = _spec_from_args(args)
    result = laplacian.classify(spec)
    cv = address.canonicalize(args.at)
    seq = laplacian.renormalized_sequence(spec, cv, args.levels)
    start = max(1, cv.native_level)
    print(f"renormalized graph Laplacian at {cv.reduced_word}.{cv.terminal}")
    print(f"{'m':>3} {'(3/2) 5^m L_m':>24}")
    for m, val in enumerate(seq, start=start):
        print(f"{m:>3} {val:>24.16g}")
    print(
        json.dumps(
            {
                "schema": SCHEMA_VERSION,
                "at": str(cv),
                "classification": _classification_json(result),
                "divergent": laplacian.detect_divergence(seq),
            }
        )
    )
    return 0


def _cmd_dirichlet(args) -> int:
    a = _parse_triple(args.boundary, "boundary")
    spec = laplacian.solve_dirichlet(a, args.eta)
    u = evaluate_on_level(spec, args.level)
    if args.out:
        _write_text(_surface_text(u, "csv"), args.out)
    if args.spec_out:
        save_spec(spec, args.spec_out)
    result = laplacian.classify(spec)
    report = {
        "schema": SCHEMA_VERSION,
        "boundary": list(a),
        "eta": args.eta,
        "level": args.level,
        "midpoints": list(spec.midpoints),
        "classification": result.case,
        "constant_value": result.constant_value,
    }
    failed = False
    if args.verify:
        ref = oracle.solve_discrete_dirichlet(a, args.eta, args.level)
        dev = float(np.max(np.abs(u.values - ref.values)))
        failed = dev >= args.tolerance
        report["verify"] = {
            "max_abs_deviation": dev,
            "tolerance": args.tolerance,
            "passed": not failed,
        }
    print(json.dumps(report))
    return 2 if failed else 0


def _cmd_harmonic(args) -> int:
    if args.action != "eval":
        raise ValueError(f"unknown harmonic action {args.action!r}")
    h = HarmonicFunction(_parse_triple(args.boundary, "boundary"))
    print(_fmt(eval_harmonic(h, address.parse_address(args.address))))
    return 0


def _cmd_verify(args) -> int:
    results = selfcheck.run_suites(
        levels=args.levels, seed=args.seed, inject_failure=args.inject_failure
    )
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return 2 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fif",
        description="Fractal interpolation functions on the Sierpinski gasket",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fif-eval", help="tabulate an FIF on a vertex level")
    _add_spec_args(p)
    p.add_argument("--level", type=int, required=True, help="vertex level m")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    p.set_defaults(func=_cmd_fif_eval)

    p = sub.add_parser("energy", help="per-level energies and classification")
    _add_spec_args(p)
    p.add_argument("--levels", type=int, default=6, help="deepest level to sum")
    p.set_defaults(func=_cmd_energy)

    p = sub.add_parser("laplacian", help="renormalized Laplacian sequence")
    _add_spec_args(p)
    p.add_argument("--levels", type=int, default=6, help="deepest level")
    p.add_argument("--at", default="1.2", help="vertex address, default the q_12 midpoint")
    p.set_defaults(func=_cmd_laplacian)

    p = sub.add_parser("dirichlet", help="solve Delta u = eta with boundary values")
    p.add_argument("--boundary", required=True, help="boundary values a1,a2,a3")
    p.add_argument("--eta", type=float, required=True, help="constant Laplacian value")
    p.add_argument("--level", type=int, default=4, help="evaluation level")
    p.add_argument("--out", help="write the solution surface CSV here")
    p.add_argument("--spec-out", dest="spec_out", help="write the solving FIF spec JSON here")
    p.add_argument("--verify", action="store_true", help="cross-check against the sparse solver")
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.set_defaults(func=_cmd_dirichlet)

    p = sub.add_parser("harmonic", help="harmonic-function utilities")
    p.add_argument("action", choices=("eval",))
    p.add_argument("--boundary", required=True, help="boundary values b1,b2,b3")
    p.add_argument("--address", required=True, help="vertex address WORD.T")
    p.set_defaults(func=_cmd_harmonic)

    p = sub.add_parser("verify", help="run the built-in verification suites")
    p.add_argument("--levels", type=int, default=5, help="depth bound for every suite")
    p.add_argument("--seed", type=int, default=2026)
    p.add_argument("--inject-failure", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except DepthCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
