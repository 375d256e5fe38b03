"""Command line front end.

Every subcommand writes one JSON report with the fields inputs, results,
residuals, spec and wall_time, in that order. Floats carry 17 significant
digits. wall_time is null unless --timing is given, so two runs of the same
request produce identical bytes.

Exit codes: 0 all residuals within their thresholds, 1 a threshold was
violated, 2 malformed input.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

from . import invariants as inv
from . import mcg, qdl, triangulation, volume
from .qdl import IntegralSpec, ModularParameter

EXIT_OK, EXIT_THRESHOLD, EXIT_MALFORMED = 0, 1, 2

SCALING_HBARS = {"4_1": (0.12, 0.09, 0.06), "5_2": (0.09, 0.06, 0.04), "6_1": (0.12, 0.09, 0.06)}
BALANCE_DOCS = {"4_1": "4_1", "5_2": "5_2", "6_1": "6_1_H"}


class Malformed(Exception):
    pass


# ------------------------------------------------------------------ JSON

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return f'"{x}"'
    s = format(x, ".17g")
    return s if ("." in s or "e" in s) else s + ".0"


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON: dict order kept, floats at 17 significant digits,
    complex numbers as [re, im]."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int,)) and not isinstance(obj, bool):
        return str(obj)
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):
        return dumps(obj.item(), indent)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag], indent)
    if isinstance(obj, str):
        import json
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, complex, str, bool)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "as_dict"):
        return dumps(obj.as_dict(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _residual(value, threshold, below: bool = True) -> dict:
    ok = bool(value < threshold) if below else bool(value > threshold)
    return {"value": value, "threshold": threshold, "ok": ok}


# ------------------------------------------------------------ subcommands

def _spec(args) -> IntegralSpec:
    kw = {}
    if args.tol is not None:
        kw["rel_tol"] = args.tol
    if args.contour_epsilon is not None:
        kw["contour_epsilon"] = args.contour_epsilon
    if args.lattice_M is not None:
        kw["lattice_M"] = args.lattice_M
    try:
        return IntegralSpec(**kw)
    except ValueError as exc:
        raise Malformed(str(exc)) from exc


def _need_knot(args) -> str:
    if args.knot is None:
        raise Malformed("--knot is required")
    return args.knot


def _need_hbar(args) -> float:
    if args.hbar is None:
        raise Malformed("--hbar is required")
    if not args.hbar > 0:
        raise Malformed("--hbar must be positive")
    return args.hbar


def cmd_qdl_check(args, spec):
    tol = args.tol if args.tol is not None else 1e-8
    entries = qdl.identity_suite(spec, pointwise_tol=tol, integrals=not args.no_integrals)
    results, residuals = {}, {}
    for e in entries:
        r = results.setdefault(e.identity, {"points": 0, "max_residual": 0.0, "threshold": e.threshold})
        r["points"] += 1
        r["max_residual"] = max(r["max_residual"], float(e.residual))
    for name, r in results.items():
        residuals[name] = _residual(r["max_residual"], r["threshold"])
    ratios = {}
    for x in (-0.5, 0.0, 0.5):
        ratios[str(x)] = qdl.asymptotic_ratio(x, 0.4, 0, spec)
    results["asymptotic_ratio"] = {"b": [0.4, 0.2], "ratios": ratios}
    worst = max(abs(v - 4) for v in ratios.values())
    residuals["asymptotic_ratio"] = _residual(worst, 0.5)
    return {"b_values": [complex(b) for b in qdl.SUITE_B]}, results, residuals


def cmd_invariant(args, spec):
    knot = inv.KnotId.parse(_need_knot(args))
    hbar = _need_hbar(args)
    p = ModularParameter.from_hbar(hbar)
    if knot is inv.KnotId.K6_1:
        r = inv.j_61(hbar, spec)
    elif knot is inv.KnotId.K4_1:
        r = inv.chi_41(0.0, p, spec, depth=inv.mid_depth(p))
    else:
        r = inv.chi_52(0.0, p, spec, depth=inv.mid_depth(p))
    results = {"value": r.value, "abs": abs(r.value),
               "scaling_diagnostic": 2 * math.pi * hbar * math.log(abs(r.value)),
               "convergence_report": r.convergence_report}
    delta = float(r.convergence_report["last_refinement_delta"])
    residuals = {"quadrature": _residual(delta / max(abs(r.value), spec.abs_tol), spec.rel_tol)}
    return {"knot": str(knot), "hbar": hbar, "b": p.b.real}, results, residuals


def cmd_volume(args, spec):
    knot = inv.KnotId.parse(_need_knot(args))
    method = args.method or "saddle"
    if method == "saddle":
        if knot is not inv.KnotId.K6_1:
            raise Malformed("the saddle method is implemented for 6_1 only")
        rep = volume.volume_from_saddle()
        results = rep.as_dict()
        residuals = {"grad_norm": _residual(rep.grad_norm, 1e-10),
                     "volume_positive": _residual(rep.volume, 0.0, below=False)}
        return {"knot": str(knot), "method": method}, results, residuals
    hbars = [args.hbar] if args.hbar is not None else None
    if hbars is not None:
        raise Malformed("--hbar is not used by the scaling method; the ladder is fixed per knot")
    hb = SCALING_HBARS[str(knot)]
    fit = volume.scaling_fit(str(knot), hb, spec)
    results = fit.as_dict()
    residuals = {"extrapolation": _residual(fit.error_estimate / abs(fit.volume), 0.02)}
    return {"knot": str(knot), "method": method, "hbars": list(hb)}, results, residuals


def cmd_balance(args, spec):
    name = args.name or BALANCE_DOCS[_need_knot(args)]
    M = triangulation.load_corpus(name, args.corpus_path)
    knot_edge = M.knot_edge
    sol = triangulation.solve_balanced(M, knot_edge)
    fr = lambda x: f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    var = [f"{l}{t}" for t, l in sol.variables]
    results = {
        "edge_classes": {M.labels[i]: {"degree": M.degree(i), "weight": M.weight_string(i)}
                         for i in range(len(M.edge_classes))},
        "internal_edges": [M.labels[i] for i in M.internal_edges()],
        "knot_edge": knot_edge,
        "variables": var,
        "reduced_equations": [[fr(x) for x in row] for row in sol.reduced],
        "sample": {v: fr(x) for v, x in zip(var, sol.sample)},
        "margin": fr(sol.margin),
        "printed_discrepancies": M.printed_discrepancies(),
    }
    residuals = {"sample_satisfies": _residual(0.0 if sol.satisfies(sol.sample) else 1.0, 0.5),
                 "positive_margin": _residual(float(sol.margin), 0.0, below=False)}
    return {"triangulation": name}, results, residuals


def cmd_mcg_verify(args, spec):
    which = args.cobordism or "X_S"
    rep = mcg.verify(which, args.corpus_path)
    residuals = {k: _residual(0.0 if rep[k] else 1.0, 0.5)
                 for k in ("internal_trivial", "boundary_match", "tori_trivial",
                           "derivative_sum_zero", "weights_consistent")}
    tp = mcg.torus_projection_check((-2, 0, 2, 0, -1, 1))
    rep["torus_projection"] = [str(x) for x in tp]
    residuals["torus_projection"] = _residual(0.0 if not any(tp) else 1.0, 0.5)
    return {"cobordism": which}, rep, residuals


def cmd_corpus_list(args, spec):
    d = args.corpus_path or triangulation.corpus_dir()
    out = {}
    for name in triangulation.corpus_names(d):
        M = triangulation.load_corpus(name, d)
        out[name] = {"tets": len(M.tets), "edge_classes": len(M.edge_classes),
                     "degrees": sorted(M.degree(i) for i in range(len(M.edge_classes))),
                     "knot_edge": M.knot_edge}
    return {"corpus": str(d)}, {"documents": out}, {}


COMMANDS = {
    "qdl-check": cmd_qdl_check,
    "invariant": cmd_invariant,
    "volume": cmd_volume,
    "balance": cmd_balance,
    "mcg-verify": cmd_mcg_verify,
    "corpus-list": cmd_corpus_list,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--knot", choices=["4_1", "5_2", "6_1"])
    common.add_argument("--hbar", type=float)
    common.add_argument("--method", choices=["saddle", "scaling"])
    common.add_argument("--cobordism", choices=["X_S", "X_T"])
    common.add_argument("--corpus", type=Path, help="corpus directory (overrides TQFT_CORPUS_DIR)")
    common.add_argument("--name", help="corpus document for balance (default from --knot)")
    common.add_argument("--tol", type=float, help="relative tolerance")
    common.add_argument("--contour-epsilon", type=float)
    common.add_argument("--lattice-M", type=int)
    common.add_argument("--no-integrals", action="store_true",
                        help="qdl-check: skip the Fourier and beta integral identities")
    common.add_argument("--timing", action="store_true", help="record wall time (breaks byte reproducibility)")
    common.add_argument("--out", type=Path)
    ap = argparse.ArgumentParser(prog="tqft", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    args.corpus_path = args.corpus
    if args.corpus_path is None and os.environ.get("TQFT_CORPUS_DIR"):
        args.corpus_path = Path(os.environ["TQFT_CORPUS_DIR"])
    t0 = time.perf_counter()
    try:
        spec = _spec(args)
        inputs, results, residuals = COMMANDS[args.command](args, spec)
    except (Malformed, triangulation.TriangulationError, inv.UnsupportedKnot, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except qdl.QDLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    inputs = {"command": args.command, **inputs}
    report = {"inputs": inputs, "results": results, "residuals": residuals,
              "spec": spec.as_dict(), "wall_time": time.perf_counter() - t0 if args.timing else None}
    text = dumps(report) + "\n"
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    failed = [k for k, r in residuals.items() if not r["ok"]]
    for k in failed:
        print(f"threshold violated: {k} ({residuals[k]['value']} vs {residuals[k]['threshold']})",
              file=sys.stderr)
    return EXIT_THRESHOLD if failed else EXIT_OK


def main() -> None:
    sys.exit(run())
