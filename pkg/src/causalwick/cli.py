"""Command-line front end: ``causalwick {expand|expect|phivac|verify SUITE}``.

Reports are JSON on stdout (and optionally a file).  Exit status: 0 pass,
1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import fock
from .causal import phi_vac_closed_form
from .errors import KWError
from .expr import parse_expr, print_expr, bind
from .fock import SourcePoint, phi_vac_oracle, tc_vev
from .grassmann import GrassmannPoly
from .kernels import kernel_eval
from .specfile import bundled_spec_path, load_spec
from .verify import SUITES, regime_of, run_suite
from .wick import vacuum_value, wick_expand


def cnum(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return cnum(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="spec file (default: bundled oscillator)")
    common.add_argument("--tol", type=float, help="override every tolerance")
    common.add_argument("--seed", type=int, help="override the [verify] seed")
    common.add_argument("--json", dest="json_path", help="also write the report here")
    p = argparse.ArgumentParser(prog="causalwick", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("expand", "Wick expansion of an operator product"),
                        ("expect", "vacuum expectation value, with the Fock oracle"),
                        ("phivac", "generating-functional moments for point sources")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--expr", required=True, help="expression text or a file holding it")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--csv", dest="csv_path", help="dump a sampled kernel (tau, re, im)")
    v.add_argument("--kernel", default="DR", help="kernel kind for --csv")
    return p


def read_expr(arg):
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def cmd_expand(parsed, ast):
    e = wick_expand(bind(ast, parsed.spec), parsed.spec)
    terms = [{"coeff": t.coeff,
              "contractions": [{"i": i, "j": j, "value": val} for i, j, val in t.contractions],
              "residual": [str(op) for op in t.residual]} for t in e.terms]
    return {"terms": terms, "n_terms": len(terms), "vacuum_value": vacuum_value(e),
            "flags": e.flags}, True


def cmd_expect(parsed, ast, tol):
    ops = bind(ast, parsed.spec)
    value = vacuum_value(wick_expand(ops, parsed.spec))
    oracle = tc_vev(parsed.spec, list(ops))
    fermi = parsed.spec.statistics == "fermi"
    v = parsed.verify
    tol = tol if tol is not None else (v["tol_oracle_fermi"] if fermi else v["tol_oracle_bose"])
    err = abs(value - oracle)
    return {"value": value, "oracle": oracle, "max_error": err, "tol": tol}, err <= tol


_SOURCE_OF = {"Q": "eta", "psi": "teta", "tpsi": "eta"}


def cmd_phivac(parsed, ast, tol):
    spec = parsed.spec
    pts = [SourcePoint(_SOURCE_OF[op.kind] + op.branch, op.x, op.t) for op in bind(ast, spec)]
    cap = parsed.verify["order_cap"]
    closed = phi_vac_closed_form(regime_of(spec), spec, pts, order_cap=cap)
    oracle = phi_vac_oracle(spec, pts, order_cap=cap)
    fermi = spec.statistics == "fermi"
    v = parsed.verify
    tol = tol if tol is not None else (v["tol_oracle_fermi"] if fermi else v["tol_oracle_bose"])
    err = closed.max_abs_diff(oracle)
    if isinstance(closed, GrassmannPoly):
        items = sorted(closed.terms.items())
        coeffs = [{"generators": list(k), "coeff": c} for k, c in items]
    else:
        items = sorted(closed.canonical().terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
        coeffs = [{"points": list(k), "coeff": c} for k, c in items]
    sources = [{"kind": p.kind, "x": p.x, "t": p.t} for p in pts]
    return {"sources": sources, "order_cap": cap, "coefficients": coeffs,
            "max_error": err, "tol": tol}, err <= tol


def dump_kernel_csv(parsed, path, kind):
    spec = parsed.spec
    tau = parsed.grid().taus
    x = spec.x_labels[0]
    vals = kernel_eval(kind, spec, x, x, tau)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "re", "im"])
        for t, z in zip(tau, vals):
            w.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag))])


def run_command(argv=None):
    """Run one CLI invocation; returns (exit code, report dict)."""
    args = build_parser().parse_args(argv)
    report = {"command": args.command if args.command != "verify" else f"verify {args.suite}"}
    try:
        spec_path = args.spec or bundled_spec_path("oscillator")
        parsed = load_spec(spec_path)
        fock.set_dim_cap(parsed.verify["dim_cap"])
        report["spec_hash"] = parsed.text_hash
        inputs = {"spec": os.path.basename(spec_path)}
        if args.tol is not None:
            inputs["tol"] = args.tol
        if args.seed is not None:
            inputs["seed"] = args.seed
        if args.command == "verify":
            report["inputs"] = inputs
            suites = run_suite(args.suite, parsed, tol=args.tol, seed=args.seed)
            if args.csv_path:
                dump_kernel_csv(parsed, args.csv_path, args.kernel)
            ok = all(s["pass"] for s in suites.values())
            report["suites"] = suites
        else:
            ast = parse_expr(read_expr(args.expr))
            inputs["expr"] = print_expr(ast)
            report["inputs"] = inputs
            if args.command == "expand":
                body, ok = cmd_expand(parsed, ast)
            elif args.command == "expect":
                body, ok = cmd_expect(parsed, ast, args.tol)
            else:
                body, ok = cmd_phivac(parsed, ast, args.tol)
            report.update(body)
        report["pass"] = bool(ok)
        code = 0 if ok else 1
    except (KWError, OSError, ValueError) as e:
        err = {"type": type(e).__name__, "message": str(e)}
        for attr in ("line", "column"):
            if getattr(e, attr, None) is not None:
                err[attr] = getattr(e, attr)
        report["error"] = err
        report["pass"] = False
        code = 2
    return code, jsonable(report)


def main(argv=None):
    code, report = run_command(argv)
    text = json.dumps(report, indent=2, ensure_ascii=False)
    print(text)
    path = getattr(build_parser().parse_known_args(argv)[0], "json_path", None)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
