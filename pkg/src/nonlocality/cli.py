"""Command-line front end.

Exit status: 0 on success, 1 on invalid input, 2 when a size bound is hit.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys

from .boolfn import PolynomialSyntaxError
from .contextuality import CertificateError, SizeBoundError, classify, dicke_certificate
from .empirical import ModelFormatError, Scenario, build_model, deserialize, format_table, support
from .qcore import Observable
from .states import StateSpecError, parse_spec
from .witness import (PRESET_OBSERVABLES, _candidates, bell_basis_logical_search, family_sweep,
                      lift_state_class, preset_witness, sweep_csv)

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


class UsageError(ValueError):
    pass


def parse_angle(text: str) -> float:
    """Radians; accepts plain numbers and expressions in ``pi`` such as 5pi/8 or 5*pi/8."""
    src = text.strip().replace("π", "pi")
    for d in "0123456789":
        src = src.replace(f"{d}pi", f"{d}*pi")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError:
        raise UsageError(f"bad angle {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise UsageError(f"bad angle {text!r}")

    try:
        return ev(tree)
    except ZeroDivisionError:
        raise UsageError(f"bad angle {text!r}") from None


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise UsageError(f"unbalanced parentheses in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise UsageError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_observable(text: str) -> Observable:
    t = text.strip()
    if t.upper() in PRESET_OBSERVABLES:
        return PRESET_OBSERVABLES[t.upper()]
    if t[:2].upper() == "U(" and t.endswith(")"):
        args = _split_top(t[2:-1], ",")
        if len(args) != 2:
            raise UsageError(f"{text!r}: U takes two angles")
        theta, phi = (parse_angle(a) for a in args)
        return Observable.bloch(theta, phi, f"U({args[0]},{args[1]})")
    raise UsageError(f"unknown observable {text!r} (use X, Y, Z, A, B, C, D or U(theta,phi))")


def parse_observables(text: str, n: int) -> tuple:
    """Per-party 'first/second' pairs, comma separated; a single pair applies to every party."""
    entries = _split_top(text, ",")
    pairs = []
    for e in entries:
        halves = _split_top(e, "/")
        if len(halves) != 2:
            raise UsageError(f"{e!r}: each party needs two settings written first/second")
        pairs.append(tuple(parse_observable(h) for h in halves))
    if len(pairs) == 1:
        pairs = pairs * n
    if len(pairs) != n:
        raise UsageError(f"got observables for {len(pairs)} parties but the state has {n} qubits")
    for p, (a, b) in enumerate(pairs):
        if a.name == b.name:
            raise UsageError(f"party {p + 1} uses {a.name} for both settings")
    return tuple(pairs)


def _model_from_args(args):
    if getattr(args, "model", None):
        try:
            with open(args.model, encoding="utf-8") as fh:
                return deserialize(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.model}: {exc.strerror}") from None
    if not args.state:
        raise UsageError("give --state (or --model)")
    spec = parse_spec(args.state)
    if args.obs:
        pairs = parse_observables(args.obs, spec.n_qubits)
    else:
        pairs = _candidates(spec)[0][1]
    return build_model(spec.build(), Scenario.from_observables(pairs))


def cmd_table(args, out):
    model = _model_from_args(args)
    obj = support(model) if args.support else model
    out.write(format_table(obj, args.format, args.dp))


def _emit_json(obj, out):
    out.write(json.dumps(obj, indent=1) + "\n")


def _section_lines(res):
    scen = res.scenario
    lines = []
    for c in scen.context_order():
        outs = res.non_extendable.get(c)
        if outs:
            lines.append(f"  {scen.context_label(c)}: " + " ".join(scen.outcome_label(o) for o in sorted(outs)))
    return lines


def cmd_classify(args, out):
    model = _model_from_args(args)
    res = classify(model)
    if args.format == "json":
        _emit_json(res.to_json_dict(), out)
        return
    out.write(res.label.value + "\n")
    out.write(res.summary() + "\n")
    if res.label.value in ("Logical", "Strong"):
        out.write("non-extendable sections:\n")
        out.write("\n".join(_section_lines(res)) + "\n")


def cmd_witness(args, out):
    spec = parse_spec(args.state)
    if args.grid is not None:
        rep = lift_state_class(spec.build(), grid=args.grid, spec=spec)
    else:
        rep = preset_witness(spec)
    if args.format == "json":
        _emit_json(rep.to_json_dict(), out)
    else:
        out.write(rep.summary() + "\n")


def cmd_sweep(args, out):
    rows = family_sweep(args.nvars, workers=args.workers)
    text = sweep_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        bad = sum(not r.agree for r in rows)
        out.write(f"{len(rows)} polynomials, {bad} disagreements; written to {args.out}\n")
    else:
        out.write(text)


def _pair(text):
    try:
        n, k = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"expected n,k but got {text!r}") from None
    return n, k


def cmd_certificate(args, out):
    n, k = _pair(args.dicke)
    cert = dicke_certificate(n, k)
    if args.format == "json":
        _emit_json(cert.to_json_dict(), out)
        return
    out.write(f"logical; violation {cert.violation}\n")
    out.write(f"S({n},{k}) under X/Z: {len(cert.implications)} pair implications verified, "
              f"{len(cert.z_disjuncts)} all-Z disjuncts, closure to {cert.closure_classes} class\n")
    out.write(f"all-X all-equal mass {cert.x_equal_mass} = C({n},{k})/2^{n - 1}\n")


def cmd_bellcheck(args, out):
    rep = bell_basis_logical_search(args.res, args.seed)
    if args.format == "json":
        _emit_json(rep.to_json_dict(), out)
    else:
        out.write(("PASS" if rep.ok else "FAIL") + "\n" + rep.summary() + "\n")
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonlocality", description="Contextuality hierarchy tools for qubit states.")
    sub = ap.add_subparsers(dest="command", required=True)

    def state_opts(p, model=False):
        p.add_argument("--state", help="dicke:n,k | ghz:n | bell:+|- | fd:<poly> | dict:n,i,+|- | zero:n")
        p.add_argument("--obs", help="per-party first/second settings, e.g. Y/Z,Y/Z,Y/Z or U(pi/2,pi/8)/U(pi/2,5pi/8)")
        if model:
            p.add_argument("--model", help="JSON model file instead of --state/--obs")

    p = sub.add_parser("table", help="print a probability or support table")
    state_opts(p, model=True)
    p.add_argument("--support", action="store_true", help="print the 0/1 support grid")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--dp", type=int, default=None, help="decimal places (floats; exact entries become decimals)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("classify", help="classify a model in the hierarchy")
    state_opts(p, model=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("witness", help="find observables witnessing a state's class")
    p.add_argument("--state", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", action="store_true", help="family preset observables (default)")
    g.add_argument("--grid", type=int, metavar="RES", help="also search a Bloch grid of pi/RES steps")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("sweep", help="classify every functionally dependent state on k variables")
    p.add_argument("--nvars", type=int, required=True)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("certificate", help="logical-contextuality certificate for a Dicke state")
    p.add_argument("--dicke", required=True, metavar="N,K")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("bellcheck", help="check that no Bell-basis model is logically contextual")
    p.add_argument("--res", type=int, default=8, help="generic samples per angle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_bellcheck)
    return ap


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        code = args.func(args, out)
    except SizeBoundError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (UsageError, StateSpecError, PolynomialSyntaxError, ModelFormatError, CertificateError,
            ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    return code or 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
