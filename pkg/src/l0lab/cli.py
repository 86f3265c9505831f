"""
Command-line front end.

    l0lab levels [--instance FILE] [--phi squared_hinge --phi-sigma 3.6]
    l0lab marginal-h --sigma 3.6
    l0lab classify --sigma 3.6
    l0lab plot-data --levels FILE
    l0lab repro

Without ``--instance`` the bundled 4x5 noisy recovery instance is used.
Exit status: 0 on success, 1 on an analysis error (e.g. infeasible sigma),
2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import datasets
from .breakpoints import (
    breakpoints,
    line_records,
    marginal_F,
    marginal_H,
    optimal_set_constrained,
    optimal_set_penalty,
)
from .cardinality import p1_report, p2_bound, penalty_cardinality, strictness_p2
from .errors import InfeasibleError, InvalidInputError, L0LabError
from .levels import LevelSequence, levels, load_instance, residual_staircase
from .phi import Identity, PhiSpec, Power, SquaredHinge
from .relation import classify, exact_penalty_threshold, verify_exactness
from .serialize import dumps
from .smooth import SmoothPenaltyProblem, lipschitz_bound, phi_big_eval, phi_big_grad, prox_grad_solve, write_trace_csv

COMMANDS = (
    "levels",
    "breakpoints",
    "marginal-h",
    "marginal-f",
    "classify",
    "exact-penalty",
    "cardinality",
    "gradient-check",
    "solve",
    "plot-data",
    "repro",
)


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (float, np.floating)):
        return "inf" if math.isinf(x) else f"{x:.4f}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "(" + ", ".join(_fmt(v) for v in x) + ")"
    return str(x)


def _text(d, indent=0):
    lines = []
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(" " * indent + f"{k}:")
            lines.extend(_text(v, indent + 2))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(" " * indent + f"{k}:")
            for item in v:
                lines.append(" " * (indent + 2) + "- " + ", ".join(f"{a}={_fmt(b)}" for a, b in item.items()))
        else:
            lines.append(" " * indent + f"{k}: {_fmt(v)}")
    return lines


def _csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _emit(obj, fmt, out, rows=None):
    d = obj.to_dict() if hasattr(obj, "to_dict") else obj
    if fmt == "json":
        out.write(dumps(d) + "\n")
    elif fmt == "csv":
        if rows is None:
            rows = [d] if not isinstance(d, list) else d
            rows = [{k: (dumps(v, None) if isinstance(v, (list, dict)) else v) for k, v in r.items()} for r in rows]
        out.write(_csv(rows))
    else:
        if isinstance(d, list):
            for item in d:
                out.write(", ".join(f"{k}={_fmt(v)}" for k, v in item.items()) + "\n")
        else:
            out.write("\n".join(_text(d)) + "\n")


def _phi_from_args(args, default):
    if args.phi is None:
        return default
    if args.phi.lstrip().startswith("{"):
        try:
            return PhiSpec.from_dict(json.loads(args.phi))
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"--phi: {exc}") from None
    return PhiSpec(args.phi, args.phi_p, args.phi_sigma)


def _instance(args):
    inst = datasets.noisy_recovery_instance() if args.instance is None else load_instance(args.instance)
    if args.p is not None:
        inst.p = args.p
    return inst


def _load_levels(path):
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(d, dict) or "s" not in d or "rho" not in d:
        raise InvalidInputError(f"{path}: expected an object with 's' and 'rho'")
    phi = PhiSpec.from_dict(d["phi"]) if "phi" in d else None
    return LevelSequence.from_values(d["s"], d["rho"], phi)


def _seq(args, phi):
    if getattr(args, "levels", None):
        return _load_levels(args.levels)
    return levels(residual_staircase(_instance(args)), phi, args.tol)


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise InvalidInputError(f"--{name.replace('_', '-')} is required for {args.command}")
    return v


def cmd_levels(args, out):
    seq = _seq(args, _phi_from_args(args, Identity()))
    _emit(seq, args.format, out)


def cmd_breakpoints(args, out):
    inst_p = None if args.levels else _instance(args).p
    seq = _seq(args, _phi_from_args(args, Power(inst_p or 2)))
    bp = breakpoints(seq)
    _emit({"s": seq.s.tolist(), "rho": seq.rho.tolist(), "breakpoints": bp.to_dict()}, args.format, out)


def cmd_marginal_h(args, out):
    seq = _seq(args, Identity())
    sigma = _need(args, "sigma")
    _emit({"sigma": sigma, "H": marginal_H(seq, sigma)}, args.format, out)


def cmd_marginal_f(args, out):
    inst_p = None if args.levels else _instance(args).p
    seq = _seq(args, _phi_from_args(args, Power(inst_p or 2)))
    F = marginal_F(seq)
    if args.lam is None:
        _emit(F, args.format, out)
    else:
        value, active = F.evaluate(args.lam)
        _emit({"lambda": args.lam, "F": value, "active_levels": sorted(active)}, args.format, out)


def cmd_classify(args, out):
    inst_p = None if args.levels else _instance(args).p
    seq = _seq(args, _phi_from_args(args, Power(inst_p or 2)))
    _emit(classify(seq, breakpoints(seq), _need(args, "sigma")), args.format, out)


def cmd_exact_penalty(args, out):
    inst = _instance(args)
    sigma = _need(args, "sigma")
    phi = _phi_from_args(args, SquaredHinge(sigma))
    if args.verify:
        _emit(verify_exactness(inst, phi, sigma, args.verify), args.format, out)
    else:
        res = exact_penalty_threshold(inst, phi, sigma)
        _emit(
            {
                "lambda_star": res.lambda_star,
                "all_lambda_exact": res.all_lambda_exact,
                "s": res.levels.s.tolist(),
                "rho": res.levels.rho.tolist(),
            },
            args.format,
            out,
        )


def cmd_cardinality(args, out):
    inst = _instance(args)
    st = residual_staircase(inst)
    if args.sigma is not None and args.lam is None:
        seq = levels(st, Identity(), args.tol)
        if inst.p == 2:
            _emit(strictness_p2(seq, args.sigma), args.format, out)
        else:
            opt = optimal_set_constrained(seq, args.sigma)
            _emit(p1_report(seq, opt.k), args.format, out)
        return
    seq = levels(st, _phi_from_args(args, Power(inst.p)), args.tol)
    if args.lam is not None:
        _emit(penalty_cardinality(seq, breakpoints(seq), args.lam), args.format, out)
        return
    k = _need(args, "level")
    _emit(p2_bound(seq, k) if inst.p == 2 else p1_report(seq, k), args.format, out)


def cmd_gradient_check(args, out):
    inst = _instance(args)
    sigma = _need(args, "sigma")
    prob = SmoothPenaltyProblem(inst, sigma, 1.0)
    rng = np.random.default_rng(args.seed)
    h = 1e-6
    worst, checked = 0.0, 0
    scale = max(1.0, float(np.abs(inst.b).max()))
    while checked < args.samples:
        x = rng.normal(scale=scale, size=inst.n)
        if np.linalg.norm(inst.A @ x - inst.b) <= sigma + 0.1:
            continue
        g = phi_big_grad(prob, x)
        fd = np.array(
            [(phi_big_eval(prob, x + h * e) - phi_big_eval(prob, x - h * e)) / (2 * h) for e in np.eye(inst.n)]
        )
        worst = max(worst, float(np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1e-300)))
        checked += 1
    _emit(
        {"samples": checked, "max_relative_error": worst, "lipschitz_bound": lipschitz_bound(prob)},
        args.format,
        out,
    )


def cmd_solve(args, out):
    inst = _instance(args)
    prob = SmoothPenaltyProblem(inst, _need(args, "sigma"), _need(args, "lam"))
    rng = np.random.default_rng(args.seed)
    x0 = np.zeros(inst.n) if args.x0 == "zeros" else rng.normal(size=inst.n)
    res = prox_grad_solve(prob, x0, args.max_iters, trace=args.trace is not None)
    if args.trace is not None:
        write_trace_csv(res, args.trace)
    seq = levels(residual_staircase(inst), SquaredHinge(prob.sigma), args.tol)
    opt = optimal_set_penalty(seq, breakpoints(seq), prob.lam)
    best = min(float(np.count_nonzero(x) + prob.lam * phi_big_eval(prob, x)) for _, _, x in opt.representatives)
    _emit(
        {
            "x": res.x.tolist(),
            "objective": res.objective,
            "iterations": res.iterations,
            "converged": res.converged,
            "enumeration_optimum": best,
            "gap": res.objective - best,
        },
        args.format,
        out,
    )


def cmd_plot_data(args, out):
    if args.levels:
        seq = _load_levels(args.levels)
    else:
        seq = levels(residual_staircase(_instance(args)), _phi_from_args(args, Power(_instance(args).p)), args.tol)
    rows = line_records(seq)
    if args.format == "csv":
        out.write(_csv([{**r, "active": int(r["active"])} for r in rows]))
    else:
        _emit(rows, args.format, out)


# (name, expected, tolerance) -- tolerance None means exact
def _golden_checks():
    inst = datasets.noisy_recovery_instance()
    st = residual_staircase(inst)
    ident = levels(st, Identity())
    quad = levels(st, Power(2))
    bp = breakpoints(quad)
    F = marginal_F(quad, bp)
    hinge = exact_penalty_threshold(inst, SquaredHinge(3.6), 3.6, st)
    syn = datasets.synthetic_levels()
    sbp = breakpoints(syn)
    checks = [
        ("identity levels L", 4, ident.L, None),
        ("identity levels s", [4, 3, 2, 1, 0], ident.s.tolist(), None),
        ("identity levels rho", [0, 1.4487, 3.3363, 4.0502, 21.2106], ident.rho.tolist(), 2e-4),
        ("rank(A)", 4, st.rank, None),
        ("quadratic K", 3, bp.K, None),
        ("quadratic t", [0, 1, 3, 4], bp.t, None),
        ("quadratic tie sets", [[0], [1], [3], [4]], [sorted(S) for S in bp.tie_sets], None),
        ("quadratic lambda", [0.9530, 0.2796, 0.0046], bp.lam[:3], 1e-3),
        ("F slopes", [224.9447, 8.2021, 1.0494], [F.pieces[i][3] for i in (3, 2, 1)], 2e-3),
        ("H(1, 2, 3.6, 10, 22)", [4, 3, 2, 1, 0], [marginal_H(ident, v) for v in (1.0, 2.0, 3.6, 10.0, 22.0)], None),
        ("classify sigma=3.6", "NEVER", classify(quad, bp, 3.6).case.value, None),
        ("hinge levels s", [2, 1, 0], hinge.levels.s.tolist(), None),
        ("hinge rho_1", 0.1013, float(hinge.levels.rho[1]), 5e-4),
        ("hinge rho_2", 155.0666, float(hinge.levels.rho[2]), 5e-2),
        ("lambda* (relative)", 9.8678, hinge.lambda_star, ("rel", 2e-3)),
        (
            "exactness at lambda 10, 20, 100",
            True,
            verify_exactness(inst, SquaredHinge(3.6), 3.6, [10, 20, 100]).all_passed_above_threshold,
            None,
        ),
        ("synthetic K", 2, sbp.K, None),
        ("synthetic t", [0, 2, 4], sbp.t, None),
        ("synthetic tie sets", [[0], [1, 2], [4]], [sorted(S) for S in sbp.tie_sets], None),
        ("synthetic lambda", [4.0, 2.0], sbp.lam[:2], 1e-12),
    ]
    return checks


def _passes(expected, got, tol):
    if tol is None:
        return expected == got
    rel = isinstance(tol, tuple)
    tol = tol[1] if rel else tol
    e = np.atleast_1d(np.asarray(expected, dtype=float))
    g = np.atleast_1d(np.asarray(got, dtype=float))
    if e.shape != g.shape:
        return False
    bound = tol * np.abs(e) if rel else tol
    return bool(np.all(np.abs(e - g) <= bound))


def cmd_repro(args, out):
    rows = []
    for name, expected, got, tol in _golden_checks():
        rows.append({"check": name, "expected": expected, "got": got, "passed": _passes(expected, got, tol)})
    if args.format == "json":
        out.write(dumps(rows) + "\n")
    else:
        width = max(len(r["check"]) for r in rows)
        for r in rows:
            flag = "PASS" if r["passed"] else "FAIL"
            out.write(f"{flag}  {r['check']:<{width}}  expected {_fmt(r['expected'])}  got {_fmt(r['got'])}\n")
    return 0 if all(r["passed"] for r in rows) else 1


HANDLERS = {
    "levels": cmd_levels,
    "breakpoints": cmd_breakpoints,
    "marginal-h": cmd_marginal_h,
    "marginal-f": cmd_marginal_f,
    "classify": cmd_classify,
    "exact-penalty": cmd_exact_penalty,
    "cardinality": cmd_cardinality,
    "gradient-check": cmd_gradient_check,
    "solve": cmd_solve,
    "plot-data": cmd_plot_data,
    "repro": cmd_repro,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="l0lab", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--instance", help="instance JSON {A, b, p}; defaults to the bundled 4x5 instance")
        sp.add_argument("--levels", help="levels JSON {s, rho} instead of an instance")
        sp.add_argument("--p", type=int, choices=(1, 2), help="override the instance's residual norm")
        sp.add_argument("--phi", help="penalty variant name or JSON object")
        sp.add_argument("--phi-p", type=int, default=2, choices=(1, 2))
        sp.add_argument("--phi-sigma", type=float, default=0.0)
        sp.add_argument("--sigma", type=float)
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--level", type=int)
        sp.add_argument("--verify", type=float, nargs="+", metavar="LAMBDA")
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--tol", type=float, default=1e-9, help="level comparison tolerance")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=100)
        sp.add_argument("--x0", choices=("zeros", "random"), default="zeros")
        sp.add_argument("--max-iters", type=int, default=10_000)
        sp.add_argument("--trace", help="write the solver trace as CSV to this path")
    return parser


def run(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code = HANDLERS[args.command](args, out)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"error: {exc} (sigma* = {exc.sigma_star:.17g})", file=sys.stderr)
        return 1
    except L0LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code or 0


def main():
    sys.exit(run())
