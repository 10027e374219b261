"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bundled import CORPUS_NAMES, load_metric
from .curvature import INCONSISTENT, compute_curvature, field_equation_residual, with_induced_matter
from .dirac import (
    DIRECT,
    MODES,
    PAPER,
    QUARTER,
    apply_operator,
    assemble_matter_operator,
    assemble_vacuum_operator,
    curvature_term_report,
    default_field_corpus,
    matter_term,
    parse_field_file,
)
from .errors import CurveDiracError, InputError, MissingStressEnergy
from .metric import MetricSpec
from .oracle import commutator_sweep, curvature_sweep, metric_derivative_sweep, operator_sweep
from .report import Report, array_payload, matrix_payload, number_payload
from .spinor import (
    anticommutator_deviation,
    clifford_trace_check,
    compute_tetrad,
    gamma_lower,
    numeric_anticommutator_error,
    numeric_curved_gammas,
    numeric_tetrad,
    spec_gammas,
    tetrad_reconstruction_error,
)
from .symexpr import HALF, add, eval_many, max_deviation, mul, neg, number, to_text
from .tensor import symmetry_deviation

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2


def parse_point(text: str, spec: MetricSpec) -> dict:
    """``"r=5,theta=0.7"`` -> coordinate dict; every coordinate must be given."""
    point = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise InputError(f"--at expects coord=value pairs, got {part!r}")
        key, val = (s.strip() for s in part.split("=", 1))
        if key not in spec.coords:
            raise InputError(f"--at: {key!r} is not a coordinate of {spec.name} ({', '.join(spec.coords)})")
        try:
            point[key] = float(val)
        except ValueError:
            raise InputError(f"--at: {val!r} is not a number") from None
    missing = [c for c in spec.coords if c not in point]
    if missing:
        raise InputError(f"--at: missing coordinate(s) {', '.join(missing)}")
    return point


def _midpoint(spec: MetricSpec) -> dict:
    return {c: 0.5 * (lo + hi) for c, (lo, hi) in spec.domain().items()}


def _values(exprs, spec, point) -> np.ndarray:
    return eval_many(list(exprs), {**spec.constants, **point})


def _point_arg(args, spec):
    return parse_point(args.at, spec) if args.at else None


def cmd_corpus(args) -> Report:
    rep = Report("corpus", "bundled")
    rep.payload["metrics"] = {name: f"corpus:{name}" for name in CORPUS_NAMES}
    return rep


def cmd_curvature(args, spec) -> Report:
    rep = Report("curvature", spec.name)
    b = compute_curvature(spec)
    rep.payload = {
        "coords": ", ".join(spec.coords),
        "christoffel": b.christoffel.to_dict(),
        "riemann": b.riemann.to_dict(),
        "ricci": b.ricci.to_dict(),
        "scalar": to_text(b.scalar),
        "einstein": b.einstein.to_dict(),
    }
    point = _point_arg(args, spec)
    if point:
        n = spec.dim
        rep.payload["at"] = point
        rep.payload["values"] = {
            "christoffel": array_payload(b.christoffel.evaluate({**spec.constants, **point})),
            "riemann": array_payload(b.riemann.evaluate({**spec.constants, **point})),
            "ricci": array_payload(b.ricci.evaluate({**spec.constants, **point})),
            "scalar": number_payload(_values([b.scalar], spec, point)[0]),
            "einstein": array_payload(_values(b.einstein.components, spec, point).reshape(n, n)),
        }
    dom, fixed = spec.domain(), spec.constants
    for t in (b.christoffel, b.riemann, b.ricci, b.einstein):
        for sa, sb, sign in t.symmetries:
            err = symmetry_deviation(t, sa, sb, sign, dom, fixed, seed=args.seed)
            kind = "symmetric" if sign > 0 else "antisymmetric"
            rep.add(f"{t.name}-{kind}-{sa}{sb}", err <= args.tol, err)
    return rep


def cmd_tetrad(args, spec) -> Report:
    rep = Report("tetrad", spec.name)
    point = _point_arg(args, spec)
    if spec.is_diagonal():
        tet = compute_tetrad(spec)
        rep.payload = {"V": matrix_payload(tet.v), "V_inv": matrix_payload(tet.v_inv)}
        err = tetrad_reconstruction_error(spec, tet, seed=args.seed)
        rep.add("tetrad-reconstruction", err <= args.tol, err)
        if point:
            rep.payload["at"] = point
            rep.payload["values"] = {"V": array_payload(_values([e for r in tet.v for e in r], spec, point).reshape(spec.dim, spec.dim))}
        return rep
    point = point or _midpoint(spec)
    v, v_inv = numeric_tetrad(spec, point)
    rep.payload = {"at": point, "V": v.round(15).tolist(), "V_inv": v_inv.round(15).tolist()}
    eta = np.diag(spec.signature)
    err = float(np.max(np.abs(v.T @ eta @ v - spec.metric_at(point))))
    rep.add("tetrad-reconstruction", err <= args.tol, err, note="numeric congruence tetrad")
    return rep


def cmd_gammas(args, spec) -> Report:
    rep = Report("gammas", spec.name)
    point = _point_arg(args, spec)
    if not spec.is_diagonal():
        point = point or _midpoint(spec)
        gam = numeric_curved_gammas(spec, point)
        rep.payload = {"at": point, "gamma_up": {str(k): array_payload(gam[k]) for k in range(spec.dim)}}
        err = numeric_anticommutator_error(spec, point)
        rep.add("clifford-anticommutator", err <= args.tol, err, note="numeric tetrad at one point")
        return rep
    up = spec_gammas(spec)
    down = gamma_lower(up, spec)
    rep.payload = {
        "gamma_up": {str(k): matrix_payload(up[k]) for k in range(len(up))},
        "gamma_down": {str(k): matrix_payload(down[k]) for k in range(len(down))},
    }
    if point:
        rep.payload["at"] = point
        rep.payload["values"] = {str(k): array_payload(m) for k, m in enumerate(up.evaluate({**spec.constants, **point}))}
    err = anticommutator_deviation(up, spec, seed=args.seed)
    rep.add("clifford-anticommutator", err <= args.tol, err)
    tr = clifford_trace_check(up, down, spec, seed=args.seed)
    rep.add("trace-total", tr.total_error <= args.tol, tr.total_error)
    rep.add("trace-per-lambda", tr.per_lambda_error <= args.tol, tr.per_lambda_error)
    return rep


def _potential_check(op, spec, bundle, seed):
    """The potential must match the closed form of its mode."""
    c = QUARTER if op.curvature_term_mode == PAPER else HALF
    m2 = mul(number(spec.mass), number(spec.mass))
    diag = add(mul(c, bundle.scalar), m2)
    expected = [[diag if i == j else number(0) for j in range(4)] for i in range(4)]
    if op.mode == "matter":
        mt = matter_term(spec)
        k = neg(mul(HALF, number(spec.coupling)))
        expected = [[add(expected[i][j], mul(k, mt[i][j])) for j in range(4)] for i in range(4)]
    a = [e for row in op.potential for e in row]
    b = [e for row in expected for e in row]
    return max_deviation(a, b, spec.domain(), 32, seed, spec.constants)


def cmd_dirac_op(args, spec) -> Report:
    if args.induced_matter:
        spec = with_induced_matter(spec)
    matter = args.matter or args.induced_matter
    if matter and spec.T is None:
        raise MissingStressEnergy(f"{spec.name} has no [stress-energy] section; try --induced-matter")
    build = assemble_matter_operator if matter else assemble_vacuum_operator
    op = build(spec, args.mode)
    bundle = compute_curvature(spec)
    rep = Report("dirac-op", spec.name)
    terms = curvature_term_report(spec, seed=args.seed)
    rep.payload = {
        "operator_mode": op.mode,
        "curvature_term_mode": op.curvature_term_mode,
        "mass": spec.mass,
        "coupling": spec.coupling,
        "scalar_curvature": to_text(bundle.scalar),
        "potential": matrix_payload(op.potential),
        "curvature_term": {DIRECT: matrix_payload(terms.direct), PAPER: matrix_payload(terms.paper)},
    }
    err = _potential_check(op, spec, bundle, args.seed)
    rep.add(f"potential-form-{op.mode}-{op.curvature_term_mode}", err <= args.tol, err)
    note = "" if terms.agree else "direct (1/2 R) and paper (1/4 R) curvature terms differ"
    rep.add("curvature-term-modes-agree", terms.agree, terms.difference, informational=True, note=note)
    if args.apply:
        try:
            text = Path(args.apply).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {args.apply}: {exc.strerror}") from exc
        field = parse_field_file(text)
        field.check_symbols(spec)
        out = apply_operator(op, field)
        rep.payload["applied"] = [to_text(e) for e in out]
        point = _point_arg(args, spec)
        if point:
            rep.payload["applied_at"] = {"at": point, "values": [number_payload(z) for z in _values(out, spec, point)]}
    return rep


def cmd_einstein_check(args, spec) -> Report:
    if args.induced_matter:
        spec = with_induced_matter(spec)
    res = field_equation_residual(spec, require_matter=args.matter, tol=args.tol, seed=args.seed)
    rep = Report("einstein-check", spec.name)
    rep.payload = {
        "classification": res.classification,
        "einstein": compute_curvature(spec).einstein.to_dict(),
        "residual": res.residual.to_dict(),
    }
    if spec.T is not None:
        rep.payload["stress_energy"] = spec.stress_energy().to_dict()
    rep.add("field-equation-residual", res.classification != INCONSISTENT, res.worst_error, note=res.classification)
    return rep


def cmd_verify(args, spec) -> Report:
    rep = Report("verify", spec.name)
    b = compute_curvature(spec)
    results = [metric_derivative_sweep(spec, seed=args.seed)]
    results += curvature_sweep(spec, b, seed=args.seed)
    results.append(commutator_sweep(spec, b.riemann, seed=args.seed))
    op = assemble_vacuum_operator(spec)
    results.append(operator_sweep(op, default_field_corpus(spec)[:2], seed=args.seed))
    for r in results:
        rep.add(f"oracle-{r.name}", r.passed, r.worst_error)
    if spec.is_diagonal():
        up = spec_gammas(spec)
        err = anticommutator_deviation(up, spec, seed=args.seed)
        rep.add("clifford-anticommutator", err <= args.tol, err)
        tr = clifford_trace_check(up, gamma_lower(up, spec), spec, seed=args.seed)
        rep.add("trace-total", tr.total_error <= args.tol, tr.total_error)
        err = tetrad_reconstruction_error(spec, seed=args.seed)
        rep.add("tetrad-reconstruction", err <= args.tol, err)
    else:
        err = numeric_anticommutator_error(spec, _midpoint(spec))
        rep.add("clifford-anticommutator", err <= args.tol, err, note="numeric tetrad at domain midpoint")
    rep.payload = {"table": {r.name: f"{'pass' if r.passed else 'FAIL'} {r.worst_error:.2e} < {r.tolerance:g}" for r in results}}
    return rep


COMMANDS = {
    "curvature": (cmd_curvature, "Christoffel symbols, Riemann, Ricci, scalar and Einstein tensors"),
    "tetrad": (cmd_tetrad, "tetrad V and its inverse"),
    "gammas": (cmd_gammas, "curved gamma matrices and Clifford checks"),
    "dirac-op": (cmd_dirac_op, "assemble the squared Dirac operator"),
    "einstein-check": (cmd_einstein_check, "field-equation residual and classification"),
    "verify": (cmd_verify, "finite-difference oracle sweep"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvedirac", description="Curved-spacetime Dirac operator toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    common.add_argument("--tol", type=float, default=1e-9, help="check tolerance (default 1e-9)")

    p = sub.add_parser("corpus", parents=[common], help="list bundled metrics")
    p.set_defaults(func=None)
    for name, (fn, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("metric", help="metric file path or corpus:<name>")
        p.add_argument("--at", help="coordinate point, e.g. r=5,theta=0.7,...")
        if name in ("dirac-op", "einstein-check"):
            p.add_argument("--matter", action="store_true", help="use the metric's stress-energy tensor")
            p.add_argument("--induced-matter", action="store_true", help="use T = -G/K")
        if name == "dirac-op":
            p.add_argument("--mode", choices=MODES, default=PAPER, help="curvature-term mode (default paper)")
            p.add_argument("--apply", metavar="FIELD_FILE", help="apply the operator to a psi[0..3] field file")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "corpus":
            rep = cmd_corpus(args)
        else:
            rep = args.func(args, load_metric(args.metric))
    except (CurveDiracError, ValueError) as exc:
        print(f"curvedirac {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(rep.to_json() if args.json else rep.to_text())
    return EXIT_OK if rep.ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
