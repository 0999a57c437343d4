"""Command-line interface: ``shellhyper {fit,eval,study,field,certify}``.

Exit codes: 0 success, 1 usage or input error, 2 certification or
precondition failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import (
    CertificationError,
    DomainError,
    GeometryError,
    NumericalError,
    ParseError,
    PreconditionError,
)
from .filters import FilterPair
from .functions import get_function
from .operator import ShellApproximant, baseline_nonfiltered, fit
from .orthopoly import JacobiBasis
from .quadrature import (
    DegreeCaps,
    DesignLibrary,
    SphericalRule,
    angular_rule_for,
    certify,
    default_design_library,
    parse_points,
    product_rule,
    radial_rule_for,
    _read_text,
)
from .study import StudyConfig, convergence_study, layer_field, radial_line

EXIT_OK, EXIT_USAGE, EXIT_CERT, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_basis_args(p):
    p.add_argument("--alpha", type=float, default=-0.5)
    p.add_argument("--beta", type=float, default=-0.5)
    p.add_argument("--r-in", type=float, default=1.0)
    p.add_argument("--r-out", type=float, default=1.001)


def _add_fit_args(p):
    p.add_argument("-K", type=int, required=True, help="radial degree")
    p.add_argument("-L", type=int, required=True, help="angular degree")
    p.add_argument("--filter", default="exp", help="radial filter (exp or indicator)")
    p.add_argument("--filter-ang", default=None, help="angular filter (defaults to --filter)")
    p.add_argument("--design-dir", default=None,
                   help="design library for angular rules ('bundled' for the packaged one); "
                        "product rules otherwise")
    _add_basis_args(p)


def _basis(args) -> JacobiBasis:
    return JacobiBasis(args.alpha, args.beta, args.r_in, args.r_out)


def _designs(args) -> DesignLibrary | None:
    if args.design_dir is None:
        return None
    if args.design_dir == "bundled":
        return default_design_library()
    return DesignLibrary(Path(args.design_dir))


def _setup(args):
    filters = FilterPair.by_name(args.filter, args.filter_ang)
    caps = DegreeCaps.for_filters(args.K, args.L, filters)
    basis = _basis(args)
    return basis, caps, filters


def _node_tensor(basis, caps, designs):
    rrule = radial_rule_for(basis, caps)
    arule = angular_rule_for(caps, designs)
    return rrule, arule


def _write_nodes(path, rrule, arule) -> None:
    n_r, n_s = rrule.n_points, arule.n_points
    r = np.repeat(rrule.nodes, n_s)
    s = np.tile(arule.points, (n_r, 1))
    np.savetxt(path, np.column_stack([r, s]), fmt="%.17e",
               header=f"r x y z; {n_r} radii x {n_s} directions, radius-major", comments="# ")


def _read_samples(path, rrule, arule) -> np.ndarray:
    text, name = _read_text(path)
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(t) for t in line.split()])
        except ValueError:
            raise ParseError(f"{name}:{lineno}: non-numeric token") from None
        if len(rows[-1]) not in (1, 5):
            raise ParseError(f"{name}:{lineno}: expected 'value' or 'r x y z value'")
    n_r, n_s = rrule.n_points, arule.n_points
    if len(rows) != n_r * n_s:
        raise ParseError(f"{name}: expected {n_r * n_s} samples, found {len(rows)}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseError(f"{name}: mixed row formats")
    data = np.array(rows)
    if widths == {5}:
        expected = np.column_stack([np.repeat(rrule.nodes, n_s), np.tile(arule.points, (n_r, 1))])
        if np.max(np.abs(data[:, :4] - expected)) > 1e-12:
            raise ParseError(f"{name}: sample locations do not match the quadrature nodes")
    return data[:, -1].reshape(n_r, n_s)


def cmd_fit(args) -> int:
    basis, caps, filters = _setup(args)
    designs = _designs(args)
    rrule, arule = _node_tensor(basis, caps, designs)
    if args.emit_nodes:
        _write_nodes(args.emit_nodes, rrule, arule)
        if not args.function and not args.samples:
            return EXIT_OK
    if bool(args.function) == bool(args.samples):
        raise DomainError("give exactly one of --function and --samples")
    if args.function:
        f = get_function(args.function)
    else:
        values = _read_samples(args.samples, rrule, arule)

        def f(r, sigma):
            # only ever called once, on the node tensor
            return values

    approx = fit(f, caps, basis, filters, radial_rule=rrule, angular_rule=arule)
    if args.output:
        approx.save(args.output)
    else:
        sys.stdout.write(approx.to_json() + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    approx = ShellApproximant.load(args.approximant)
    text, name = _read_text(args.points)
    x = parse_points(text, name)
    values = approx.evaluate_cartesian(x)
    out = args.output if args.output else sys.stdout
    np.savetxt(out, values, fmt="%.17e")
    return EXIT_OK


def cmd_study(args) -> int:
    cfg = StudyConfig.load(args.config)
    if args.timing:
        cfg.timing = True
    output = args.output or cfg.output or sys.stdout
    result = convergence_study(cfg, output)
    if output is not sys.stdout:
        sys.stderr.write(
            f"wrote {len(result.rows)} rows to {output}; "
            f"slope_filtered={result.slope_filtered} slope_baseline={result.slope_baseline}\n"
        )
    return EXIT_OK


def cmd_field(args) -> int:
    f = get_function(args.function)
    if args.approximant:
        approx = ShellApproximant.load(args.approximant)
    else:
        if args.K is None or args.L is None:
            raise DomainError("give an approximant file or both -K and -L")
        basis, caps, filters = _setup(args)
        designs = _designs(args)
        if args.scheme == "baseline":
            approx = baseline_nonfiltered(f, args.K, args.L, basis,
                                          angular_rule=angular_rule_for(DegreeCaps(args.K, args.L, 1.0, 1.0), designs))
        else:
            approx = fit(f, caps, basis, filters, angular_rule=angular_rule_for(caps, designs))
    if args.line is not None:
        table = radial_line(approx, f, args.line, args.n, output=args.output)
        if not args.output:
            np.savetxt(sys.stdout, table, fmt="%.17e")
    else:
        level = args.layer
        try:
            level = float(level)
        except ValueError:
            pass
        if not args.output:
            raise DomainError("layer extraction needs -o/--output (a path stem)")
        layer_field(approx, f, level, tuple(args.resolution), output=args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    reports = []
    for path in args.files:
        text, name = _read_text(path)
        pts = parse_points(text, name)
        norms = np.linalg.norm(pts, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-8:
            raise GeometryError(f"{name}: points are not on the unit sphere")
        pts = pts / norms[:, None]
        w = np.full(len(pts), 4.0 * np.pi / len(pts))
        reports.append((name, certify(SphericalRule(pts, w, args.t, source=name), args.t, args.tol)))
    for t in args.product or []:
        reports.append((f"product({t})", certify(product_rule(t), t, args.tol)))
    if args.radial is not None:
        basis = _basis(args)
        rule = radial_rule_for(basis, DegreeCaps(args.radial, 1, 2.0, 1.0))
        reports.append((f"gauss-jacobi(K={args.radial})", certify(rule, rule.precision, args.tol)))
    if not reports:
        raise DomainError("nothing to certify")
    ok = True
    for name, report in reports:
        print(f"{name}: {report.format()}")
        ok &= report.passed
    return EXIT_OK if ok else EXIT_CERT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shellhyper", description="Filtered hyperinterpolation on a spherical shell.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a test function or node samples; writes a JSON approximant")
    _add_fit_args(p)
    p.add_argument("--function", help="test function id (f1, f2, f3, const)")
    p.add_argument("--samples", help="values at the emitted nodes, one per line ('value' or 'r x y z value')")
    p.add_argument("--emit-nodes", help="write the quadrature node tensor to this file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate an approximant at 'x y z' points")
    p.add_argument("approximant")
    p.add_argument("points")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("study", help="run a convergence study from a config file; writes CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("--timing", action="store_true", help="fill the fit_seconds column")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("field", help="error on a layer (theta x phi) or along a radial line")
    p.add_argument("--function", required=True)
    p.add_argument("--approximant", help="serialized approximant; otherwise fit with -K/-L")
    p.add_argument("-K", type=int)
    p.add_argument("-L", type=int)
    p.add_argument("--scheme", choices=["filtered", "baseline"], default="filtered")
    p.add_argument("--filter", default="exp")
    p.add_argument("--filter-ang", default=None)
    p.add_argument("--design-dir", default=None)
    _add_basis_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--layer", help="inner, mid, outer or a radius")
    g.add_argument("--line", type=float, nargs=3, metavar=("X", "Y", "Z"), help="direction of a radial line")
    p.add_argument("--resolution", type=int, nargs=2, default=[91, 180], metavar=("NTHETA", "NPHI"))
    p.add_argument("-n", type=int, default=101, help="number of radii on a line")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("certify", help="certify design files, product rules or Gauss-Jacobi rules")
    p.add_argument("files", nargs="*", help="equal-weight design files ('x y z' rows)")
    p.add_argument("-t", type=int, default=None, help="declared design strength for the files")
    p.add_argument("--product", type=int, nargs="+", metavar="T", help="product rules of precision T")
    p.add_argument("--radial", type=int, metavar="K", help="Gauss-Jacobi rule for radial degree K (a=2)")
    p.add_argument("--tol", type=float, default=1e-9)
    _add_basis_args(p)
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "certify" and args.files and args.t is None:
        parser.error("certify: design files need -t")
    try:
        return args.func(args)
    except (CertificationError, PreconditionError, GeometryError) as exc:
        sys.stderr.write(f"shellhyper: {exc}\n")
        return EXIT_CERT
    except (NumericalError, FloatingPointError) as exc:
        sys.stderr.write(f"shellhyper: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except (DomainError, ParseError, OSError, KeyError) as exc:
        sys.stderr.write(f"shellhyper: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
