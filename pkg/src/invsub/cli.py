"""Command-line front end.

    invsub classify --dist frechet
    invsub order --left frechet --right pareto --order i-sb
    invsub dominate --dist pareto --weights 0.5,0.5 --exact
    invsub catalog
    invsub report --out acceptance/

Exit status: 0 supported (or no implication violations), 2 implication
violations (classify), 3 violated (order, dominate), 1 input error or a
comparison that does not apply to the given distributions.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .catalog import CATALOG, parse_spec
from .classifiers import classify_all
from .dominance import DOMINANCE_GRID, WeightVector, check_dominance_exact2, check_dominance_mc
from .errors import InvsubError
from .numerics import GridSpec, Status, dumps
from .orders import ORDERS, compare
from .reports import DEFAULT_SEED, acceptance_bundle, write_text

EXIT_OK, EXIT_ERROR, EXIT_IMPLICATION, EXIT_VIOLATED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which collides with the verdict codes
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _grid_arg(text):
    parts = text.split(",")
    if len(parts) != 4 or parts[3] not in ("log", "lin", "linear"):
        raise argparse.ArgumentTypeError("expected x_lo,x_hi,n,log|lin")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2]), "log" if parts[3] == "log" else "linear"
    except ValueError:
        raise argparse.ArgumentTypeError("expected x_lo,x_hi,n,log|lin") from None


def _grid_flags(p):
    p.add_argument("--grid", type=_grid_arg, metavar="X_LO,X_HI,N,log|lin",
                   help="x lattice (default 1e-6,1e6,2001,log; dominance 1e-3,1e4,141,log)")
    p.add_argument("--theta-points", type=int, help="number of weights in (0, 1) (default 199)")
    p.add_argument("--tol", type=float, help="violation tolerance (default 1e-9; dominance 1e-6)")
    p.add_argument("--workers", type=int, default=1, help="threads for grid scans and sampling")


def _output_flags(p, formats=("json", "csv")):
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=formats, default="json")


def build_parser():
    parser = _Parser(prog="invsub", description="Heavy-tail classes, stochastic orders and "
                                                "diversification dominance checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="run every class test on one distribution")
    p.add_argument("--dist", required=True, help="distribution spec, e.g. oddslog:b=0.5")
    _grid_flags(p)
    _output_flags(p)

    p = sub.add_parser("order", help="compare two distributions in a stochastic order")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--order", required=True, choices=ORDERS)
    _grid_flags(p)
    _output_flags(p)

    p = sub.add_parser("dominate", help="check X <=st sum of weighted iid copies")
    p.add_argument("--dist", required=True)
    p.add_argument("--weights", default="0.5,0.5", help="comma-separated positive weights summing to 1")
    p.add_argument("--exact", action="store_true", help="two-copy quadrature instead of simulation")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _grid_flags(p)
    _output_flags(p)

    p = sub.add_parser("catalog", help="list the named distributions")
    _output_flags(p, formats=("text", "json"))
    p.set_defaults(format="text")

    p = sub.add_parser("report", help="write the acceptance report bundle to a directory")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _grid_flags(p)
    return parser


def _grid(args, base: GridSpec):
    changes = {}
    if args.grid is not None:
        changes.update(zip(("x_lo", "x_hi", "n_x", "spacing"), args.grid))
    if args.theta_points is not None:
        changes["theta_points"] = args.theta_points
    if args.tol is not None:
        changes["tol"] = args.tol
    try:
        return base.replace(**changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, text):
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _csv(rows):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _witness(w):
    return "" if w is None else " ".join(repr(float(t)) for t in w)


def cmd_classify(args):
    d = parse_spec(args.dist)
    report = classify_all(d, _grid(args, GridSpec()), workers=args.workers)
    if args.format == "csv":
        rows = [["class", "status", "worst_residual", "witness"]]
        rows += [[k, v.status.value, repr(v.worst_residual), _witness(v.witness)]
                 for k, v in report.verdicts.items()]
        _emit(args, _csv(rows))
    else:
        _emit(args, dumps(report))
    return EXIT_IMPLICATION if report.implication_violations else EXIT_OK


def _status_code(verdict):
    if verdict.status is Status.SUPPORTED:
        return EXIT_OK
    if verdict.status is Status.VIOLATED:
        return EXIT_VIOLATED
    print(f"not applicable: {verdict.note}", file=sys.stderr)
    return EXIT_ERROR


def cmd_order(args):
    left, right = parse_spec(args.left), parse_spec(args.right)
    check = compare(left, right, args.order, _grid(args, GridSpec()), workers=args.workers)
    if args.format == "csv":
        _emit(args, _csv([["x", "value"]] + [[repr(x), repr(v)] for x, v in check.composition]))
    else:
        _emit(args, dumps(check))
    return _status_code(check.verdict)


def cmd_dominate(args):
    d = parse_spec(args.dist)
    w = WeightVector.parse(args.weights)
    g = _grid(args, DOMINANCE_GRID)
    if args.exact:
        if len(w) != 2:
            raise UsageError("--exact needs exactly two weights")
        report = check_dominance_exact2(d, w.theta[0], g)
    else:
        report = check_dominance_mc(d, w, n_samples=args.samples, seed=args.seed, alpha=args.alpha,
                                    g=g, workers=args.workers)
    _emit(args, report.to_csv() if args.format == "csv" else dumps(report))
    return _status_code(report.verdict)


def cmd_catalog(args):
    if args.format == "json":
        data = [{"name": e.name, "params": e.params, "summary": e.summary} for e in CATALOG.values()]
        data.append({"name": "table", "params": {"path": "<file>"}, "summary": "CSV with header x,F"})
        _emit(args, dumps(data))
    else:
        lines = []
        for e in CATALOG.values():
            params = ",".join(f"{k}={str(v).lower() if isinstance(v, bool) else v}" for k, v in e.params.items())
            lines.append(f"{e.name:16s} {params:28s} {e.summary}")
        lines.append(f"{'table':16s} {'<path>':28s} CSV with header x,F")
        lines.append(f"{'transform':16s} {'(h,dist)':28s} h in pow:k, expm1, affine:a,b")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_report(args):
    paths = acceptance_bundle(args.out, seed=args.seed, workers=args.workers,
                              grid=_grid(args, GridSpec()))
    print(f"wrote {len(paths)} files to {args.out}")
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "order": cmd_order, "dominate": cmd_dominate,
            "catalog": cmd_catalog, "report": cmd_report}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, InvsubError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
