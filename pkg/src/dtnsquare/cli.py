"""Command-line front end.

Exit codes: 0 all checks passed, 1 a verification failed, 2 usage error,
3 runtime error (I/O failure, numerical breakdown).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time

import mpmath

from . import contfrac, network
from .circulant import minus_laplacian, sqrt_psd
from .network import CylinderNetwork, Provenance, Termination
from .precision import bits_from_digits, working
from .report import RawNumber, Report, Result, dumps

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _int_at_least(lo):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value

    return parse


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _routes(text):
    if text == "all":
        return list(network.ALL_ROUTES)
    try:
        return [Provenance(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError:
        names = ", ".join(p.value for p in Provenance)
        raise argparse.ArgumentTypeError(f"routes must be 'all' or a comma list of: {names}")


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _finish(report: Report, started: float, out) -> int:
    report.wall_time_ms = int(round((time.perf_counter() - started) * 1000))
    _write(report.to_json(), out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_conjecture(args) -> int:
    started = time.perf_counter()
    prec = bits_from_digits(args.digits)
    rep = contfrac.verify_conjecture(args.k, prec, args.tol)
    results = [Result(f"l={l}", r, args.tol) for l, r in enumerate(rep.residuals, start=1)]
    results.append(Result("max_residual", rep.max_residual, args.tol))
    report = Report(
        "conjecture",
        {"k": args.k, "digits": args.digits, "tol": args.tol},
        results,
        prec,
    )
    return _finish(report, started, args.out)


def cmd_theorem41(args) -> int:
    started = time.perf_counter()
    prec = bits_from_digits(args.digits)
    rep = network.verify_theorem41(
        args.n,
        args.routes,
        tol=args.tol,
        depth=args.depth,
        termination=Termination(args.termination),
        fp_tol=args.fp_tol,
        max_iter=args.max_iter,
        prec=prec,
    )
    results = []
    for route in rep.routes:
        results.append(Result(f"residual:{route.route.value}", route.residual, args.tol))
        if route.error is not None:
            results.append(Result(f"error:{route.route.value}", None, args.tol, False))
    for d in rep.discrepancies:
        results.append(Result(f"discrepancy:{d.first.value}-{d.second.value}", d.value, args.tol))
    report = Report(
        "theorem41",
        {
            "n": args.n,
            "routes": ",".join(r.route.value for r in rep.routes),
            "tol": args.tol,
            "depth": args.depth,
            "termination": args.termination,
            "fp_tol": args.fp_tol,
            "max_iter": args.max_iter,
            "digits": args.digits,
        },
        results,
        prec,
    )
    return _finish(report, started, args.out)


def _export_payload(args, prec):
    """Header plus rows of numbers, and a JSON object for the same data."""
    def fmt(x):
        return mpmath.nstr(mpmath.mpmathify(x), args.digits, strip_zeros=False)

    if args.what in ("sqrtL", "dtn"):
        if args.n is None:
            raise _Usage(f"--what {args.what} needs --n")
        if args.what == "sqrtL":
            matrix = sqrt_psd(minus_laplacian(args.n, prec))
        elif args.depth is None:
            matrix = network.dtn_infinite_closed_form(args.n, prec).matrix
        else:
            net = CylinderNetwork(args.n, args.depth, Termination(args.termination))
            matrix = network.dtn_truncated(net, prec).matrix
        with working(prec):
            rows = [[fmt(x) for x in row] for row in matrix.dense()]
        header = [f"c{j}" for j in range(args.n)]
        obj = {"what": args.what, "n": args.n, "precision_bits": prec,
               "rows": [[RawNumber(x) for x in row] for row in rows]}
        if args.what == "dtn":
            obj["depth"] = args.depth
            obj["termination"] = args.termination if args.depth is not None else None
        return header, rows, obj
    if args.k is None:
        raise _Usage(f"--what {args.what} needs --k")
    if args.what == "coeffs":
        values = contfrac.conjecture_coeffs(args.k, prec).c
    else:
        values = contfrac.lambda_points(args.k, prec).lam
    with mpmath.workprec(prec):
        rows = [[str(l), fmt(v.real), fmt(v.imag)] for l, v in enumerate(values, start=1)]
    obj = {"what": args.what, "k": args.k, "precision_bits": prec,
           "entries": [{"l": int(l), "re": RawNumber(re), "im": RawNumber(im)} for l, re, im in rows]}
    return ["l", "re", "im"], rows, obj


class _Usage(Exception):
    pass


def cmd_export(args) -> int:
    prec = bits_from_digits(args.digits)
    header, rows, obj = _export_payload(args, prec)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = dumps(obj) + "\n"
    _write(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtnsquare",
        description="Verify square-root Dirichlet-to-Neumann identities on cylinder networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("conjecture", help="check beta(lambda_l) = 1 for the closed-form coefficients")
    p.add_argument("--k", type=_int_at_least(1), required=True, help="number of floors")
    p.add_argument("--digits", type=_int_at_least(1), default=15, help="decimal digits of working precision")
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("theorem41", help="check Lambda^2 = L for the infinite cylinder network")
    p.add_argument("--n", type=_int_at_least(3), required=True, help="boundary vertices")
    p.add_argument("--routes", type=_routes, default=list(network.ALL_ROUTES),
                   help="'all' or comma list of schur, per_mode, fixed_point, closed_form")
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--depth", type=_int_at_least(1), default=400, help="truncation depth for schur/per_mode")
    p.add_argument("--termination", choices=[t.value for t in Termination], default="insulated")
    p.add_argument("--fp-tol", type=_positive_float, default=1e-10, help="fixed-point step tolerance")
    p.add_argument("--max-iter", type=_int_at_least(1), default=10_000)
    p.add_argument("--digits", type=_int_at_least(1), default=15)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theorem41)

    p = sub.add_parser("export", help="write sqrt(L), a DtN map, coefficients or lambda points")
    p.add_argument("--what", choices=["sqrtL", "dtn", "coeffs", "lambda"], required=True)
    p.add_argument("--n", type=_int_at_least(3))
    p.add_argument("--k", type=_int_at_least(1))
    p.add_argument("--depth", type=_int_at_least(1), help="finite depth for --what dtn (default: infinite)")
    p.add_argument("--termination", choices=[t.value for t in Termination], default="insulated")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--digits", type=_int_at_least(1), default=15)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except Exception as exc:  # noqa: BLE001
        print(f"dtnsquare: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
