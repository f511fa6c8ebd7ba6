"""Command-line interface: ``python -m bframelets <subcommand>`` (or ``bframelets``).

Exit codes: 0 success, 1 invalid input, 2 numerical or tolerance failure
(including failed verification suites).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import FrameletError, InvalidInputError, NumericalError
from .framelets import (
    FrameletId,
    framelet_eval,
    framelet_eval_fourier_inversion,
    framelet_eval_recurrence,
)
from .gaussian import (
    PAPER_TABLE1,
    BesselEstimatorConfig,
    GaussianFrameletId,
    format_table,
    gaussian_frame_bounds,
    gaussian_framelet_eval,
)
from .quadrature import QuadratureConfig
from .transform import (
    TEST_FUNCTIONS,
    IndexBox,
    coefficient_table,
    get_test_function,
    parseval_ratio,
    parseval_ratio_gaussian,
)
from .verification import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2
MAX_GRID_POINTS = 10_000_000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_grid(spec: str) -> np.ndarray:
    """``start:end:step`` with both endpoints included.

    Values are exact multiples ``start + i*step`` computed in rational
    arithmetic; ``end`` is snapped down to the last multiple not beyond it.
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise InvalidInputError(f"grid must look like start:end:step, got {spec!r}")
    try:
        start, end, step = (Fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"bad number in grid {spec!r}") from exc
    if step <= 0 or end < start:
        raise InvalidInputError("grid needs step > 0 and end >= start")
    count = int((end - start) // step) + 1
    if count > MAX_GRID_POINTS:
        raise InvalidInputError(f"grid has {count} points; the limit is {MAX_GRID_POINTS}")
    return np.array([float(start + i * step) for i in range(count)])


def parse_range(spec: str) -> list[int]:
    """``"3"``, ``"2..8"`` (inclusive) or ``"1,3,5"``."""
    out: list[int] = []
    try:
        for chunk in spec.split(","):
            chunk = chunk.strip()
            if ".." in chunk:
                lo, hi = chunk.split("..")
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise InvalidInputError(f"empty range {chunk!r}")
                out.extend(range(lo_i, hi_i + 1))
            else:
                out.append(int(chunk))
    except ValueError as exc:
        raise InvalidInputError(f"bad integer range {spec!r}") from exc
    return out


def _fmt(v: float) -> str:
    return "%.17g" % v


def _write_csv(header, columns, out) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([_fmt(v) for v in row])
    _emit(buf.getvalue(), out)


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _quad_from_args(args) -> QuadratureConfig:
    return QuadratureConfig(panel_width=args.panel_width, order=args.order, truncation=args.truncation)


# -- subcommands ----------------------------------------------------------------


def cmd_eval(args) -> int:
    x = parse_grid(args.grid)
    quad = _quad_from_args(args)
    header, cols = ["x"], [x]
    for ell in parse_range(args.l):
        fid = FrameletId(args.m, ell, not args.uncentered)
        routes = {
            "piecewise": lambda: framelet_eval(fid, x),
            "recurrence": lambda: framelet_eval_recurrence(fid, x),
            "fourier": lambda: framelet_eval_fourier_inversion(fid, x, quad),
        }
        if args.route == "all":
            vals = [np.asarray(routes[r]()) for r in ("piecewise", "recurrence", "fourier")]
            diff = np.max(np.abs(np.array([vals[0] - vals[1], vals[0] - vals[2], vals[1] - vals[2]])), axis=0)
            header += [f"psi_{ell}_piecewise", f"psi_{ell}_recurrence", f"psi_{ell}_fourier", f"maxdiff_{ell}"]
            cols += vals + [diff]
        else:
            header.append(f"psi_{ell}")
            cols.append(np.asarray(routes[args.route]()))
    _write_csv(header, cols, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    results = [run_suite(s, m).to_dict() for s in suites for m in parse_range(args.m)]
    ok = all(r["passed"] for r in results)
    report = {"passed": ok, "results": results, "config": {"suite": args.suite, "m": args.m}}
    _emit(_dump_json(report), args.out)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_framebounds(args) -> int:
    cfg = BesselEstimatorConfig(grid=args.grid, n_range=args.n_range, k_range=args.k_range, refine=args.refine)
    reports = [gaussian_frame_bounds(m, cfg) for m in parse_range(args.m)]
    rows = []
    for r in reports:
        d = r.to_dict()
        if args.compare_paper and r.m in PAPER_TABLE1 and r.valid:
            pa, pb = PAPER_TABLE1[r.m]
            d["paper"] = {"A": pa, "B": pb, "dA": r.A - pa, "dB": r.B - pb}
        rows.append(d)
    doc = {"reports": rows, "config": cfg.to_dict()}
    sys.stdout.write(format_table(reports, args.compare_paper) + "\n")
    if args.json:
        _emit(_dump_json(doc), args.json)
    flagged = [r.m for r in reports if not r.valid]
    if flagged:
        sys.stderr.write(f"R_m >= 1 for m in {flagged}: frame bounds not available\n")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_gaussplot(args) -> int:
    x = parse_grid(args.grid)
    header, cols = ["x"], [x]
    for ell in parse_range(args.l):
        psi = np.asarray(framelet_eval(FrameletId(args.m, ell), x))
        g = np.asarray(gaussian_framelet_eval(GaussianFrameletId(args.m, ell), x))
        header += [f"psi_{ell}", f"G_{ell}", f"diff_{ell}"]
        cols += [psi, g, psi - g]
    _write_csv(header, cols, args.out)
    return EXIT_OK


def cmd_coeffs(args) -> int:
    f = get_test_function(args.function, normalized=args.normalized)
    quad = _quad_from_args(args)
    box = IndexBox(args.n_min, args.n_max)
    records = coefficient_table(f, args.m, box, quad)
    doc = {
        "coefficients": records,
        "config": {"function": args.function, "normalized": args.normalized, "m": args.m,
                   "box": box.to_dict(), "quadrature": quad.to_dict()},
    }
    _emit(_dump_json(doc), args.out)
    return EXIT_OK


def cmd_parseval(args) -> int:
    f = get_test_function(args.function, normalized=True)
    quad = _quad_from_args(args)
    box = IndexBox(args.n_min, args.n_max)
    fn = parseval_ratio if args.system == "framelet" else parseval_ratio_gaussian
    ratio = fn(f, args.m, box, quad)
    doc = {"ratio": ratio,
           "config": {"function": args.function, "m": args.m, "system": args.system,
                      "box": box.to_dict(), "quadrature": quad.to_dict()}}
    _emit(_dump_json(doc), args.out)
    return EXIT_OK


def _add_quad(p) -> None:
    d = QuadratureConfig()
    p.add_argument("--panel-width", type=float, default=d.panel_width, help="max quadrature panel width")
    p.add_argument("--order", type=int, default=d.order, help="Gauss-Legendre points per panel")
    p.add_argument("--truncation", type=float, default=d.truncation, help="Fourier truncation radius")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bframelets", description="B-spline tight framelets and their Gaussian limits.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="sample framelets on a grid (CSV)")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--l", default=None, help="index or range such as 1..5 (default: all)")
    e.add_argument("--grid", required=True, help="start:end:step, endpoints included")
    e.add_argument("--route", choices=("piecewise", "recurrence", "fourier", "all"), default="piecewise")
    e.add_argument("--uncentered", action="store_true",
                   help="sample psi(x) = psi_centered(x - j_m/2) instead of the centered framelet")
    e.add_argument("--out", default=None, help="output file (default stdout)")
    _add_quad(e)
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run an invariant suite (JSON)")
    v.add_argument("--suite", choices=(*SUITES, "all"), required=True)
    v.add_argument("--m", default="1..8")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    d = BesselEstimatorConfig()
    fb = sub.add_parser("framebounds", help="frame bounds of the Gaussian system")
    fb.add_argument("--m", default="2..8")
    fb.add_argument("--grid", type=int, default=d.grid, help="omega grid intervals on [1, 2]")
    fb.add_argument("--n-range", type=int, default=d.n_range)
    fb.add_argument("--k-range", type=int, default=d.k_range)
    fb.add_argument("--refine", type=int, default=d.refine)
    fb.add_argument("--compare-paper", action="store_true", help="show deviations from the published table")
    fb.add_argument("--json", default=None, help="also write the JSON report here ('-' for stdout)")
    fb.set_defaults(func=cmd_framebounds)

    g = sub.add_parser("gaussplot", help="framelets, Gaussian approximants and differences (CSV)")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--l", default=None)
    g.add_argument("--grid", required=True)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gaussplot)

    c = sub.add_parser("coeffs", help="framelet coefficients of a test function (JSON)")
    c.add_argument("--function", choices=sorted(TEST_FUNCTIONS), default="gaussian")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--n-min", type=int, default=-2)
    c.add_argument("--n-max", type=int, default=2)
    c.add_argument("--normalized", action="store_true")
    c.add_argument("--out", default=None)
    _add_quad(c)
    c.set_defaults(func=cmd_coeffs)

    pv = sub.add_parser("parseval", help="frame energy ratio over an index box (JSON)")
    pv.add_argument("--function", choices=sorted(TEST_FUNCTIONS), default="bump")
    pv.add_argument("--m", type=int, required=True)
    pv.add_argument("--n-min", type=int, default=-6)
    pv.add_argument("--n-max", type=int, default=10)
    pv.add_argument("--system", choices=("framelet", "gaussian"), default="framelet")
    pv.add_argument("--out", default=None)
    _add_quad(pv)
    pv.set_defaults(func=cmd_parseval)
    return p


def _attach_values(argv):
    # "--grid -2:2:0.1" would be read as an unknown option, so glue value-taking flags to their values
    out, it = [], iter(argv)
    for a in it:
        if a in ("--grid", "--l", "--m") and (nxt := next(it, None)) is not None:
            out.append(f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and validation errors
        return int(exc.code or 0)
    if getattr(args, "l", "x") is None:
        args.l = f"1..{args.m}"
    try:
        return args.func(args)
    except NumericalError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return EXIT_NUMERIC
    except FrameletError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
