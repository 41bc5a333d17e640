"""Command-line front end for the adaptive loop.

Writes ``records.csv``, SVG mesh snapshots and the final mesh into the
output directory. Exit status is 0 on success and 1 on any error.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

from .driver import CSV_COLUMNS, AfemConfig, afem_loop, csv_row, fit_rate
from .mesh import read_mesh
from .problems import PROBLEMS, load_problem_file, polynomial_problem


def build_parser():
    p = argparse.ArgumentParser(
        prog="afem2d",
        description="Adaptive P1-P3 finite elements for -lap(u) = f with Dirichlet data.",
    )
    p.add_argument("--degree", type=int, choices=(1, 2, 3), default=1, help="Lagrange degree k")
    p.add_argument("--theta", type=float, default=0.4, help="Doerfler bulk parameter in [0, 1]")
    p.add_argument("--max-it", type=int, default=30, help="maximum number of loop iterations")
    p.add_argument("--quad-order", type=int, default=None, help="quadrature order (default depends on k)")
    p.add_argument("--rect", type=float, nargs=4, default=(0.0, 1.0, 0.0, 1.0), metavar=("X0", "X1", "Y0", "Y1"))
    p.add_argument("--h", type=float, nargs="+", default=[1 / 8], metavar="H", help="initial mesh size (h1 [h2])")
    p.add_argument("--mesh", type=Path, default=None, help="initial mesh file (overrides --rect/--h)")
    p.add_argument("--boundary-jump", choices=("on", "off"), default="on", help="jump terms on boundary edges")
    p.add_argument("--bdstr", action="append", default=[], metavar="EXPR", help="boundary part predicate (repeatable)")
    p.add_argument("--dof-budget", type=int, default=200_000, help="stop once ndof reaches this value")
    p.add_argument("--problem", choices=("gaussian-bump", "polynomial", "sine", "custom-file"), default="gaussian-bump")
    p.add_argument("--poly-degree", type=int, default=None, help="degree of the polynomial problem (default k)")
    p.add_argument("--problem-file", type=Path, default=None, help='JSON file {"u": "...", "f": "..."} for custom-file')
    p.add_argument("--snapshots", type=int, nargs="*", default=[0, 20, 30], help="steps with an SVG snapshot")
    p.add_argument("--no-timings", action="store_true", help="write 0 in the seconds column (reproducible CSV)")
    p.add_argument("--out", type=Path, default=Path("afem_out"), help="output directory")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def make_problem(args):
    if args.problem == "custom-file":
        if args.problem_file is None:
            raise ValueError("--problem custom-file needs --problem-file")
        return load_problem_file(args.problem_file)
    if args.problem == "polynomial":
        return polynomial_problem(args.poly_degree if args.poly_degree is not None else args.degree)
    return PROBLEMS[args.problem]()


def run(args):
    if len(args.h) > 2:
        raise ValueError("--h takes one or two values")
    h1 = args.h[0]
    h2 = args.h[1] if len(args.h) == 2 else h1
    config = AfemConfig(
        rect=tuple(args.rect),
        h1=h1,
        h2=h2,
        degree=args.degree,
        quadOrder=args.quad_order,
        theta=args.theta,
        maxIt=args.max_it,
        dof_budget=args.dof_budget,
        boundary_jump=args.boundary_jump == "on",
        bdStr=tuple(args.bdstr),
        out_dir=str(args.out),
        snapshots=tuple(args.snapshots),
        initial_mesh=read_mesh(args.mesh) if args.mesh else None,
    )
    pde = make_problem(args)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / "records.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        fh.flush()

        def on_record(record):
            writer.writerow(csv_row(record, timings=not args.no_timings))
            fh.flush()

        result = afem_loop(config, pde, on_record=on_record)
    records = result.records
    last = records[-1]
    print(f"{len(records)} iterations, ndof={last.ndof}, eta={last.eta:.4e}, errH1={last.errH1:.4e}")
    if len(records) >= 5:
        print(f"rates vs ndof: eta {fit_rate(records):+.3f}, errH1 {fit_rate(records, y='errH1'):+.3f}")
    print(f"output written to {args.out}")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors exit with 1, --help with 0
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        run(args)
    except Exception as exc:  # every stage error maps to exit status 1
        print(f"afem2d: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
