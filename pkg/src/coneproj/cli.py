"""Command-line interface.

    coneproj project --input data.csv [--equispaced] [--oracle] [--format json|csv]
    coneproj simulate --n 5 --trials 100000 --seed 7 [--engine solver|oracle|both]

``project`` exits 0 when the violation was cleared (or the data was
already convex), 2 when the solver stopped for any other reason, and 1 on
errors.  Set ``CONE_PROJ_LOG`` to ``info`` or ``debug`` for diagnostics on
standard error.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .constraints import DataSet, build_equispaced, build_for
from .errors import ConeProjError, NotIncreasing, ParseError, SchemaError
from .oracle import oracle_project
from .records import SCHEMA_VERSION, RunRecord, dumps_json
from .simulate import SimulationPlan, compare_engines, simulate_weights
from .solver import SolverConfig, solve

log = logging.getLogger("coneproj")

EXIT_OK, EXIT_ERROR, EXIT_UNCLEAN = 0, 1, 2


def _number(cell, line, column):
    text = cell.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(line, column, f"not a decimal or p/q literal: {text!r}") from exc
    return float(value)


def parse_dataset(source, equispaced=False):
    """Read a ``x,phi`` or ``phi`` CSV (with header) into a :class:`DataSet`.

    ``source`` is a path or a text stream.  Rational literals such as
    ``15/4`` are converted exactly, then rounded once to the nearest float.
    A lone ``phi`` column needs ``equispaced=True`` and gets ``x = 0, 1, ...``.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return parse_dataset(fh, equispaced)
    rows = [r for r in csv.reader(source)]
    if not rows:
        raise SchemaError("empty input")
    header = [h.strip() for h in rows[0]]
    if header == ["x", "phi"]:
        has_x = True
    elif header == ["phi"]:
        if not equispaced:
            raise SchemaError("a lone 'phi' column requires --equispaced")
        has_x = False
    else:
        raise SchemaError(f"header must be 'x,phi' or 'phi', got {','.join(header)!r}")
    xs, phis = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(lineno, len(row), f"expected {len(header)} fields, got {len(row)}")
        if has_x:
            xs.append(_number(row[0], lineno, 1))
        phis.append(_number(row[-1], lineno, len(header)))
    if not has_x:
        xs = list(range(len(phis)))
    try:
        data = DataSet(np.array(xs, dtype=float), np.array(phis, dtype=float))
    except NotIncreasing as exc:
        # data rows start on line 2
        raise NotIncreasing(exc.index, line=exc.index + 1) from None
    if equispaced and not data.is_equispaced():
        raise SchemaError("--equispaced given but x is not equally spaced")
    return data


def _open_output(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write(text, path):
    fh, close = _open_output(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def write_plot_data(path, data, result):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "phi", "y", "rho"])
        for row in zip(data.x, data.phi, result.y, result.rho):
            w.writerow([repr(float(v)) for v in row])


def run_project(args):
    data = parse_dataset(sys.stdin if args.input == "-" else args.input, args.equispaced)
    A = build_equispaced(data.n) if args.equispaced else build_for(data)
    kw = {"trace": args.trace}
    if args.eps1 is not None:
        kw["eps1"] = args.eps1
    if args.eps2 is not None:
        kw["eps2"] = args.eps2
    cfg = SolverConfig(**kw)
    log.info("n=%d spacing=%s eps1=%g eps2=%g", data.n, A.spacing_kind, cfg.eps1, cfg.eps2)
    t0 = time.perf_counter()
    res = solve(data.phi, A, cfg)
    elapsed = int(round((time.perf_counter() - t0) * 1e6))
    log.info("status=%s J=%s iterations=%d", res.status, res.J, res.iterations)
    config = cfg.to_dict()
    config["spacing_kind"] = A.spacing_kind
    record = RunRecord(
        x=data.x.tolist(),
        phi=data.phi.tolist(),
        config=config,
        status=str(res.status),
        y=res.y.tolist(),
        rho=res.rho.tolist(),
        J=list(res.J),
        s=res.s,
        iterations=res.iterations,
        diagnostics=res.diagnostics,
        version=__version__,
        timing_us=elapsed,
        trace=[t.to_dict() for t in res.trace] if res.trace is not None else None,
    )
    if args.oracle:
        y_o, cert = oracle_project(data.phi, A)
        record.certificate = cert.to_dict()
        record.oracle_max_abs_diff = float(np.max(np.abs(res.y - y_o)))
        log.info("oracle J_star=%s max|dy|=%g", cert.J_star, record.oracle_max_abs_diff)
    _write(record.to_json() if args.format == "json" else record.to_csv(), args.output)
    if args.plot_data:
        write_plot_data(args.plot_data, data, res)
    return EXIT_OK if res.status.clean else EXIT_UNCLEAN


def _weights_csv(est, oracle=None, disagreements=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["k", "count", "weight", "std_error"]
    if oracle is not None:
        head += ["oracle_count", "oracle_weight", "oracle_std_error"]
    w.writerow(head)
    for k in range(est.counts.size):
        row = [k, int(est.counts[k]), repr(float(est.weights[k])), repr(float(est.std_errors[k]))]
        if oracle is not None:
            row += [int(oracle.counts[k]), repr(float(oracle.weights[k])), repr(float(oracle.std_errors[k]))]
        w.writerow(row)
    if disagreements is not None:
        w.writerow([])
        w.writerow(["seed", "trial"])
        for d in disagreements:
            w.writerow([d["seed"], d["trial"]])
    return buf.getvalue()


def run_simulate(args):
    plan = SimulationPlan(args.n, args.trials, args.seed, args.engine, args.workers)
    head = {"spec": SCHEMA_VERSION, "version": __version__, "n": plan.n, "trials": plan.trials,
            "seed": plan.seed, "engine": plan.engine}
    if plan.engine == "both":
        cmp = compare_engines(plan)
        if args.format == "json":
            text = dumps_json({**head, **cmp.solver.to_dict(), "oracle": cmp.oracle.to_dict(),
                               "comparison": cmp.to_dict()})
        else:
            text = _weights_csv(cmp.solver, cmp.oracle, cmp.to_dict()["disagreements"])
        if cmp.disagreements:
            log.warning("%d solver/oracle disagreements", len(cmp.disagreements))
    else:
        est = simulate_weights(plan)
        text = dumps_json({**head, **est.to_dict()}) if args.format == "json" else _weights_csv(est)
    _write(text, args.output)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="coneproj", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pp = sub.add_parser("project", help="project one data set onto the convex cone")
    pp.add_argument("--input", required=True, help="CSV path, or - for stdin")
    pp.add_argument("--equispaced", action="store_true")
    pp.add_argument("--eps1", type=float)
    pp.add_argument("--eps2", type=float)
    pp.add_argument("--oracle", action="store_true", help="cross-check with the exhaustive oracle")
    pp.add_argument("--trace", action="store_true")
    pp.add_argument("--format", choices=("json", "csv"), default="json")
    pp.add_argument("--output", help="default: stdout")
    pp.add_argument("--plot-data", help="write x,phi,y,rho CSV here")
    pp.set_defaults(func=run_project)

    ps = sub.add_parser("simulate", help="estimate chi-bar-squared mixing weights")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--trials", type=int, default=10000)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--engine", choices=("solver", "oracle", "both"), default="solver")
    ps.add_argument("--workers", type=int, default=1)
    ps.add_argument("--format", choices=("json", "csv"), default="json")
    ps.add_argument("--output", help="default: stdout")
    ps.set_defaults(func=run_simulate)
    return p


def _configure_logging():
    level = os.environ.get("CONE_PROJ_LOG", "off").lower()
    levels = {"off": logging.CRITICAL + 1, "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("coneproj")
    root.handlers[:] = [handler]
    root.setLevel(levels.get(level, logging.WARNING))
    root.propagate = False


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConeProjError, OSError) as exc:
        print(f"coneproj: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
