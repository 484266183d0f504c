"""Command-line front end: ``entropic-lp {solve,generate,reproduce,ba}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import reproduce as repro
from .ba import ReducedInstance, ba_solve, detect_reducible, reduced_constraint, tile
from .core import ProblemInstance
from .errors import EntropicLPError, InputError, NotReducible, NumericalError, ShapeMismatch
from .generators import RandomSpec, extended_instance, ghn_instance, random_instance
from .lagrange import BisectionConfig, SolveReport, full_solve

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
THREADS_ENV = "ENTROPIC_LP_THREADS"
OUTER_HEADER = ["k", "lambda", "value", "g", "residual", "elapsed_s"]
INNER_HEADER = ["k", "n", "F", "residual", "elapsed_s"]
CROSS_CHECK_TOL = 1e-8


def _dims(text: str) -> tuple[int, int, int]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected A,B,S integers, got {text!r}") from exc
    if len(dims) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated integers, got {text!r}")
    return dims


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_source(p: argparse.ArgumentParser):
    p.add_argument("--instance", type=Path, help="instance JSON with keys 'p' and 'cost'")
    p.add_argument("--generate", choices=["ghn", "extended", "random"], help="build the instance instead")
    p.add_argument("--d", type=int, default=2, help="size of the extended instance")
    p.add_argument("--dims", type=_dims, default=(2, 2, 2), help="A,B,S for random instances")
    p.add_argument("--seed", type=int, default=0)


def _add_solver(p: argparse.ArgumentParser):
    p.add_argument("--eps-b", type=float, default=1e-10)
    p.add_argument("--eps-f", type=float, default=1e-12)
    p.add_argument("--zero-band", type=float, default=1e-20)
    p.add_argument("--max-inner", type=int, default=100_000)
    p.add_argument("--max-outer", type=int, default=200)
    p.add_argument("--warm-start", choices=["on", "off"], default="on")
    p.add_argument("--trace", type=Path, help="outer CSV trace; inner rows go to <stem>.inner.csv")
    p.add_argument("--report", type=Path, help="write the JSON report here instead of stdout")
    p.add_argument("--stride", type=int, default=1, help="keep every n-th inner iteration in the trace")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--no-timing", action="store_true", help="zero all elapsed times for reproducible output")
    p.add_argument("--paper-txt", action="store_true",
                   help="also write two-column k/value, k/lambda and k/g text files next to the trace")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropic-lp",
                                     description="Linear costs under an entropic constraint.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance")
    _add_source(solve)
    _add_solver(solve)

    gen = sub.add_parser("generate", help="write an instance JSON")
    kind = gen.add_mutually_exclusive_group()
    kind.add_argument("--ghn", action="store_const", const="ghn", dest="kind")
    kind.add_argument("--extended", action="store_const", const="extended", dest="kind")
    kind.add_argument("--random", action="store_const", const="random", dest="kind")
    kind.add_argument("--generate", choices=["ghn", "extended", "random"], dest="kind")
    gen.add_argument("--d", type=int, default=2)
    gen.add_argument("--dims", type=_dims, default=(2, 2, 2))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--require-not-attainable", action="store_true")
    gen.add_argument("-o", "--out", type=Path, help="output path (default: stdout)")

    rep = sub.add_parser("reproduce", help="run a reproduction suite and print a pass/fail table")
    rep.add_argument("--suite", choices=[*repro.SUITES, "all"], default="all")
    rep.add_argument("--budget-seconds", type=float, default=600.0)
    rep.add_argument("--report", type=Path, help="also write the rows as JSON")

    ba = sub.add_parser("ba", help="solve a reducible instance with the Blahut-Arimoto loop")
    _add_source(ba)
    _add_solver(ba)
    ba.add_argument("--tile", action="store_true",
                    help="--instance holds a reduced instance {'p', 'cost'[s][b], 'num_a'}")
    ba.add_argument("--cross-check", action="store_true", help="also run the full solver and report the gap")
    return parser


def _bisection_config(args) -> BisectionConfig:
    return BisectionConfig(eps_b=args.eps_b, eps_f=args.eps_f, zero_band=args.zero_band,
                           max_inner=args.max_inner, max_outer=args.max_outer,
                           warm_start=args.warm_start == "on", stride=args.stride,
                           threads=args.threads, record_inner=args.trace is not None)


def _instance_from(args) -> ProblemInstance:
    if args.instance is not None and args.generate is not None:
        raise InputError("use either --instance or --generate, not both")
    if args.instance is not None:
        return _load_instance(args.instance)
    if args.generate is not None:
        return _generated(args.generate, args.d, args.dims, args.seed)
    raise InputError("an instance is required: pass --instance PATH or --generate KIND")


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_instance(path: Path) -> ProblemInstance:
    return ProblemInstance.from_dict(_load_json(path))


def _generated(kind: str, d: int, dims, seed: int, require_not_attainable: bool = False) -> ProblemInstance:
    if kind == "ghn":
        return ghn_instance()
    if kind == "extended":
        return extended_instance(d)
    return random_instance(RandomSpec(tuple(dims), seed=seed, require_not_attainable=require_not_attainable))


def _emit(payload: dict, path: Path | None):
    text = json.dumps(payload, indent=2)
    if path is None:
        print(text)
    else:
        path.write_text(text + "\n")


def _time(x: float, timing: bool) -> float:
    return x if timing else 0.0


def write_traces(report: SolveReport, path: Path, timing: bool = True, paper_txt: bool = False):
    """Outer rows to ``path`` and stacked inner rows to ``<stem>.inner.csv``."""
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(OUTER_HEADER)
        for r in report.traces:
            w.writerow([r.k, repr(r.lam), repr(r.value), repr(r.g_val), repr(r.residual),
                        repr(_time(r.elapsed_s, timing))])
    inner_sets = report.inner_traces or []
    if report.attain is not None and report.attain.outcome is not None:
        inner_sets = [report.attain.outcome.trace, *inner_sets]
        first_k = 0
    else:
        first_k = 1
    with path.with_suffix(".inner.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(INNER_HEADER)
        for k, records in enumerate(inner_sets, start=first_k):
            for rec in records:
                w.writerow([k, rec.n, repr(rec.objective_F), repr(rec.residual),
                            repr(_time(rec.elapsed_s, timing))])
    if paper_txt:
        for column, attr in (("value", "value"), ("lambda", "lam"), ("g", "g_val")):
            lines = [f"{r.k} {getattr(r, attr)!r}" for r in report.traces]
            path.with_name(f"{path.stem}_{column}.txt").write_text("\n".join(lines) + ("\n" if lines else ""))


def cmd_solve(args) -> int:
    inst = _instance_from(args)
    report = full_solve(inst, _bisection_config(args))
    if args.trace is not None:
        write_traces(report, args.trace, timing=not args.no_timing, paper_txt=args.paper_txt)
    _emit(report.to_dict(timing=not args.no_timing), args.report)
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.kind is None:
        raise InputError("choose one of --ghn, --extended, --random")
    inst = _generated(args.kind, args.d, args.dims, args.seed, args.require_not_attainable)
    _emit(inst.to_dict(), args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    names = list(repro.SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        if name == "random":
            rows += repro.random_suite(budget_seconds=args.budget_seconds)
        else:
            rows += repro.SUITES[name]()
    print(repro.format_table(rows))
    if args.report is not None:
        _emit({"checks": [r.__dict__ for r in rows]}, args.report)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAILED


def _reduced_from(args) -> ReducedInstance:
    if args.tile:
        if args.instance is None:
            raise InputError("--tile needs --instance pointing at a reduced instance")
        try:
            return ReducedInstance.from_dict(_load_json(args.instance))
        except (KeyError, TypeError) as exc:
            raise ShapeMismatch("reduced instance JSON needs keys 'p', 'cost' and 'num_a'") from exc
    inst = _instance_from(args)
    red = detect_reducible(inst)
    if red is None:
        raise NotReducible("costs depend on the action a; the Blahut-Arimoto reduction does not apply")
    return red


def cmd_ba(args) -> int:
    red = _reduced_from(args)
    cfg = _bisection_config(args)
    report = ba_solve(red, cfg)
    if args.trace is not None:
        write_traces(report, args.trace, timing=not args.no_timing, paper_txt=args.paper_txt)
    payload = report.to_dict(timing=not args.no_timing)
    payload["reduced_policy"] = np.asarray(report.reduced_policy).tolist()
    payload["reduced_constraint"] = reduced_constraint(red, report.reduced_policy)
    status = EXIT_OK
    if args.cross_check:
        full = full_solve(tile(red), cfg)
        gap = abs(report.value - full.value)
        payload["cross_check"] = {"full_value": full.value, "gap": gap, "tol": CROSS_CHECK_TOL}
        print(f"cross-check gap {gap:.3e} (tol {CROSS_CHECK_TOL:g})", file=sys.stderr)
        if gap > CROSS_CHECK_TOL:
            status = EXIT_FAILED
    _emit(payload, args.report)
    return status


COMMANDS = {"solve": cmd_solve, "generate": cmd_generate, "reproduce": cmd_reproduce, "ba": cmd_ba}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except EntropicLPError as exc:
        code = EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_INPUT
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}))
        return code


if __name__ == "__main__":
    sys.exit(main())
