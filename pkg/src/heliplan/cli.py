"""Command-line interface.

Subcommands: validate, check, evaluate, export, construct, solve, bench,
render, gen, serve. With a fixed seed and an iteration budget every command
writes byte-identical output across runs.
"""

from __future__ import annotations

import argparse
import sys

from . import engine
from .bench import (
    CATALOG,
    attach_external_results,
    format_report,
    instance_from_catalog,
    run_comparison,
)
from .construct import initial_solution
from .feasibility import check_schedule
from .improve import IlsParams, SaParams, iterated_local_search, simulated_annealing
from .instance_io import dumps_canonical, load_instance, load_schedule, schedule_to_dict
from .milp import build_milp, emit_lp
from .model import StructuralError, validate_instance
from .objective import evaluate
from .render import format_work_windows, render_gantt_svg, render_schedule


def _write(path: str | None, payload: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(payload)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload)


def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    diagnostics = validate_instance(inst)
    for d in diagnostics:
        print(d)
    errors = [d for d in diagnostics if d.severity == "error"]
    if not diagnostics:
        print("instance is valid")
    return 1 if errors else 0


def cmd_check(args) -> int:
    inst = load_instance(args.instance)
    schedule = load_schedule(inst, args.schedule)
    try:
        report = check_schedule(inst, schedule)
    except StructuralError as exc:
        print(f"structural error: {exc}", file=sys.stderr)
        return 2
    _write(args.out, report.to_jsonl())
    if report.feasible:
        print("feasible", file=sys.stderr)
        return 0
    print(f"{len(report)} violations", file=sys.stderr)
    return 1


def cmd_evaluate(args) -> int:
    inst = load_instance(args.instance)
    schedule = load_schedule(inst, args.schedule)
    value = evaluate(inst, schedule)
    _write(args.out, "\n".join(value.decomposition_lines()) + "\n")
    return 0


def cmd_export(args) -> int:
    inst = load_instance(args.instance)
    model = build_milp(inst)
    _write(args.out, emit_lp(model))
    print(
        f"exported {model.n_rows} rows over {model.n_variables} variables",
        file=sys.stderr,
    )
    return 0


def cmd_construct(args) -> int:
    inst = load_instance(args.instance)
    schedule = initial_solution(inst, seed=args.seed)
    _write(args.out, dumps_canonical(schedule_to_dict(inst, schedule)))
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    checkpoints = tuple(float(v) for v in args.checkpoints.split(",")) if args.checkpoints else ()
    common = dict(
        seed=args.seed,
        max_iterations=args.iterations,
        wall_clock_budget=args.budget_seconds,
        checkpoints=checkpoints,
    )
    if args.algo == "sa":
        best, trace = simulated_annealing(inst, SaParams(**common))
    else:
        best, trace = iterated_local_search(inst, IlsParams(**common))
    _write(args.out, dumps_canonical(schedule_to_dict(inst, best.schedule)))
    if args.trace:
        _write(args.trace, dumps_canonical(trace.to_dict()))
    value = evaluate(inst, best.schedule)
    print("\n".join(value.decomposition_lines()), file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    if args.sets:
        names = [s.strip() for s in args.sets.split(",")]
    else:
        names = [n for n in CATALOG if n.startswith(args.family)]
    checkpoints = tuple(float(v) for v in args.checkpoints.split(",")) if args.checkpoints else ()
    report = run_comparison(
        names,
        algos=tuple(args.algos.split(",")),
        repetitions=args.reps,
        checkpoints=checkpoints,
        iterations=args.iterations,
        budget_seconds=args.budget_seconds,
        base_seed=args.seed,
        max_workers=args.workers,
    )
    if args.external_csv:
        report = attach_external_results(report, args.external_csv)
    _write(args.out, dumps_canonical(report))
    print(format_report(report), file=sys.stderr)
    return 0


def cmd_render(args) -> int:
    inst = load_instance(args.instance)
    schedule = load_schedule(inst, args.schedule)
    _write(args.out, render_schedule(inst, schedule) + "\n" + format_work_windows(inst, schedule))
    if args.svg:
        _write(args.svg, render_gantt_svg(inst, schedule))
    return 0


def cmd_gen(args) -> int:
    if args.set not in CATALOG:
        print(f"unknown instance set {args.set!r}; options: {', '.join(CATALOG)}",
              file=sys.stderr)
        return 2
    inst = instance_from_catalog(args.set, seed=args.seed)
    from .instance_io import instance_to_dict

    _write(args.out, dumps_canonical(instance_to_dict(inst)))
    return 0


def cmd_serve(args) -> int:  # pragma: no cover - networking wrapper
    from .service import ServiceConfig, create_app
    import uvicorn

    config = ServiceConfig.load(args.config)
    if args.data_dir:
        config.data_dir = args.data_dir
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.ui_dir:
        config.ui_dir = args.ui_dir
    uvicorn.run(create_app(config), host=config.host, port=config.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heliplan",
        description="Firefighting helicopter scheduling engine"
        f" (kernel backend: {engine.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", help="report rule violations of a schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", default=None, help="JSON-lines output (default stdout)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("evaluate", help="score a schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export", help="write the exact model as LP text")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("construct", help="greedy initial schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("solve", help="improve with SA or ILS")
    p.add_argument("--algo", choices=("sa", "ils"), required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--checkpoints", default="", help="comma-separated marks")
    p.add_argument("--out", default=None)
    p.add_argument("--trace", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="comparison harness over instance families")
    p.add_argument("--family", default="S", help="S, M or B (used when --sets absent)")
    p.add_argument("--sets", default=None, help="explicit comma-separated set names")
    p.add_argument("--algos", default="sa,ils")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--checkpoints", default="")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--external-csv", default=None,
                   help="merge externally obtained solver results (instance,method,best_value)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="text Gantt, work windows, optional SVG")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gen", help="generate a stock instance")
    p.add_argument("--set", required=True, help="catalog name, e.g. S1 or M5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("serve", help="run the HTTP planning service")
    p.add_argument("--config", default=None)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--ui-dir", default=None, help="serve a built frontend at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
