"""
CLI orchestrator for the composer.

Commands:
    solve    → compose one instance (re-validated before reporting)
    validate → check a composition file against an instance
    generate → seeded instance / scenario + ground-truth manifest
    bench    → solve a directory of instances into a report table
    online   → replay a JSON-lines event stream through the failover engine

Exit codes: 0 success, 1 unsolvable or invalid, 2 unreadable input.
"""
import argparse
import json
import logging
import os
import sys

# Add project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(__file__)))

from app.core.composition import Composition
from app.core.errors import CompositionError, InstanceError
from app.core.loader import build_name_problem
from app.core.schema import MODELS, load_composition, load_instance
from app.engine_online.failover import FailoverManager
from app.engine_online.state import OnlineState
from app.engine_online.stream import read_stream, replay_stream, write_events
from app.flowchart.exporter import export_mermaid
from app.flowchart.flow_builder import build_dependency_graph
from app.genbench import GENERATORS, GenConfig, bench_directory, dump_json, format_reports, generate, load_config, write_reports
from app.genbench.bench import RunReport
from app.pipeline import SolveOptions, check_composition, solve_instance
from app.settings import get_settings
from app.taxonomy.loader import build_hierarchical_problem

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _emit(data, out_file=None) -> None:
    text = json.dumps(data, indent=2)
    if out_file:
        with open(out_file, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def _check_model(instance, expected) -> None:
    if expected and instance.model != expected:
        raise InstanceError(f"Instance is tagged {instance.model!r}, not {expected!r}")


def _options(args) -> SolveOptions:
    settings = get_settings()
    return SolveOptions(
        use_scores=not getattr(args, "no_scores", False),
        reduce=not getattr(args, "no_reduce", False),
        oo_reduce=getattr(args, "reduce", False),
        ignore_rules=getattr(args, "ignore_rules", False),
        object_cap=getattr(args, "object_cap", None) or settings.object_cap,
        both_orientations=getattr(args, "both_orientations", False) or settings.both_orientations,
        max_rounds=settings.reduction_rounds,
    )


# ============================================================
# Command Implementations
# ============================================================

def run_diagram(instance, composition, out_file: str) -> None:
    if instance.model == "name":
        repo, req = build_name_problem(instance)
        tax = None
    elif instance.model == "hierarchical":
        repo, tax, req = build_hierarchical_problem(instance)
    else:
        print(f"Diagrams are drawn for name and hierarchical compositions, not {instance.model}", file=sys.stderr)
        return
    comp = Composition.layered(composition.get("layers", []))
    export_mermaid(build_dependency_graph(repo, req, comp, tax), out_file)
    print(f"Diagram written to {out_file}", file=sys.stderr)


def run_solve(args) -> int:
    instance = load_instance(args.instance)
    _check_model(instance, args.model)
    outcome = solve_instance(instance, _options(args))
    report = RunReport(
        instance=args.instance,
        model=outcome.model,
        solved=outcome.solved,
        valid=outcome.valid,
        length=outcome.length if outcome.solved else None,
        execution_path=outcome.execution_path,
        solve_ms=round(outcome.solve_ms, 3),
    )
    if args.report:
        _emit({**report.to_row(), **outcome.extra}, args.report)

    if not outcome.solved:
        print(f"No composition found ({outcome.solve_ms:.1f} ms)", file=sys.stderr)
        _emit({"calls": [], "solved": False, "report": report.to_row()}, args.out)
        return EXIT_FAIL

    _emit(outcome.composition, args.out)
    print(
        f"{outcome.model}: {outcome.length} services"
        + (f", execution path {outcome.execution_path}" if outcome.execution_path is not None else "")
        + f", {outcome.solve_ms:.1f} ms, {'valid' if outcome.valid else 'INVALID'}",
        file=sys.stderr,
    )
    if args.diagram:
        run_diagram(instance, outcome.composition, args.diagram)
    return EXIT_OK if outcome.valid else EXIT_FAIL


def run_validate(args) -> int:
    instance = load_instance(args.instance)
    _check_model(instance, args.model)
    spec = load_composition(args.composition)
    report = check_composition(instance, spec, _options(args))
    _emit(report, args.out)
    return EXIT_OK if report["valid"] else EXIT_FAIL


def run_generate(args) -> int:
    cfg = load_config(args.config, args.seed) if args.config else GenConfig(seed=args.seed or 0)
    produced, truth = generate(args.model, cfg)
    os.makedirs(args.out, exist_ok=True)
    if args.model == "online":
        with open(os.path.join(args.out, "events.jsonl"), "w", encoding="utf-8") as f:
            for op in produced:
                f.write(json.dumps(op) + "\n")
    else:
        dump_json(produced, os.path.join(args.out, "instance.json"))
    dump_json(truth.to_json(), os.path.join(args.out, "groundtruth.json"))
    print(f"Generated {args.model} instance (seed {cfg.seed}) in {args.out}", file=sys.stderr)
    return EXIT_OK


def run_bench(args) -> int:
    workers = args.workers or get_settings().bench_workers
    reports = bench_directory(args.dir, _options(args), workers)
    if args.out:
        write_reports(reports, args.out, args.format)
    else:
        print(format_reports(reports, args.format), end="")
    failed = sum(1 for r in reports if r.error)
    print(f"Bench: {len(reports)} instances, {failed} errors", file=sys.stderr)
    return EXIT_OK


def run_online(args) -> int:
    settings = get_settings()
    ops = read_stream(args.stream)
    state = OnlineState(reoptimize=args.reoptimize or settings.reoptimize)
    manager = FailoverManager(state, async_backups=args.async_backups or settings.async_backups)
    try:
        events = replay_stream(ops, manager)
    finally:
        manager.close()
    if args.out:
        write_events(events, args.out)
    else:
        for ev in events:
            print(json.dumps(ev.to_json()))
    print(
        f"Online: {len(ops)} operations, {len(events)} events, "
        f"{state.stats.main_searches} main / {state.stats.backup_searches} backup searches",
        file=sys.stderr,
    )
    return EXIT_OK


COMMANDS = {
    "solve": run_solve,
    "validate": run_validate,
    "generate": run_generate,
    "bench": run_bench,
    "online": run_online,
}


# ============================================================
# CLI Entry Point
# ============================================================

def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-scores", action="store_true", help="Disable score-guided search")
    p.add_argument("--no-reduce", action="store_true", help="Skip name/hierarchical reduction")
    p.add_argument("--reduce", action="store_true", help="Run the object-oriented reduction sweep")
    p.add_argument("--ignore-rules", action="store_true", help="Relational: ignore user inference rules")
    p.add_argument("--object-cap", type=int, default=None, help="Relational fresh-output rounds per input types")
    p.add_argument("--both-orientations", action="store_true", help="Relational: match every relation both ways")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="composer", description="Automatic web service composition")
    parser.add_argument("--verbose", action="store_true", help="Log engine progress to stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    solve = subparsers.add_parser("solve", help="Compose one instance")
    solve.add_argument("--instance", required=True, help="Instance JSON file")
    solve.add_argument("--model", choices=MODELS, help="Expected model tag")
    solve.add_argument("--out", help="Composition output file (default: stdout)")
    solve.add_argument("--report", help="Write the run report JSON here")
    solve.add_argument("--diagram", help="Write a Mermaid diagram of the composition here")
    _add_engine_flags(solve)

    validate = subparsers.add_parser("validate", help="Validate a composition")
    validate.add_argument("--instance", required=True)
    validate.add_argument("--composition", required=True)
    validate.add_argument("--model", choices=MODELS)
    validate.add_argument("--out", help="Report output file (default: stdout)")
    validate.add_argument("--both-orientations", action="store_true")

    gen = subparsers.add_parser("generate", help="Generate a seeded instance")
    gen.add_argument("--model", required=True, choices=sorted(GENERATORS))
    gen.add_argument("--config", help="Generator config JSON")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True, help="Output directory")

    bench = subparsers.add_parser("bench", help="Solve every instance under a directory")
    bench.add_argument("--dir", required=True)
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--format", choices=("json", "csv"), default="json")
    bench.add_argument("--out", help="Report table file (default: stdout)")
    _add_engine_flags(bench)

    online = subparsers.add_parser("online", help="Replay an online event stream")
    online.add_argument("--stream", required=True, help="JSON-lines operations")
    online.add_argument("--out", help="JSON-lines events output (default: stdout)")
    online.add_argument("--async", dest="async_backups", action="store_true",
                        help="Compute backups on a worker thread")
    online.add_argument("--reoptimize", action="store_true",
                        help="Adopt shorter compositions when services register")
    return parser


def main(argv=None) -> int:
    """CLI entry point. Parses arguments and maps failures to exit codes."""
    args = build_parser().parse_args(argv)
    try:
        level = "INFO" if args.verbose else get_settings().log_level.upper()
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except (CompositionError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
