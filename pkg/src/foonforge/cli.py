"""Command-line entry point.

Subcommands: ``generate``, ``validate``, ``evaluate``, ``convert``,
``retrieve``. Machine output goes to stdout or files, diagnostics to
stderr. Exit codes: 0 success, 1 usage or configuration error, 2 IO or
input-data error, 3 fixture miss under ``--strict-replay``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .client import FixtureMissError, LiveClient, ReplayClient
from .errors import (
    ClientError,
    FoonForgeError,
    FoonSyntaxError,
    ManifestError,
    PromptError,
    RetrievalError,
    TaskTreeError,
)
from .foon.model import FoonGraph, ObjectNode, TaskTree
from .foon.retrieval import RetrievalFailure, retrieve_task_tree
from .foon.text_format import parse_foon_text, serialize_foon_text
from .foon.tree_json import parse_task_tree_json, serialize_task_tree_json
from .foon.validation import ValidationReport, validate_graph, validate_task_tree
from .metrics import (
    compare_strategies,
    comparison_rows,
    format_csv_table,
    format_text_table,
    summarize_run,
)
from .pipeline import load_run_report, read_manifest, run_generation
from .prompts import Strategy, load_examples
from .resources import data_path

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_FIXTURE_MISS = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 on usage errors, per our code scheme."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _build_parser() -> _Parser:
    parser = _Parser(prog="foonforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate recipes for every dish in a manifest")
    gen.add_argument("--manifest", required=True, help="input manifest JSON")
    gen.add_argument(
        "--strategy",
        required=True,
        choices=[s.value for s in Strategy],
    )
    gen.add_argument("--out", required=True, help="output directory")
    backend = gen.add_mutually_exclusive_group(required=True)
    backend.add_argument("--fixture", help="replay fixture JSON (no network)")
    backend.add_argument("--live", action="store_true", help="call the configured endpoint")
    gen.add_argument(
        "--examples",
        help="directory of example task trees (example-based only; packaged default)",
    )
    gen.add_argument("--instructions", help="verbatim user instructions (user-guided only)")
    gen.add_argument("--template", help="prompt template file overriding the packaged one")
    gen.add_argument(
        "--lenient-json",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="strip one Markdown code fence before JSON parsing",
    )
    gen.add_argument(
        "--strict-replay",
        action="store_true",
        help="abort on a fixture miss instead of recording a fallback",
    )
    gen.add_argument("--max-in-flight", type=int, default=4)

    val = sub.add_parser("validate", help="validate a graph or task-tree file")
    val.add_argument("path")
    val.add_argument(
        "--format",
        choices=["auto", "foon", "json"],
        default="auto",
        help="input format; auto picks json for .json files",
    )
    val.add_argument(
        "--as-task-tree",
        action="store_true",
        help="also check acyclicity, goal, and connectivity (foon input needs --goal)",
    )
    val.add_argument("--goal", help="goal object name for --as-task-tree on foon input")

    ev = sub.add_parser("evaluate", help="summarize run reports or compare strategies")
    ev.add_argument("reports", nargs="+", help="run_report.json paths")
    ev.add_argument(
        "--compare",
        action="store_true",
        help="group reports by strategy and emit the comparison table",
    )
    ev.add_argument("--csv", help="also write the table as CSV to this path")

    conv = sub.add_parser("convert", help="convert between graph text and task-tree JSON")
    conv.add_argument("source")
    conv.add_argument("dest")
    conv.add_argument("--to", required=True, choices=["json", "foon"])
    conv.add_argument("--goal", help="goal object name (required for --to json)")

    ret = sub.add_parser("retrieve", help="retrieve a minimal task tree from a graph")
    ret.add_argument("--graph", required=True, help="graph file in text format")
    ret.add_argument("--goal", required=True, help="goal object name")
    ret.add_argument(
        "--available",
        default="",
        help="comma-separated names of raw items on hand",
    )
    ret.add_argument("--out", help="write the tree JSON here instead of stdout")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    handlers = {
        "generate": cmd_generate,
        "validate": cmd_validate,
        "evaluate": cmd_evaluate,
        "convert": cmd_convert,
        "retrieve": cmd_retrieve,
    }
    try:
        return handlers[args.command](args)
    except FixtureMissError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIXTURE_MISS
    except (PromptError, ClientError, RetrievalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ManifestError, TaskTreeError, FoonSyntaxError, FoonForgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def cmd_generate(args) -> int:
    manifest = read_manifest(args.manifest)

    if args.live:
        backend = LiveClient()
    else:
        if not Path(args.fixture).is_file():
            print(f"error: fixture not found: {args.fixture}", file=sys.stderr)
            return EXIT_IO
        backend = ReplayClient(args.fixture)

    strategy = Strategy(args.strategy)
    examples = ()
    instructions = args.instructions
    if strategy is Strategy.EXAMPLE_BASED:
        examples_dir = args.examples or data_path("examples")
        examples = load_examples(examples_dir)
        if not examples:
            raise PromptError(f"no usable example trees in {examples_dir}")
    elif strategy is Strategy.USER_GUIDED and not instructions:
        raise PromptError("user-guided generation requires --instructions")

    template = None
    if args.template:
        template = Path(args.template).read_text(encoding="utf-8")

    report = run_generation(
        manifest,
        strategy,
        backend,
        args.out,
        examples=examples,
        instructions=instructions,
        template=template,
        lenient_json=args.lenient_json,
        max_in_flight=args.max_in_flight,
        strict_replay=args.strict_replay,
    )
    print(format_text_table(summarize_run(report)))
    print(f"total={report.total} json_ok={report.json_ok} text_fallback={report.text_fallback}")
    return EXIT_OK


def _print_report(report: ValidationReport) -> None:
    if report.ok:
        print("valid")
        return
    print(f"invalid ({len(report.violations)} violation(s))")
    for v in report.violations:
        where = f" [unit {v.unit_index}]" if v.unit_index is not None else ""
        print(f"  {v.rule}: {v.message}{where}")


def _resolve_goal(graph: FoonGraph, name: str) -> ObjectNode:
    wanted = name.strip().lower()
    candidates = [node for node in graph.object_nodes() if node.name == wanted]
    if not candidates:
        raise RetrievalError(f"goal {name!r} names no object in the graph")
    stateless = [node for node in candidates if not node.states]
    if len(candidates) == 1 or stateless:
        return stateless[0] if stateless else candidates[0]
    variants = "; ".join(node.describe() for node in candidates)
    raise PromptError(f"goal {name!r} is ambiguous, variants: {variants}")


def cmd_validate(args) -> int:
    path = Path(args.path)
    text = path.read_text(encoding="utf-8")
    fmt = args.format
    if fmt == "auto":
        fmt = "json" if path.suffix.lower() == ".json" else "foon"

    if fmt == "json":
        tree = parse_task_tree_json(text, check_structure=False)
        _print_report(validate_task_tree(tree))
        return EXIT_OK

    graph = parse_foon_text(text)
    if args.as_task_tree:
        if not args.goal:
            raise PromptError("--as-task-tree on a foon file requires --goal")
        goal = _resolve_goal(graph, args.goal)
        _print_report(validate_graph(graph, as_task_tree=True, goal=goal))
    else:
        _print_report(validate_graph(graph))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    reports = [load_run_report(p) for p in args.reports]
    if args.compare:
        grouped: dict[Strategy, list] = {}
        for report in reports:
            grouped.setdefault(report.strategy, []).append(report)
        rows = comparison_rows(compare_strategies(grouped))
        print(format_text_table(rows))
    else:
        rows = []
        for path, report in zip(args.reports, reports):
            if len(reports) > 1:
                print(f"# {path}")
            rows = summarize_run(report)
            print(format_text_table(rows))
    if args.csv:
        Path(args.csv).write_text(format_csv_table(rows), encoding="utf-8")
    return EXIT_OK


def cmd_convert(args) -> int:
    source = Path(args.source).read_text(encoding="utf-8")
    if args.to == "json":
        if not args.goal:
            raise PromptError("--to json requires --goal")
        graph = parse_foon_text(source)
        goal = _resolve_goal(graph, args.goal)
        tree = TaskTree(graph, goal)
        report = validate_task_tree(tree)
        if not report.ok:
            print("cannot convert: graph is not a valid task tree", file=sys.stderr)
            for v in report.violations:
                print(f"  {v.rule}: {v.message}", file=sys.stderr)
            return EXIT_IO
        Path(args.dest).write_text(serialize_task_tree_json(tree) + "\n", encoding="utf-8")
    else:
        tree = parse_task_tree_json(source)
        Path(args.dest).write_text(serialize_foon_text(tree.graph), encoding="utf-8")
    print(f"wrote {args.dest}")
    return EXIT_OK


def cmd_retrieve(args) -> int:
    graph = parse_foon_text(Path(args.graph).read_text(encoding="utf-8"))
    goal = _resolve_goal(graph, args.goal)
    available = [part for part in args.available.split(",") if part.strip()]
    result = retrieve_task_tree(graph, goal, available)
    if isinstance(result, RetrievalFailure):
        print(json.dumps({"failure": result.message, "missing": result.missing}))
        return EXIT_OK
    rendered = serialize_task_tree_json(result) + "\n"
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(rendered, end="")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
