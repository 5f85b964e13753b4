"""Command-line front door.

Exit codes: 0 success, 2 input or usage error, 3 concept cap exceeded.
Diagnostics go to stderr; data goes to stdout unless -o is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import ingest, metrics, transform
from .context import FormalContext
from .errors import ResourceLimitExceededError, SchemaLatticeError
from .lattice import DEFAULT_CONCEPT_CAP, build_lattice, export_lattice

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def read_context_file(path: str) -> FormalContext:
    """Load a context from .cxt, .csv, or .json, sniffing unknown suffixes."""
    text = Path(path).read_text()
    suffix = Path(path).suffix.lower()
    if suffix == ".cxt":
        return ingest.parse_cxt(text)
    if suffix == ".csv":
        return ingest.parse_csv_crosstable(text)
    if suffix == ".json":
        return ingest.load_context_json(text)
    if text.startswith("B\n"):
        return ingest.parse_cxt(text)
    if text.lstrip().startswith("{"):
        return ingest.load_context_json(text)
    return ingest.parse_csv_crosstable(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_ingest(args: argparse.Namespace) -> int:
    sources = 0
    catalog = ingest.Catalog()
    for path in args.es or ():
        record = ingest.parse_es_mapping(
            Path(path).read_text(), index_name=Path(path).stem, strict=args.strict
        )
        catalog.add(record)
        sources += 1
    for path in args.influx or ():
        for record in ingest.parse_influx_schema(Path(path).read_text()).records:
            catalog.add(record)
        sources += 1
    cxt_inputs = list(args.cxt or ())
    csv_inputs = list(args.csv or ())
    if sources == 0 and not csv_inputs and len(cxt_inputs) == 1:
        # single CXT passthrough keeps the original column order
        _emit(ingest.write_cxt(ingest.parse_cxt(Path(cxt_inputs[0]).read_text())), args.output)
        return EXIT_OK
    for path in csv_inputs:
        ctx = ingest.parse_csv_crosstable(Path(path).read_text())
        for record in ingest.context_to_catalog(ctx).records:
            catalog.add(record)
        sources += 1
    for path in cxt_inputs:
        ctx = ingest.parse_cxt(Path(path).read_text())
        for record in ingest.context_to_catalog(ctx).records:
            catalog.add(record)
        sources += 1
    if sources == 0:
        print("ingest: no input files given", file=sys.stderr)
        return EXIT_INPUT
    _emit(ingest.write_cxt(ingest.catalog_to_context(catalog)), args.output)
    return EXIT_OK


def cmd_lattice(args: argparse.Namespace) -> int:
    ctx = read_context_file(args.context)
    lat = build_lattice(ctx, max_concepts=args.max_concepts)
    text = export_lattice(
        ctx, lat, fmt=args.format, full_labels=(args.labels == "full")
    )
    _emit(text, args.output)
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    ctx = read_context_file(args.context)
    script = transform.parse_script(Path(args.script).read_text())
    on_error = "skip" if args.skip_on_error else "abort"
    result, report = transform.apply_script(
        ctx,
        script,
        on_error=on_error,
        prune=not args.no_prune,
        max_concepts=args.max_concepts,
    )
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.as_dict(), ensure_ascii=False, indent=2) + "\n"
        )
    _emit(ingest.write_cxt(result), args.output)
    rejected = [o for o in report.outcomes if o.status == "rejected"]
    if rejected:
        for outcome in rejected:
            print(f"transform: rejected: {outcome.reason}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_coverage(args: argparse.Namespace) -> int:
    ctx = read_context_file(args.context)
    report = metrics.coverage_curve(ctx)
    if args.json:
        _emit(json.dumps(report.as_dict(), ensure_ascii=False, indent=2) + "\n", args.output)
    else:
        _emit(metrics.coverage_to_csv(report), args.output)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    ctx = read_context_file(args.context)
    stats = metrics.context_stats(ctx, max_concepts=args.max_concepts)
    if args.json:
        _emit(json.dumps(stats.as_dict(), ensure_ascii=False, indent=2) + "\n", args.output)
    else:
        _emit(
            "objects: {0.object_count}\nattributes: {0.attribute_count}\n"
            "concepts: {0.concept_count}\nheight: {0.lattice_height}\n".format(stats),
            args.output,
        )
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import SessionStore, create_app

    ctx = read_context_file(args.context)
    store = SessionStore(journal_dir=args.journal_dir)
    session = store.create(ctx, session_id="default")
    if args.script:
        script = transform.parse_script(Path(args.script).read_text())
        for op in script.ops:
            store.apply(session.id, op, expected_version=session.version)
    port = int(os.environ.get("PORT", args.port))
    if not 0 < port < 65536:
        print(f"serve: invalid port {port}", file=sys.stderr)
        return EXIT_INPUT
    app = create_app(store, static_dir=args.ui)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schemalattice",
        description="Model structure schemas as a formal context, compute the "
        "concept lattice, and drive field-name unification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="combine schema sources into a CXT context")
    p.add_argument("--es", action="append", metavar="PATH",
                   help="Elasticsearch mapping JSON (index name = file stem)")
    p.add_argument("--influx", action="append", metavar="PATH",
                   help="InfluxDB measurement schema JSON")
    p.add_argument("--csv", action="append", metavar="PATH", help="CSV cross table")
    p.add_argument("--cxt", action="append", metavar="PATH", help="Burmeister CXT file")
    p.add_argument("--strict", action="store_true",
                   help="reject mappings that declare no fields")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("lattice", help="compute and export the concept lattice")
    p.add_argument("context")
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.add_argument("--labels", choices=("reduced", "full"), default="reduced")
    p.add_argument("--max-concepts", type=int, default=DEFAULT_CONCEPT_CAP)
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("transform", help="apply a unification script")
    p.add_argument("context")
    p.add_argument("--script", required=True, metavar="PATH")
    p.add_argument("--report", metavar="PATH", help="write the op report JSON here")
    p.add_argument("--skip-on-error", action="store_true",
                   help="skip rejected ops instead of aborting")
    p.add_argument("--no-prune", action="store_true",
                   help="keep attributes whose extent becomes empty")
    p.add_argument("--max-concepts", type=int, default=DEFAULT_CONCEPT_CAP)
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("coverage", help="frequency-ranked coverage curve")
    p.add_argument("context")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true", default=True)
    fmt.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("stats", help="context and lattice statistics")
    p.add_argument("context")
    p.add_argument("--json", action="store_true")
    p.add_argument("--max-concepts", type=int, default=DEFAULT_CONCEPT_CAP)
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="serve the session API for the explorer UI")
    p.add_argument("context")
    p.add_argument("--port", type=int, default=8077,
                   help="listen port (the PORT env var overrides this)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--script", metavar="PATH", help="preload this script as history")
    p.add_argument("--journal-dir", metavar="DIR",
                   help="append-only per-session journals for crash recovery")
    p.add_argument("--ui", metavar="DIR",
                   help="serve this static directory at / (the built explorer UI)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitExceededError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SchemaLatticeError, OSError) as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
