"""``fm`` command line: validate, fmt, render, verb, eventize, simulate.

Exit codes: 0 success, 1 diagnostics or model errors, 2 usage errors,
3 I/O errors. Results go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dsl
from .core import FMError, StageKind, canonicalize, ref, validate
from .eventfile import dump_events, load_events
from .events import ONGOING, Region, TimeMachine, build_chronology, eventize, simulate
from .lexicon import Lexicon, instantiate
from .render import RenderOptions, render_chronology, render_events, render_schema
from .tense import Tense, apply_tense
from .vendler import classify_vendler

EXIT_OK, EXIT_DIAG, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InvalidSchema(Exception):
    pass


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_schema(path: str, *, check: bool = True):
    data = _read(path)
    schema = dsl.from_json(data) if path.endswith(".json") else dsl.parse(data)
    if check:
        diags = validate(schema)
        if diags:
            for d in diags:
                print(d, file=sys.stderr)
            raise InvalidSchema
    return schema


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _split(values: str | None) -> list[str]:
    return [v for v in (values or "").replace(",", " ").split() if v]


def cmd_validate(args) -> int:
    schema = _load_schema(args.path, check=False)
    diags = validate(schema)
    for d in diags:
        print(d, file=sys.stderr)
    return EXIT_DIAG if diags else EXIT_OK


def cmd_fmt(args) -> int:
    schema = canonicalize(_load_schema(args.path))
    _write(dsl.to_json(schema) if args.json else dsl.print_schema(schema), args.output)
    return EXIT_OK


def _default_event_file(path: str) -> Path:
    p = Path(path)
    name = p.name
    for suffix in (".fm.json", ".fm"):
        if name.endswith(suffix):
            return p.with_name(name[: -len(suffix)] + ".events")
    return p.with_name(name + ".events")


def cmd_render(args) -> int:
    if args.chronology and args.events:
        raise UsageError("--chronology and --events are exclusive")
    schema = _load_schema(args.path)
    opts = RenderOptions(args.show_ids, tuple(_split(args.events)), args.rankdir)
    if args.events or args.chronology:
        event_file = Path(args.event_file) if args.event_file else _default_event_file(args.path)
        if not event_file.exists():
            raise UsageError(f"no event file (looked for {event_file}); pass --event-file")
        graph = load_events(event_file.read_bytes(), schema)
        if args.chronology:
            text = render_chronology(graph, opts)
        else:
            text = render_events(schema, graph.events, opts)
    else:
        text = render_schema(schema, opts)
    _write(text, args.output)
    return EXIT_OK


def _binding(pairs: list[str]) -> dict[str, str]:
    binding = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"--roles expects key=value, got {pair!r}")
        binding[key] = value
    return binding


def cmd_verb(args) -> int:
    lexicon = Lexicon.load(args.lexicon)
    entry = lexicon.lookup(args.verb)
    if entry.verb_class is None:
        raise FMError("E_NO_TEMPLATE", f"{entry.verb!r} has no verb-class template")
    binding = _binding(args.roles) if args.roles else entry.example_binding
    schema = instantiate(entry.verb_class, binding, args.variant, lexicon)
    graph = None
    if args.tense:
        graph = apply_tense(schema, None, args.tense)
        sys.stdout.write(dsl.print_schema(graph.schema))
        sys.stdout.write(dump_events(graph))
    else:
        sys.stdout.write(dsl.print_schema(schema))
    if args.classify:
        if graph is not None:
            category = classify_vendler(graph)
        else:
            category = entry.vendler_default
        print(category.value if category else "E_UNCLASSIFIED")
    return EXIT_OK


def _repetition(text: str | None):
    if text is None:
        return None
    if text in ("ongoing", ONGOING):
        return ONGOING
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"--repeat expects a count or 'ongoing', got {text!r}") from None


def cmd_eventize(args) -> int:
    schema = _load_schema(args.path)
    if args.flows or args.stages:
        stages = [ref(s) for s in _split(args.stages)]
        region = Region.closed(schema, _split(args.flows), stages)
    else:
        region = Region.whole(schema)
    traversed = [StageKind.parse(s) for s in _split(args.traversed)]
    present = [StageKind.parse(s) for s in _split(args.time)] if args.time else traversed or [StageKind.PROCESS]
    try:
        time = TimeMachine(tuple(present), tuple(traversed))
    except ValueError as exc:
        raise FMError("E_TIME", str(exc)) from None
    event = eventize(schema, region, time, _repetition(args.repeat), event_id=args.id, label=args.label or "")
    sys.stdout.write(dump_events(build_chronology([event], schema=schema)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    schema = _load_schema(args.schema)
    graph = load_events(_read(args.events), schema)
    trace = simulate(graph, schema, args.rep_bound)
    sys.stdout.write(trace.dumps())
    return EXIT_OK


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fm", description="Flowthing machine models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a schema, print diagnostics")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fmt", help="print a schema in canonical form")
    p.add_argument("path")
    p.add_argument("--json", action="store_true", help="emit the JSON interchange form")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("render", help="emit DOT")
    p.add_argument("path")
    p.add_argument("--events", help="comma-separated event ids to overlay")
    p.add_argument("--event-file", help="events file (default: sibling .events)")
    p.add_argument("--chronology", action="store_true", help="render the chronology graph")
    p.add_argument("--show-ids", action="store_true")
    p.add_argument("--rankdir", choices=("LR", "TB"), default="LR")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verb", help="compile a verb into an FM schema")
    p.add_argument("verb")
    p.add_argument("--roles", nargs="+", metavar="ROLE=LABEL")
    p.add_argument("--variant", default="default")
    p.add_argument("--tense", choices=[t.value for t in Tense])
    p.add_argument("--classify", action="store_true")
    p.add_argument("--lexicon", help="lexicon TSV (overrides $FM_LEXICON)")
    p.set_defaults(func=cmd_verb)

    p = sub.add_parser("eventize", help="carve an event out of a schema")
    p.add_argument("path")
    p.add_argument("--id", default="1")
    p.add_argument("--label")
    p.add_argument("--flows", help="region flow ids (endpoints are included)")
    p.add_argument("--stages", help="extra region stages as machine.Stage")
    p.add_argument("--time", help="time machine stages")
    p.add_argument("--traversed", help="time stages already passed")
    p.add_argument("--repeat", help="count or 'ongoing'")
    p.set_defaults(func=cmd_eventize)

    p = sub.add_parser("simulate", help="run an event chronology")
    p.add_argument("schema")
    p.add_argument("events")
    p.add_argument("--rep-bound", type=_positive, default=3)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidSchema:
        return EXIT_DIAG
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except dsl.DSLSyntaxError as exc:
        for err in exc.errors:
            print(f"E_PARSE\t{err.span.line}:{err.span.column}\t{err}", file=sys.stderr)
        return EXIT_DIAG
    except FMError as exc:
        print(f"{exc.code}\t-\t{exc.message}", file=sys.stderr)
        return EXIT_IO if exc.code == "E_IO" else EXIT_DIAG
    except OSError as exc:
        print(f"E_IO\t-\t{exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
