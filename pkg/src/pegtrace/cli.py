"""Command-line front door.

Thin client over the service layer: each subcommand builds a request
model, calls the corresponding handler, and formats the response.

Exit codes: 0 = well-formed / parse success / engines agree,
1 = ill-formed grammar or parse failure, 2 = file or syntax errors,
3 = engine divergence (compare only).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import service
from .reader import GrammarError
from .refparser import IllFormedGrammarError


def _add_input_args(sub):
    sub.add_argument("--grammar", required=True, metavar="PATH")
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", metavar="PATH", help="input file, read as raw bytes")
    group.add_argument("--text", metavar="STR", help="inline input text")
    sub.add_argument("--bound", type=int, default=None, metavar="N",
                     help="parse only the first N bytes")


def _add_common(sub):
    sub.add_argument("--format", choices=["json", "summary"], default="summary")
    sub.add_argument("--out", metavar="PATH", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pegtrace",
                                     description="PEG analysis and parsing toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="analyze a grammar and check well-formedness")
    check.add_argument("--grammar", required=True, metavar="PATH")
    _add_common(check)

    parse_cmd = commands.add_parser("parse", help="parse input, printing the trace")
    _add_input_args(parse_cmd)
    parse_cmd.add_argument("--engine", choices=["reference", "packrat", "both"],
                           default="reference")
    _add_common(parse_cmd)

    compare = commands.add_parser("compare",
                                  help="run both engines and compare trees and call counts")
    _add_input_args(compare)
    _add_common(compare)

    demo = commands.add_parser("demo-arith",
                               help="evaluate an arithmetic expression with the semantic parser")
    demo.add_argument("--text", required=True, metavar="STR")
    _add_common(demo)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _emit(args, doc: dict, summary: str):
    text = json.dumps(doc, indent=2) if args.format == "json" else summary
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _read_input(args) -> dict:
    if args.text is not None:
        return {"input_text": args.text}
    return {"input_bytes": list(Path(args.input).read_bytes())}


def _property_table(props) -> str:
    lines = [f"{'rule':<16} {'can_fail':<9} {'can_empty':<10} can_consume"]
    for row in props:
        lines.append(f"{row.name:<16} {str(row.can_fail).lower():<9} "
                     f"{str(row.can_empty).lower():<10} {str(row.can_consume).lower()}")
    return "\n".join(lines)


def cmd_check(args) -> int:
    resp = service.check_grammar(
        service.CheckRequest(grammar=Path(args.grammar).read_text()))
    summary = _property_table(resp.properties)
    summary += f"\nverdict: {'well-formed' if resp.verdict else 'ill-formed'}"
    for v in resp.violations:
        summary += f"\n  {v.rule}: {v.reason} at {'/'.join(v.path) or '(root)'}"
    _emit(args, resp.model_dump(), summary)
    return 0 if resp.verdict else 1


def cmd_parse(args) -> int:
    req = service.ParseRequest(
        grammar=Path(args.grammar).read_text(),
        bound=args.bound, engine=args.engine,
        include_tree=args.format == "json",
        **_read_input(args))
    resp = service.parse_input(req)
    summary = f"{resp.outcome}, consumed [0, {resp.consumed})"
    if resp.engines_agree is not None:
        summary += f", engines agree: {str(resp.engines_agree).lower()}"
    _emit(args, resp.model_dump(), summary)
    return 0 if resp.outcome == "success" else 1


def cmd_compare(args) -> int:
    req = service.CompareRequest(
        grammar=Path(args.grammar).read_text(),
        bound=args.bound, **_read_input(args))
    resp = service.compare_engines(req)
    lines = [f"trees equal: {str(resp.equal).lower()}",
             f"reference calls: {resp.reference.total}",
             f"packrat misses: {resp.packrat.misses}, hits: {resp.packrat.hits}"]
    for row in resp.reference.counts:
        lines.append(f"  {row['rule']} @ {row['position']}: {row['calls']}")
    if not resp.equal:
        lines.append(f"first divergence at {'/'.join(resp.first_divergence)}")
    _emit(args, resp.model_dump(), "\n".join(lines))
    return 0 if resp.equal else 3


def cmd_demo_arith(args) -> int:
    resp = service.demo_arith(service.DemoRequest(text=args.text))
    if resp.outcome == "success":
        summary = f"value: {resp.value}"
    else:
        summary = f"failure, trace extent [0, {resp.consumed})"
    _emit(args, resp.model_dump(), summary)
    return 0 if resp.outcome == "success" else 1


def cmd_serve(args) -> int:
    import uvicorn
    uvicorn.run(service.app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "check": cmd_check,
        "parse": cmd_parse,
        "compare": cmd_compare,
        "demo-arith": cmd_demo_arith,
        "serve": cmd_serve,
    }[args.command]
    try:
        return handler(args)
    except (GrammarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IllFormedGrammarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
