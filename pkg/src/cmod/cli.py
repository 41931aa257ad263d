"""Command-line front end: run programs, the interactive REPL, and the
formatter.

Exit codes: 0 success, 1 no matching clause, 2 lex/parse error, 3 other
runtime faults (unbound variable, region fault, depth exceeded, type
mismatch, division by zero). Program output goes to stdout; diagnostics
and the derivation trace go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import ast
from .engine import (
    Failure,
    call_with_deep_stack,
    execute,
    run_source,
)
from .errors import NO_MATCHING_CLAUSE, CmodError, LexError, ParseError
from .machine import DEFAULT_MAX_DEPTH, Machine
from .parser import parse_repl_input, parse_source
from .printer import format_declaration, pretty_print

EXIT_OK = 0
EXIT_NO_CLAUSE = 1
EXIT_SYNTAX = 2
EXIT_RUNTIME = 3


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _diagnostic(failure: Failure) -> str:
    line = f"{failure.reason.replace('-', ' ')}: {failure.detail}"
    chain = failure.render_chain()
    if chain:
        line += f" (call chain: {chain})"
    return line


def _stderr_trace(event) -> None:
    print(event.format(), file=sys.stderr)


def _dump_state(machine: Machine) -> None:
    print("-- store --")
    for name in sorted(machine.store):
        print(f"{name} = {ast.render_value(machine.store[name])}")
    print("-- regions --")
    print("id gen type length live")
    for region in machine.regions.regions:
        print(
            f"{region.id} {region.generation} {region.elem_type}"
            f" {len(region.cells)} {'true' if region.live else 'false'}"
        )


def _cmd_run(args) -> int:
    try:
        source = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cmod: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_SYNTAX

    trace = _stderr_trace if args.trace else None
    try:
        outcome, machine = call_with_deep_stack(
            run_source, source, max_depth=args.max_depth, trace=trace
        )
    except (LexError, ParseError) as exc:
        print(f"cmod: syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX

    sys.stdout.write(machine.output_text())
    if args.dump_state:
        _dump_state(machine)
    if isinstance(outcome, Failure):
        print(f"cmod: {_diagnostic(outcome)}", file=sys.stderr)
        return EXIT_NO_CLAUSE if outcome.reason == NO_MATCHING_CLAUSE else EXIT_RUNTIME
    return EXIT_OK


def _cmd_fmt(args) -> int:
    try:
        source = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cmod: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    try:
        program = parse_source(source)
    except (LexError, ParseError) as exc:
        print(f"cmod: syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    print(pretty_print(program))
    return EXIT_OK


def _cmd_repl(args) -> int:
    trace = _stderr_trace if args.trace else None
    machine = Machine.initial(max_depth=args.max_depth, trace=trace)
    print("cmod repl; :quit to leave, :store :stack :macros :reset to inspect")
    buffer = ""
    while True:
        prompt = "....> " if buffer else "cmod> "
        try:
            line = input(prompt)
        except EOFError:
            print()
            return EXIT_OK

        if not buffer and line.strip().startswith(":"):
            command = line.strip()
            if command in (":quit", ":q"):
                return EXIT_OK
            if command == ":reset":
                machine = Machine.initial(max_depth=args.max_depth, trace=trace)
                print("machine reset")
            elif command == ":store":
                if machine.store:
                    for name in sorted(machine.store):
                        print(f"{name} = {ast.render_value(machine.store[name])}")
                else:
                    print("(empty)")
            elif command == ":stack":
                if machine.module_stack:
                    for frame in reversed(machine.module_stack):
                        print(format_declaration(frame, compact=True))
                else:
                    print("(empty)")
            elif command == ":macros":
                names = machine.macro_env.names()
                print(" ".join(f"/{n}" for n in names) if names else "(empty)")
            else:
                print(f"unknown command {command}")
            continue

        buffer = f"{buffer}\n{line}" if buffer else line
        if not buffer.strip():
            buffer = ""
            continue

        try:
            seeds, stmt = parse_repl_input(buffer)
        except ParseError as exc:
            if exc.at_eof and line.strip():
                continue  # statement not finished; keep reading
            print(f"syntax error: {exc}")
            buffer = ""
            continue
        except LexError as exc:
            print(f"syntax error: {exc}")
            buffer = ""
            continue
        buffer = ""

        if seeds:
            desugared = [ast.MacroDef(d.name, ast.desugar_decl(d.body)) for d in seeds]
            machine.macro_env = machine.macro_env.define(desugared)
            print("defined " + ", ".join(f"/{d.name}" for d in seeds))
        if stmt is not None:
            emitted = len(machine.output)
            outcome = call_with_deep_stack(execute, machine, ast.desugar(stmt))
            sys.stdout.write("".join(machine.output[emitted:]))
            if isinstance(outcome, Failure):
                print(_diagnostic(outcome))
            else:
                print("ok")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cmod",
        description="Interpreter for the cmod language (statement-local modules, "
        "macros, and region-scoped allocation).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a .cmod program file")
    run_p.add_argument("file", help="program file")
    run_p.add_argument("--trace", action="store_true", help="write the derivation trace to stderr")
    run_p.add_argument("--max-depth", type=_positive_int, default=DEFAULT_MAX_DEPTH,
                       help="call-depth limit (default %(default)s)")
    run_p.add_argument("--dump-state", action="store_true",
                       help="dump the final store and region table to stdout")

    repl_p = sub.add_parser("repl", help="interactive session")
    repl_p.add_argument("--trace", action="store_true", help="write the derivation trace to stderr")
    repl_p.add_argument("--max-depth", type=_positive_int, default=DEFAULT_MAX_DEPTH)

    fmt_p = sub.add_parser("fmt", help="reprint a program in canonical form")
    fmt_p.add_argument("file", help="program file")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "repl":
            return _cmd_repl(args)
        return _cmd_fmt(args)
    except CmodError as exc:  # pragma: no cover - safety net
        print(f"cmod: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
