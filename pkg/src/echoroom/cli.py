"""Command line: run scripts, verify scenario files, serve live sessions.

Exit codes: 0 success, 1 validation or usage error, 2 script step failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

from .geometry import GeometryError
from .scenario import (
    SchemaError,
    StepPreconditionError,
    load_scenario,
    load_script,
    run_script,
)
from .scene import Config, InvariantError
from .service import serve_forever

_VALIDATION_ERRORS = (SchemaError, InvariantError, GeometryError, ValueError, OSError)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for step failures.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="echoroom", description="Simulated accessible-AR interaction engine")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_p = sub.add_parser("run", help="replay a script against a scenario")
    run_p.add_argument("scenario", help="scenario JSON file")
    run_p.add_argument("--script", required=True, help="script JSON file")
    run_p.add_argument("--config", help="config JSON file (defaults built in)")
    run_p.add_argument("--transcript", help="write the transcript here instead of stdout")

    verify_p = sub.add_parser("verify", help="check a scenario file")
    verify_p.add_argument("scenario", help="scenario JSON file")

    serve_p = sub.add_parser("serve", help="serve live sessions over a websocket")
    serve_p.add_argument("scenario", help="scenario JSON file")
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--config", help="config JSON file")
    return parser


def _load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    with open(path, "r", encoding="utf-8") as fh:
        return Config.from_dict(json.load(fh))


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
    except _VALIDATION_ERRORS as e:
        print(f"echoroom: {e}", file=sys.stderr)
        return 1

    if args.command == "verify":
        world = scenario.world
        print(
            f"{scenario.name}: {len(world.planes)} planes, {len(world.objects)} objects, "
            f"{len(scenario.catalog)} catalog items"
        )
        return 0

    try:
        config = _load_config(args.config)
    except _VALIDATION_ERRORS as e:
        print(f"echoroom: {e}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as e:
        print(f"echoroom: config: {e}", file=sys.stderr)
        return 1

    if args.command == "run":
        try:
            script = load_script(args.script)
        except _VALIDATION_ERRORS as e:
            print(f"echoroom: {e}", file=sys.stderr)
            return 1
        try:
            transcript = run_script(scenario, script, config)
        except StepPreconditionError as e:
            print(f"echoroom: {e}", file=sys.stderr)
            return 2
        if args.transcript:
            with open(args.transcript, "w", encoding="utf-8") as fh:
                fh.write(transcript)
        else:
            sys.stdout.write(transcript)
        return 0

    # serve
    try:
        asyncio.run(serve_forever(scenario, config, args.port, args.host))
    except KeyboardInterrupt:
        return 0
    except OSError as e:
        print(f"echoroom: cannot serve: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
