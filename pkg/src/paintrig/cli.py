"""Command-line surface: run a mission, serve it live, or verify a log.

    paintrig run <scenario.toml> --out <dir> [--seed N] [--mode burst|continuous]
    paintrig serve <scenario.toml> --port N [--ws-port N]
    paintrig replay <events.jsonl>

Exit codes: 0 success (mission DONE / replay identical), 1 configuration
or input error, 2 mission FAULT or stall, 3 replay divergence, 4 replay of
a truncated log. The PAINTRIG_LOG environment variable sets log verbosity
(DEBUG, INFO, WARNING, ERROR).
"""

import argparse
import logging
import os
import sys

from .controller import Command
from .errors import ValidationError
from .mission import MissionRunner, replay, write_artifacts
from .simworld import load_scenario

log = logging.getLogger("paintrig")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAULT = 2
EXIT_DIVERGENCE = 3
EXIT_TRUNCATED = 4


def _setup_logging():
    name = os.environ.get("PAINTRIG_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


class _ConfigError(Exception):
    """Bad scenario file or override; carries the message already printed."""


def _load(path, seed=None, mode=None):
    try:
        scenario = load_scenario(path)
    except OSError as e:
        print(f"cannot read scenario: {e}", file=sys.stderr)
        raise _ConfigError from e
    except ValidationError as e:
        print(f"invalid scenario: {e}", file=sys.stderr)
        raise _ConfigError from e
    try:
        if seed is not None:
            scenario = scenario.replaced(seed=seed)
        if mode is not None:
            scenario = scenario.replaced(mode=mode)
    except ValidationError as e:
        print(f"invalid scenario override: {e}", file=sys.stderr)
        raise _ConfigError from e
    return scenario


def cmd_run(args) -> int:
    scenario = _load(args.scenario, seed=args.seed, mode=args.mode)
    try:
        runner = MissionRunner(scenario)
    except ValidationError as e:
        print(f"invalid scenario: {e}", file=sys.stderr)
        return EXIT_CONFIG
    runner.inject(Command("START"))
    runner.run()
    paths = write_artifacts(runner, args.out)
    report = runner.report(event_log_path=paths["events"].name)
    print(
        f"{report.outcome}: painted {report.coverage.painted_fraction * 100:.1f}%"
        f" quality={report.quality.label}"
        f" max_err={report.max_position_error_mm:.4f}mm"
        f" ticks={report.tick_count}"
    )
    if report.unpaintable_bottom_mm > 0:
        print(f"unpaintable bottom band: {report.unpaintable_bottom_mm:.1f} mm")
    print(f"artifacts in {args.out}")
    return EXIT_OK if report.outcome == "DONE" else EXIT_FAULT


def cmd_replay(args) -> int:
    res = replay(args.log)
    if res.status == "identical":
        print(f"identical: {res.events} events over {res.ticks} ticks")
        return EXIT_OK
    if res.status == "divergence":
        print(f"divergence at line {res.line}: {res.message}", file=sys.stderr)
        return EXIT_DIVERGENCE
    if res.status == "truncated":
        print(f"truncated: {res.message}", file=sys.stderr)
        return EXIT_TRUNCATED
    print(f"unreadable log: {res.message}", file=sys.stderr)
    return EXIT_CONFIG


def cmd_serve(args) -> int:
    from .bridge import Bridge  # deferred: pulls in the websockets dependency

    scenario = _load(args.scenario)
    try:
        bridge = Bridge(scenario, port=args.port, ws_port=args.ws_port)
    except OSError as e:
        print(f"cannot bind port: {e}", file=sys.stderr)
        return EXIT_CONFIG
    # Flushed eagerly so a supervising process can scrape the bound ports.
    print(
        f"serving on tcp://0.0.0.0:{bridge.tcp_port}"
        f" and ws://0.0.0.0:{bridge.ws_port}/link",
        flush=True,
    )
    try:
        bridge.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        bridge.stop()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="paintrig",
        description="Deterministic controller and simulator for a rope-rig wall painter.",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="execute a mission as fast as possible")
    r.add_argument("scenario", help="scenario TOML file")
    r.add_argument("--out", required=True, help="artifact output directory")
    r.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    r.add_argument("--mode", choices=("burst", "continuous"), default=None,
                   help="override the paint mode")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("serve", help="serve the rig live, paced to real time")
    s.add_argument("scenario", help="scenario TOML file")
    s.add_argument("--port", type=int, default=8765, help="TCP port for the framed link")
    s.add_argument("--ws-port", type=int, default=None,
                   help="WebSocket port (default: TCP port + 1)")
    s.set_defaults(func=cmd_serve)

    rp = sub.add_parser("replay", help="verify an event log by re-execution")
    rp.add_argument("log", help="events.jsonl from a previous run")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ConfigError:
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
