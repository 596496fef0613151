"""Command-line entry point.

Subcommands wire the library layers together behind stable file formats:

* ``compile``  — pair-sum instance JSON -> config.json + line.json + manifest
* ``verify``   — compile, solve the choice skeleton, compare with the
  abstract-game oracle, and spot-check scripted-step deviations
* ``replay``   — stream the event log of a scripted line under a choice string
* ``solve``    — exact minimax value of a standalone game configuration
* ``cards dump`` — emit the embedded card table

Every run writes a single-line JSON run manifest to stderr (command, inputs,
flags, tool version, config hash, duration); ``compile`` also writes it to
``manifest.json``.  Primary stdout/file outputs are byte-deterministic.

Exit codes: 0 success / match, 1 verification or replay failure, 2 input
error, 3 infeasible schedule.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .cards import database_to_json
from .compiler import (
    InstanceError,
    PartitionInstance,
    ScheduleInfeasible,
    ScriptedLine,
    compile_instance,
    run_line,
)
from .engine import start_game
from .solver import (
    deviation_check,
    minimax,
    oracle_left_wins,
    skeleton_solve,
)
from .state import (
    ConfigError,
    EventLog,
    GameConfig,
    IllegalAction,
    action_to_json_obj,
    state_to_json_obj,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


class InputProblem(Exception):
    """A problem with user-supplied files or arguments (exit code 2)."""


def _use_color(stream) -> bool:
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _err(message: str) -> None:
    prefix = "error:"
    if _use_color(sys.stderr):
        prefix = "\x1b[31merror:\x1b[0m"
    print(f"{prefix} {message}", file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputProblem(f"cannot read {path}: {exc.strerror}") from exc


def _read_json(path: str) -> dict:
    text = _read_text(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputProblem(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputProblem(f"{path}: expected a JSON object")
    return obj


def _load_instance(path: str) -> PartitionInstance:
    try:
        return PartitionInstance.from_json_obj(_read_json(path))
    except InstanceError as exc:
        raise InputProblem(f"{path}: {exc}") from exc


def _load_config(path: str) -> GameConfig:
    try:
        return GameConfig.from_json_obj(_read_json(path))
    except ConfigError as exc:
        raise InputProblem(f"{path}: {exc}") from exc


def _load_line(path: str) -> ScriptedLine:
    try:
        return ScriptedLine.from_json_obj(_read_json(path))
    except (InstanceError, KeyError, TypeError, ValueError) as exc:
        raise InputProblem(f"{path}: malformed line file: {exc}") from exc


def _parse_choices(text: str, n: int) -> tuple[str, ...]:
    if len(text) != n or any(c not in "xy" for c in text):
        raise InputProblem(
            f"choices must be {n} characters drawn from 'x'/'y', got {text!r}"
        )
    return tuple(text)


def _manifest(
    command: str,
    inputs: list[str],
    flags: dict,
    config_bytes: bytes,
    started: float,
) -> dict:
    return {
        "formatVersion": 1,
        "command": command,
        "inputs": inputs,
        "flags": flags,
        "toolVersion": __version__,
        "configHash": hashlib.sha256(config_bytes).hexdigest(),
        "durationSeconds": round(time.monotonic() - started, 6),
    }


def _emit_manifest(manifest: dict) -> None:
    print(json.dumps(manifest, sort_keys=True), file=sys.stderr)


# ---------------------------------------------------------------------------
# compile
# ---------------------------------------------------------------------------


def cmd_compile(args: argparse.Namespace, started: float) -> int:
    instance = _load_instance(args.instance)
    result = compile_instance(
        instance, turn_limit=args.turn_limit, validate=args.validate
    )
    config_text = result.config.to_json()
    line_text = result.line.to_json()

    os.makedirs(args.out_dir, exist_ok=True)
    config_path = os.path.join(args.out_dir, "config.json")
    line_path = os.path.join(args.out_dir, "line.json")
    with open(config_path, "w", encoding="utf-8") as fh:
        fh.write(config_text)
    with open(line_path, "w", encoding="utf-8") as fh:
        fh.write(line_text)

    manifest = _manifest(
        "compile",
        [args.instance],
        {"outDir": args.out_dir, "turnLimit": args.turn_limit,
         "validate": args.validate},
        config_text.encode("utf-8"),
        started,
    )
    with open(os.path.join(args.out_dir, "manifest.json"), "w",
              encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    _emit_manifest(manifest)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace, started: float) -> int:
    instance = _load_instance(args.instance)
    result = compile_instance(
        instance, turn_limit=args.turn_limit, validate="none"
    )
    config = result.config
    if args.config_override:
        config = _load_config(args.config_override)

    oracle = oracle_left_wins(instance)

    verdict = "unknown"
    try:
        if args.mode == "full":
            solved = minimax(
                start_game(config),
                max_depth=args.max_depth,
                max_nodes=args.max_nodes,
            )
            verdict = solved.verdict
        else:
            verdict = skeleton_solve(config, result.line).verdict
    except IllegalAction:
        # The line cannot even be replayed against this configuration
        # (possible only with --config-override); counts as a mismatch.
        verdict = "unknown"

    match = verdict != "unknown" and (verdict == "win") == oracle

    counts = {"refuted": 0, "dominated": 0, "improved": 0, "unresolved": 0}
    if verdict != "unknown":
        report = deviation_check(
            config, result.line, max_turns=args.deviation_turns
        )
        counts = {
            "refuted": report.refuted,
            "dominated": report.dominated,
            "improved": report.improved,
            "unresolved": report.unresolved,
        }

    out = {
        "formatVersion": 1,
        "instance": instance.to_json_obj(),
        "oracle": oracle,
        "skeleton": verdict,
        "match": match,
        "deviations": counts,
    }
    print(json.dumps(out))
    _emit_manifest(_manifest(
        "verify",
        [args.instance] + ([args.config_override] if args.config_override else []),
        {"mode": args.mode, "maxNodes": args.max_nodes,
         "maxDepth": args.max_depth, "turnLimit": args.turn_limit,
         "deviationTurns": args.deviation_turns,
         "allowUnresolved": args.allow_unresolved},
        config.to_json().encode("utf-8"),
        started,
    ))

    ok = match and (counts["unresolved"] == 0 or args.allow_unresolved)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------


def cmd_replay(args: argparse.Namespace, started: float) -> int:
    config = _load_config(args.config)
    line = _load_line(args.line)
    vector = _parse_choices(args.choices, line.n)

    log = EventLog()
    cursor = 0

    def flush() -> None:
        nonlocal cursor
        while cursor < len(log.events):
            print(json.dumps(log.events[cursor].to_json_obj()))
            cursor += 1

    def on_step(index: int, flat, state) -> None:
        flush()
        if args.trace:
            snap = {"kind": "snapshot", "stepIndex": index}
            snap.update(state_to_json_obj(state))
            print(json.dumps(snap))

    print(json.dumps(
        {"formatVersion": 1, "kind": "replay", "choices": args.choices}
    ))
    try:
        final = run_line(config, line, vector, log, on_step)
    except IllegalAction as exc:
        flush()
        _err(f"scripted step {exc.step} is illegal here: {exc.reason}")
        return EXIT_FAIL
    flush()
    print(json.dumps({"kind": "final", "outcome": final.outcome.value,
                      "turn": final.turn}))
    _emit_manifest(_manifest(
        "replay",
        [args.config, args.line],
        {"choices": args.choices, "trace": args.trace},
        config.to_json().encode("utf-8"),
        started,
    ))
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, started: float) -> int:
    config = _load_config(args.config)
    result = minimax(
        start_game(config), max_depth=args.max_depth, max_nodes=args.max_nodes
    )
    out = {
        "formatVersion": 1,
        "verdict": result.verdict,
        "nodes": result.nodes,
        "ttHits": result.tt_hits,
        "exhausted": result.exhausted,
        "pv": [action_to_json_obj(a) for a in result.pv],
    }
    print(json.dumps(out))
    _emit_manifest(_manifest(
        "solve",
        [args.config],
        {"maxNodes": args.max_nodes, "maxDepth": args.max_depth},
        config.to_json().encode("utf-8"),
        started,
    ))
    return EXIT_OK


# ---------------------------------------------------------------------------
# cards
# ---------------------------------------------------------------------------


def cmd_cards_dump(args: argparse.Namespace, started: float) -> int:
    text = database_to_json()
    sys.stdout.write(text)
    _emit_manifest(_manifest(
        "cards dump", [], {}, text.encode("utf-8"), started
    ))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hearthproof",
        description="Compile pair-sum games into scripted card-game "
                    "configurations, replay them, and check forced wins.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile an instance to config + line")
    p.add_argument("instance", help="instance JSON file (pairs + target)")
    p.add_argument("--out-dir", required=True, help="output directory")
    p.add_argument("--turn-limit", type=int, default=60)
    p.add_argument(
        "--validate", choices=["canonical", "all", "none"], default="canonical",
        help="post-compile replay checking (default: canonical vector only)",
    )
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser(
        "verify",
        help="check realised-game verdict against the abstract-game oracle",
    )
    p.add_argument("instance", help="instance JSON file (pairs + target)")
    p.add_argument(
        "--config-override", metavar="FILE",
        help="use this configuration instead of the compiled one",
    )
    p.add_argument(
        "--mode", choices=["skeleton", "full"], default="skeleton",
        help="skeleton: branch decisions only (default); full: exact "
             "minimax over all legal actions (micro configurations only)",
    )
    p.add_argument("--max-nodes", type=int, default=500_000)
    p.add_argument("--max-depth", type=int, default=120)
    p.add_argument("--turn-limit", type=int, default=60)
    p.add_argument(
        "--deviation-turns", type=int, default=None, metavar="N",
        help="probe every legal alternative in turns <= N instead of the "
             "default named spot checks",
    )
    p.add_argument(
        "--allow-unresolved", action="store_true",
        help="exit 0 even when some deviation probes were inconclusive",
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="replay a line and stream its events")
    p.add_argument("config", help="config JSON file")
    p.add_argument("line", help="line JSON file")
    p.add_argument(
        "--choices", required=True,
        help="one 'x' or 'y' per pair, e.g. xyyx",
    )
    p.add_argument(
        "--trace", action="store_true",
        help="emit a board snapshot after every scripted step",
    )
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("solve", help="exact minimax value of a configuration")
    p.add_argument("config", help="config JSON file")
    p.add_argument("--max-nodes", type=int, default=500_000)
    p.add_argument("--max-depth", type=int, default=120)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("cards", help="card table utilities")
    cards_sub = p.add_subparsers(dest="cards_command", required=True)
    d = cards_sub.add_parser("dump", help="emit the embedded card table")
    d.set_defaults(func=cmd_cards_dump)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        return args.func(args, started)
    except InputProblem as exc:
        _err(str(exc))
        return EXIT_INPUT
    except InstanceError as exc:
        _err(str(exc))
        return EXIT_INPUT
    except ScheduleInfeasible as exc:
        detail = ""
        if exc.turn is not None:
            detail = f" (turn {exc.turn}"
            detail += f", step {exc.step})" if exc.step is not None else ")"
        _err(f"schedule infeasible: {exc.reason}{detail}")
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
