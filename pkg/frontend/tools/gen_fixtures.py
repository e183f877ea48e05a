"""Regenerate the console's shared-contract fixtures from the Python side.

The TypeScript codec must agree byte-for-byte with the rig's own framing,
telemetry and command grammar. This script runs the reference
implementation over a fixed set of inputs and writes the results as JSON
under test/fixtures/, where the vitest suite replays them.

Run from anywhere (the paintrig package must be importable, e.g. after
`pip install -e .` at the repo root):

    python3 frontend/tools/gen_fixtures.py
"""

import json
import pathlib
import random

from paintrig.controller import Command
from paintrig.protocol import (
    FrameParser,
    checksum,
    command_body,
    encode_frame,
    event_frame_body,
    parse_command,
    parse_response,
    parse_telemetry,
    telemetry_body,
    TelemetryRecord,
)

OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures"

# Printable ASCII bodies, minus the two framing characters.
BODY_CHARS = "".join(
    chr(c) for c in range(0x20, 0x7F) if chr(c) not in "$*"
)


def console_commands():
    """Every command the console can emit, as (builder call, Command)."""
    calls = [
        ({"name": "hello"}, Command("HELLO")),
        ({"name": "start"}, Command("START")),
        ({"name": "pause"}, Command("PAUSE")),
        ({"name": "resume"}, Command("RESUME")),
        ({"name": "abort"}, Command("ABORT")),
        ({"name": "shift"}, Command("SHIFT")),
        ({"name": "sprayOn"}, Command("SPRAY", on=True)),
        ({"name": "sprayOff"}, Command("SPRAY", on=False)),
        ({"name": "getStatus"}, Command("GET_STATUS")),
        ({"name": "set", "args": ["telemetry_ms", "200"]},
         Command("SET", key="telemetry_ms", value="200")),
        ({"name": "set", "args": ["margin_cm", "4"]},
         Command("SET", key="margin_cm", value="4")),
    ]
    for direction in ("UP", "DOWN", "LEFT", "RIGHT"):
        for mm in (0.5, 1.0, 5.0, 10.0, 25.0, 2.25):
            calls.append((
                {"name": "jog", "args": [direction, mm]},
                Command("JOG", direction=direction, amount_mm=mm),
            ))
    return calls


def gen_commands():
    rows = []
    for call, cmd in console_commands():
        body = command_body(cmd)
        parse_command(body)  # the console must never emit a rejected body
        rows.append({
            "call": call,
            "body": body,
            "wire": encode_frame(body).decode("ascii"),
        })
    return rows


def telemetry_samples():
    return [
        TelemetryRecord(0, "IDLE", 95.0, 100.0, 0, 100.0, 0.0),
        TelemetryRecord(1200, "DESCENDING", 452.0, 318.4, 1, 99.2, 12.5),
        TelemetryRecord(1300, "DESCENDING", 451.5, 300.0, 1, 60.04, 45.0),
        TelemetryRecord(5000, "OBSTACLE_HOLD", 150.0, 210.25, 0, 70.0, 33.3),
        TelemetryRecord(70000, "SHIFTING_COLUMN", 446.5, 457.0, 0, 100.0, 1.2),
        TelemetryRecord(123400, "DONE", 5.0, 457.0, 0, 100.0, 100.0),
        TelemetryRecord(800, "PAUSED", 0.0, 0.0, 0, 2.0, 0.0),
        TelemetryRecord(900, "FAULT", -0.0001, 400.0, 0, 400.0, 7.7),
    ]


MALFORMED_TELEMETRY = [
    "",
    "TELEM",
    "TELEM t=0 mode=IDLE x=95 y=100 spray=0 ultra=100.0",
    "TELEM mode=IDLE t=0 x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "TELEM t=0 mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0 extra=1",
    "TELEM t= mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "TELEM t=0 mode= x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "TELEM t=0 mode=IDLE x=95 y=100 spray=2 ultra=100.0 cov=0.0",
    "TELEM t=abc mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "TELEM t=1e3 mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "TELEM t=0 mode=IDLE x=95 y=--5 spray=0 ultra=100.0 cov=0.0",
    "TELEM t=0 mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=abc",
    "TELEM  t=0 mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "TELEM t=0 mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0 ",
    "TELEMX t=0 mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "TELEM t:0 mode=IDLE x=95 y=100 spray=0 ultra=100.0 cov=0.0",
    "ACK START",
    "EVENT MODE IDLE->READY",
]


def telemetry_expectation(body):
    try:
        rec = parse_telemetry(body)
    except ValueError:
        return None
    return {
        "tMs": rec.t_ms,
        "mode": rec.mode,
        "xMm": rec.x_mm,
        "yMm": rec.y_mm,
        "spray": rec.spray,
        "ultraCm": rec.ultra_cm,
        "coveragePct": rec.coverage_pct,
    }


def gen_telemetry():
    bodies = [telemetry_body(rec) for rec in telemetry_samples()]
    # Parseable variants the rig itself would not emit but the grammar allows.
    bodies.append("TELEM t=0 mode=IDLE x=95 y=1e2 spray=0 ultra=100.0 cov=0.0")
    bodies.append("TELEM t=-10 mode=IDLE x=.5 y=5. spray=1 ultra=2.0 cov=0.0")
    bodies.extend(MALFORMED_TELEMETRY)
    return [{"body": b, "parsed": telemetry_expectation(b)} for b in bodies]


RESPONSE_BODIES = [
    "ACK HELLO",
    "ACK START",
    "ACK GET",
    "NAK HELLO BUSY",
    "NAK RESUME ILLEGAL",
    "NAK SPRAY SAFETY",
    "NAK SET BADARG",
    "NAK DANCE BADARG",
    "ACK",
    "NAK START",
    "NAK START ILLEGAL NOW",
    "ack start",
    "ACK START NOW",
    "",
    "TELEM t=0",
]


def response_expectation(body):
    try:
        status, verb, reason = parse_response(body)
    except ValueError:
        return None
    return {"status": status, "verb": verb, "reason": reason}


def gen_events():
    pairs = [
        ("MODE", "IDLE->READY"),
        ("MODE", "DESCENDING->OBSTACLE_HOLD"),
        ("OBSTACLE", "HOLD x=452.00 y=318.40 ultra=60.0"),
        ("OBSTACLE", "CLEAR x=452.00 y=284.10 ultra=100.2"),
        ("FAULT", "sensor fault"),
        ("WALL", "finished 0"),
        ("WALL", "shifted to 1"),
        ("COLUMN", "1 x=446.50"),
        ("BURST", "3 y=85.00"),
        ("END", "DONE"),
    ]
    return [
        {"body": event_frame_body(kind, detail), "kind": kind, "detail": detail}
        for kind, detail in pairs
    ]


def gen_frames(rng):
    bodies = [row["body"] for row in gen_commands()]
    bodies += [telemetry_body(rec) for rec in telemetry_samples()]
    bodies += [r for r in RESPONSE_BODIES if r and response_expectation(r)]
    bodies += [ev["body"] for ev in gen_events()]
    bodies += ["A", "~", " ", "!" * 251]
    for _ in range(20):
        n = rng.randint(1, 60)
        bodies.append("".join(rng.choice(BODY_CHARS) for _ in range(n)))
    return [
        {"body": b, "wire": encode_frame(b).decode("ascii"), "checksum": checksum(b)}
        for b in bodies
    ]


def parser_streams(rng):
    """Chunked byte streams and what the reference parser makes of them."""
    good = encode_frame("HELLO").decode("ascii")
    telem = encode_frame(
        telemetry_body(TelemetryRecord(0, "IDLE", 95.0, 100.0, 0, 100.0, 0.0))
    ).decode("ascii")
    streams = [
        [good + telem + good],
        [good[:3], good[3:5], good[5:] + telem],
        ["noise before ", good],
        ["$SPRAY ON*69\n", good],
        ["$HEL" + good],
        ["$" + "x" * 300 + good],
        ["$A*4G\n" + good],
        ["$*00\n" + good],
        [good[:2]],
        ["$A*41", "\n"],
        ["$A*41", good],
    ]
    fuzz = "".join(chr(rng.randint(1, 255)) for _ in range(400))
    streams.append([fuzz, good])
    rows = []
    for chunks in streams:
        parser = FrameParser()
        bodies = []
        errors = 0
        for chunk in chunks:
            frames, errs = parser.feed(chunk.encode("latin-1"))
            bodies.extend(f.body for f in frames)
            errors += len(errs)
        rows.append({
            "chunks": chunks,
            "bodies": bodies,
            "errors": errors,
            "droppedBytes": parser.dropped_bytes,
        })
    return rows


def write(name, doc):
    path = OUT_DIR / name
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = random.Random(1234)
    write("commands.json", gen_commands())
    write("frames.json", {
        "encoded": gen_frames(rng),
        "streams": parser_streams(rng),
    })
    write("messages.json", {
        "telemetry": gen_telemetry(),
        "responses": [
            {"body": b, "parsed": response_expectation(b)} for b in RESPONSE_BODIES
        ],
        "events": gen_events(),
    })


if __name__ == "__main__":
    main()
