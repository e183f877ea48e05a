"""Framed ASCII link codec: the wire format between rig and operator.

A frame is '$' + body + '*' + two uppercase hex digits + '\\n', where the
hex digits are the XOR fold of the body bytes. Bodies are printable ASCII
without '$' or '*', non-empty, and a whole frame never exceeds 256 bytes.
The same frames travel over any reliable byte stream; a parser fed
arbitrary bytes recovers at the next '$' after an error.

Also defined here: the command grammar the operator speaks, the ACK/NAK
response bodies, and the fixed-order telemetry record format.
"""

from dataclasses import dataclass

from .controller import Command
from .errors import ValidationError

FRAME_MAX = 256
BODY_MAX = FRAME_MAX - 5  # minus '$', '*', two hex digits, newline

_HEX = "0123456789ABCDEF"


class FrameError(ValueError):
    """Base for framing failures."""


class BadChecksum(FrameError):
    def __init__(self, body: str, expected: str, got: str):
        super().__init__(f"checksum {got} != {expected} for body {body!r}")
        self.body = body
        self.expected = expected
        self.got = got


class Malformed(FrameError):
    pass


class Oversize(FrameError):
    pass


def checksum(body) -> str:
    """XOR fold of the body bytes as two uppercase hex digits."""
    if isinstance(body, str):
        body = body.encode("ascii")
    acc = 0
    for b in body:
        acc ^= b
    return format(acc, "02X")


@dataclass(frozen=True)
class Frame:
    body: str

    def __post_init__(self):
        if not self.body:
            raise Malformed("empty body")
        if len(self.body) > BODY_MAX:
            raise Oversize(f"body longer than {BODY_MAX} bytes")
        for ch in self.body:
            if ch in "$*" or not (0x20 <= ord(ch) <= 0x7E):
                raise Malformed(f"forbidden character {ch!r}")

    @property
    def checksum(self) -> str:
        return checksum(self.body)


def encode_frame(frame) -> bytes:
    """Serialize a Frame (or raw body string) to wire bytes."""
    if isinstance(frame, str):
        frame = Frame(frame)
    return f"${frame.body}*{frame.checksum}\n".encode("ascii")


class FrameParser:
    """Incremental parser for a byte stream carrying frames.

    feed() returns (frames, errors) in stream order; bytes outside any
    frame are dropped and counted. The parser never raises on input - all
    failures come back as FrameError instances so a session loop can log
    them and keep reading.
    """

    def __init__(self):
        self._buf = bytearray()
        self.dropped_bytes = 0

    def feed(self, data):
        frames = []
        errors = []
        buf = self._buf
        buf += bytes(data)
        while True:
            start = buf.find(b"$")
            if start == -1:
                self.dropped_bytes += len(buf)
                del buf[:]
                break
            if start > 0:
                self.dropped_bytes += start
                del buf[:start]
            restart = buf.find(b"$", 1)
            star = buf.find(b"*", 1)
            if restart != -1 and (star == -1 or restart < star):
                # A new frame began before this one terminated.
                errors.append(Malformed("frame restarted before '*'"))
                self.dropped_bytes += restart
                del buf[:restart]
                continue
            if star == -1:
                if len(buf) > FRAME_MAX:
                    errors.append(Oversize(f"no terminator within {FRAME_MAX} bytes"))
                    self.dropped_bytes += len(buf)
                    del buf[:]
                    break
                break  # incomplete: wait for more bytes
            if len(buf) < star + 3:
                break  # checksum digits not in yet
            body_bytes = bytes(buf[1:star])
            cks = buf[star + 1:star + 3].decode("latin-1")
            consumed = star + 3
            if len(buf) > consumed and buf[consumed:consumed + 1] == b"\n":
                consumed += 1
            del buf[:consumed]

            try:
                frame = Frame(body_bytes.decode("ascii"))
            except UnicodeDecodeError:
                errors.append(Malformed("non-ASCII byte in body"))
                continue
            except FrameError as e:
                errors.append(e)
                continue
            if len(cks) != 2 or cks[0] not in _HEX or cks[1] not in _HEX:
                errors.append(Malformed(f"bad checksum field {cks!r}"))
                continue
            if cks != frame.checksum:
                errors.append(BadChecksum(frame.body, frame.checksum, cks))
                continue
            frames.append(frame)
        return frames, errors


def parse_frame(data) -> Frame:
    """One-shot parse: first valid frame in `data`, resyncing past garbage.

    Raises the first FrameError when no frame verifies.
    """
    if isinstance(data, str):
        data = data.encode("latin-1")
    frames, errors = FrameParser().feed(data)
    if frames:
        return frames[0]
    if errors:
        raise errors[0]
    raise Malformed("no complete frame")


# --- command grammar -------------------------------------------------------

NAK_REASONS = ("ILLEGAL", "BUSY", "SAFETY", "BADARG")


class CommandError(ValueError):
    """Unparseable command body; carries the verb and NAK reason to send."""

    def __init__(self, verb: str, reason: str, message: str = ""):
        super().__init__(message or f"{verb}: {reason}")
        self.verb = verb or "?"
        self.reason = reason


_BARE_VERBS = {"HELLO", "START", "PAUSE", "RESUME", "ABORT", "SHIFT"}


def parse_command(body: str) -> Command:
    """Parse one command body into a validated Command.

    Grammar: HELLO | START | PAUSE | RESUME | ABORT | SHIFT
           | JOG (UP|DOWN|LEFT|RIGHT) <mm> | SPRAY (ON|OFF)
           | SET <key> <value> | GET STATUS
    """
    parts = body.split()
    if not parts:
        raise CommandError("?", "BADARG", "empty command")
    verb = parts[0]
    args = parts[1:]
    if verb in _BARE_VERBS:
        if args:
            raise CommandError(verb, "BADARG", f"{verb} takes no arguments")
        return Command(verb)
    if verb == "JOG":
        if len(args) != 2 or args[0] not in ("UP", "DOWN", "LEFT", "RIGHT"):
            raise CommandError(verb, "BADARG", "usage: JOG UP|DOWN|LEFT|RIGHT <mm>")
        try:
            mm = float(args[1])
        except ValueError:
            raise CommandError(verb, "BADARG", f"bad distance {args[1]!r}") from None
        try:
            return Command("JOG", direction=args[0], amount_mm=mm)
        except ValidationError as e:
            raise CommandError(verb, "BADARG", str(e)) from None
    if verb == "SPRAY":
        if len(args) != 1 or args[0] not in ("ON", "OFF"):
            raise CommandError(verb, "BADARG", "usage: SPRAY ON|OFF")
        return Command("SPRAY", on=(args[0] == "ON"))
    if verb == "SET":
        if len(args) != 2:
            raise CommandError(verb, "BADARG", "usage: SET <key> <value>")
        return Command("SET", key=args[0], value=args[1])
    if verb == "GET":
        if args != ["STATUS"]:
            raise CommandError(verb, "BADARG", "usage: GET STATUS")
        return Command("GET_STATUS")
    raise CommandError(verb, "BADARG", f"unknown command {verb!r}")


def command_body(cmd: Command) -> str:
    """Inverse of parse_command: the canonical body for a Command."""
    if cmd.kind == "JOG":
        return f"JOG {cmd.direction} {format_mm(cmd.amount_mm)}"
    if cmd.kind == "SPRAY":
        return f"SPRAY {'ON' if cmd.on else 'OFF'}"
    if cmd.kind == "SET":
        return f"SET {cmd.key} {cmd.value}"
    if cmd.kind == "GET_STATUS":
        return "GET STATUS"
    return cmd.kind


def ack_body(verb: str) -> str:
    return f"ACK {verb}"


def nak_body(verb: str, reason: str) -> str:
    return f"NAK {verb} {reason}"


def parse_response(body: str):
    """Split an ACK/NAK body into (status, verb, reason-or-None)."""
    parts = body.split()
    if len(parts) == 2 and parts[0] == "ACK":
        return "ACK", parts[1], None
    if len(parts) == 3 and parts[0] == "NAK":
        return "NAK", parts[1], parts[2]
    raise ValueError(f"not a response body: {body!r}")


# --- telemetry --------------------------------------------------------------


def format_mm(v: float) -> str:
    """Millimetres with up to two decimals, trailing zeros stripped."""
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


@dataclass(frozen=True)
class TelemetryRecord:
    """One periodic status sample; field order on the wire is fixed."""

    t_ms: int
    mode: str
    x_mm: float
    y_mm: float
    spray: int
    ultra_cm: float
    coverage_pct: float

    def __post_init__(self):
        if self.spray not in (0, 1):
            raise ValidationError("spray must be 0 or 1")


def telemetry_body(rec: TelemetryRecord) -> str:
    return (
        f"TELEM t={rec.t_ms} mode={rec.mode} x={format_mm(rec.x_mm)}"
        f" y={format_mm(rec.y_mm)} spray={rec.spray}"
        f" ultra={rec.ultra_cm:.1f} cov={rec.coverage_pct:.1f}"
    )


def encode_telemetry(rec: TelemetryRecord) -> Frame:
    return Frame(telemetry_body(rec))


_TELEM_KEYS = ("t", "mode", "x", "y", "spray", "ultra", "cov")


def parse_telemetry(body: str) -> TelemetryRecord:
    """Parse a telemetry body; raises ValueError on any shape violation."""
    parts = body.split(" ")
    if len(parts) != 1 + len(_TELEM_KEYS) or parts[0] != "TELEM":
        raise ValueError(f"not a telemetry body: {body!r}")
    vals = {}
    for key, part in zip(_TELEM_KEYS, parts[1:]):
        k, sep, v = part.partition("=")
        if k != key or not sep or not v:
            raise ValueError(f"bad telemetry field {part!r}")
        vals[key] = v
    try:
        return TelemetryRecord(
            t_ms=int(vals["t"]),
            mode=vals["mode"],
            x_mm=float(vals["x"]),
            y_mm=float(vals["y"]),
            spray=int(vals["spray"]),
            ultra_cm=float(vals["ultra"]),
            coverage_pct=float(vals["cov"]),
        )
    except (ValueError, ValidationError) as e:
        raise ValueError(f"bad telemetry values in {body!r}: {e}") from None


def event_frame_body(kind: str, detail: str) -> str:
    """Link body for a controller event broadcast (obstacle, mode, fault)."""
    return f"EVENT {kind} {detail}"
