"""Wire framing, checksums, command grammar, and telemetry codec."""

import string

import numpy as np
import pytest

from paintrig.protocol import (
    BODY_MAX,
    FRAME_MAX,
    NAK_REASONS,
    BadChecksum,
    CommandError,
    Frame,
    FrameError,
    FrameParser,
    Malformed,
    Oversize,
    TelemetryRecord,
    ack_body,
    checksum,
    command_body,
    encode_frame,
    encode_telemetry,
    format_mm,
    nak_body,
    parse_command,
    parse_frame,
    parse_response,
    parse_telemetry,
    telemetry_body,
)

BODY_ALPHABET = "".join(
    c for c in string.printable if c.isprintable() and c not in "$*"
)


def random_body(rng, max_len=BODY_MAX):
    n = int(rng.integers(1, max_len + 1))
    return "".join(rng.choice(list(BODY_ALPHABET), size=n))


# --- checksum ---------------------------------------------------------------


def test_checksum_empty():
    assert checksum("") == "00"


def test_checksum_single_byte():
    assert checksum("A") == "41"


def test_checksum_spray_on():
    assert checksum("SPRAY ON") == "68"


def test_checksum_accepts_bytes():
    assert checksum(b"GET STATUS") == checksum("GET STATUS") == "62"


def test_checksum_self_cancelling():
    assert checksum("AA") == "00"


# --- encode -----------------------------------------------------------------


def test_encode_get_status():
    assert encode_frame("GET STATUS") == b"$GET STATUS*62\n"


def test_encode_spray_on():
    assert encode_frame("SPRAY ON") == b"$SPRAY ON*68\n"


def test_encode_accepts_frame_object():
    f = Frame("HELLO")
    assert encode_frame(f) == b"$HELLO*42\n"


def test_frame_rejects_empty_body():
    with pytest.raises(Malformed):
        Frame("")


def test_frame_rejects_forbidden_characters():
    for bad in ("a$b", "a*b", "a\nb", "a\x01b"):
        with pytest.raises(Malformed):
            Frame(bad)


def test_frame_rejects_oversize_body():
    Frame("A" * BODY_MAX)  # largest legal body
    with pytest.raises(Oversize):
        Frame("A" * (BODY_MAX + 1))


def test_frame_size_budget():
    # '$' + body + '*' + 2 hex + '\n' must fit the 256-byte frame
    assert BODY_MAX + 5 == FRAME_MAX == 256
    assert len(encode_frame("A" * BODY_MAX)) == FRAME_MAX


# --- parse ------------------------------------------------------------------


def test_parse_valid_frame():
    f = parse_frame(b"$SPRAY ON*68\n")
    assert f.body == "SPRAY ON"


def test_parse_detects_bad_checksum():
    with pytest.raises(BadChecksum) as err:
        parse_frame(b"$SPRAY ON*69\n")
    assert err.value.expected == "68"
    assert err.value.got == "69"
    assert err.value.body == "SPRAY ON"


def test_parse_resyncs_after_garbage():
    f = parse_frame(b"garbage$GET STATUS*62\n")
    assert f.body == "GET STATUS"


def test_parse_round_trip_random_bodies():
    rng = np.random.default_rng(5)
    for _ in range(500):
        body = random_body(rng)
        assert parse_frame(encode_frame(body)).body == body


def test_single_byte_body_corruption_detected():
    wire = bytearray(encode_frame("GET STATUS"))
    for i in range(1, 1 + len("GET STATUS")):
        for replacement in (b"Z", b"!", b" "):
            if wire[i] == replacement[0]:
                continue
            corrupt = bytes(wire[:i]) + replacement + bytes(wire[i + 1:])
            with pytest.raises(FrameError):
                parse_frame(corrupt)


def test_checksum_field_corruption_detected():
    for wire in (b"$HELLO*43\n", b"$HELLO*4G\n", b"$HELLO*4a\n"):
        with pytest.raises(FrameError):
            parse_frame(wire)


def test_parse_incomplete_frame_raises():
    with pytest.raises(Malformed):
        parse_frame(b"$HELLO*4")


# --- incremental parser -----------------------------------------------------


def test_parser_byte_at_a_time():
    parser = FrameParser()
    got = []
    for b in encode_frame("START"):
        frames, errors = parser.feed(bytes([b]))
        got += frames
        assert not errors
    assert [f.body for f in got] == ["START"]


def test_parser_multiple_frames_one_chunk():
    chunk = encode_frame("HELLO") + encode_frame("START") + encode_frame("GET STATUS")
    frames, errors = FrameParser().feed(chunk)
    assert [f.body for f in frames] == ["HELLO", "START", "GET STATUS"]
    assert not errors


def test_parser_reports_and_recovers_from_bad_checksum():
    parser = FrameParser()
    frames, errors = parser.feed(b"$SPRAY ON*69\n$PAUSE*52\n")
    assert [f.body for f in frames] == ["PAUSE"]
    assert len(errors) == 1 and isinstance(errors[0], BadChecksum)


def test_parser_counts_dropped_garbage():
    parser = FrameParser()
    frames, _ = parser.feed(b"noise!!$HELLO*42\n")
    assert [f.body for f in frames] == ["HELLO"]
    assert parser.dropped_bytes >= 7


def test_parser_restart_mid_frame():
    # a new '$' before the checksum abandons the current frame
    frames, errors = FrameParser().feed(b"$HEL$HELLO*42\n")
    assert [f.body for f in frames] == ["HELLO"]
    assert any(isinstance(e, Malformed) for e in errors)


def test_parser_oversize_unterminated_stream():
    parser = FrameParser()
    frames, errors = parser.feed(b"$" + b"A" * 300)
    assert frames == []
    assert any(isinstance(e, Oversize) for e in errors)
    # parser must still accept a valid frame afterwards
    frames, _ = parser.feed(encode_frame("HELLO"))
    assert [f.body for f in frames] == ["HELLO"]


def test_parser_never_crashes_on_fuzz():
    rng = np.random.default_rng(17)
    parser = FrameParser()
    for _ in range(200):
        chunk = rng.integers(0, 256, size=int(rng.integers(1, 120))).astype(np.uint8)
        parser.feed(chunk.tobytes())  # must not raise
    # resync: a clean frame parses after arbitrary garbage plus a terminator
    parser.feed(b"\n")
    frames, _ = parser.feed(encode_frame("ABORT"))
    assert [f.body for f in frames] == ["ABORT"]


# --- command grammar --------------------------------------------------------


def test_bare_verbs_parse():
    for verb in ("HELLO", "START", "PAUSE", "RESUME", "ABORT", "SHIFT"):
        cmd = parse_command(verb)
        assert cmd.kind == verb and cmd.verb == verb


def test_jog_parses_direction_and_distance():
    cmd = parse_command("JOG UP 25")
    assert cmd.kind == "JOG" and cmd.direction == "UP" and cmd.amount_mm == 25.0
    assert parse_command("JOG LEFT 2.5").amount_mm == 2.5


def test_jog_rejects_bad_args():
    for body in ("JOG", "JOG NORTH 5", "JOG UP", "JOG UP fast", "JOG UP 5 5"):
        with pytest.raises(CommandError) as err:
            parse_command(body)
        assert err.value.reason == "BADARG"
        assert err.value.verb == "JOG"


def test_spray_parses_on_off():
    assert parse_command("SPRAY ON").on is True
    assert parse_command("SPRAY OFF").on is False
    with pytest.raises(CommandError):
        parse_command("SPRAY MAYBE")


def test_set_parses_key_value():
    cmd = parse_command("SET telemetry_ms 250")
    assert cmd.kind == "SET" and cmd.key == "telemetry_ms" and cmd.value == "250"


def test_get_status_two_words():
    cmd = parse_command("GET STATUS")
    assert cmd.kind == "GET_STATUS"
    assert cmd.verb == "GET"
    with pytest.raises(CommandError):
        parse_command("GET TIME")


def test_unknown_verb_rejected():
    with pytest.raises(CommandError) as err:
        parse_command("DANCE")
    assert err.value.reason in NAK_REASONS


def test_bare_verb_with_extra_args_rejected():
    with pytest.raises(CommandError):
        parse_command("START NOW")


def test_command_body_round_trip():
    for body in ("HELLO", "START", "JOG DOWN 12.5", "SPRAY ON", "SPRAY OFF",
                 "SET margin_cm 7", "GET STATUS", "SHIFT"):
        assert command_body(parse_command(body)) == body


def test_responses_round_trip():
    assert ack_body("START") == "ACK START"
    assert nak_body("SPRAY", "SAFETY") == "NAK SPRAY SAFETY"
    assert parse_response("ACK START") == ("ACK", "START", None)
    assert parse_response("NAK SPRAY SAFETY") == ("NAK", "SPRAY", "SAFETY")
    with pytest.raises(ValueError):
        parse_response("TELEM t=0")


def test_nak_reasons_catalogue():
    assert set(NAK_REASONS) == {"ILLEGAL", "BUSY", "SAFETY", "BADARG"}


# --- telemetry --------------------------------------------------------------


def test_telemetry_body_idle_example():
    rec = TelemetryRecord(0, "IDLE", 0.0, 0.0, 0, 100.0, 0.0)
    assert telemetry_body(rec) == "TELEM t=0 mode=IDLE x=0 y=0 spray=0 ultra=100.0 cov=0.0"


def test_telemetry_coverage_fixture():
    rec = TelemetryRecord(1000, "DESCENDING", 95.0, 42.42, 1, 100.0, 45.0)
    body = telemetry_body(rec)
    assert body.endswith("cov=45.0")
    assert "x=95 " in body and "y=42.42 " in body and "spray=1" in body


def test_telemetry_round_trip():
    rec = TelemetryRecord(12340, "ASCENDING", 83.75, 12.5, 0, 98.6, 37.2)
    again = parse_telemetry(telemetry_body(rec))
    assert again == rec


def test_telemetry_frame_checksum_verifies():
    rec = TelemetryRecord(0, "IDLE", 0.0, 0.0, 0, 100.0, 0.0)
    frame = encode_telemetry(rec)
    assert parse_frame(encode_frame(frame)).body == frame.body


def test_telemetry_rejects_wrong_field_order():
    with pytest.raises(ValueError):
        parse_telemetry("TELEM mode=IDLE t=0 x=0 y=0 spray=0 ultra=100.0 cov=0.0")


def test_telemetry_rejects_bad_spray_flag():
    with pytest.raises(ValueError):
        parse_telemetry("TELEM t=0 mode=IDLE x=0 y=0 spray=2 ultra=100.0 cov=0.0")


def test_format_mm_strips_trailing_zeros():
    assert format_mm(95.0) == "95"
    assert format_mm(1.5) == "1.5"
    assert format_mm(12.345) == "12.35"  # two decimals max
    assert format_mm(-0.0001) == "0"  # no negative zero
