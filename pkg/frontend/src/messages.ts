// Typed views of frame bodies: telemetry records, command responses and
// broadcast events. Parsers return null instead of throwing so a stream
// with junk in it degrades to dropped-line counters, never a crash.

export interface Telemetry {
  tMs: number;
  mode: string;
  xMm: number;
  yMm: number;
  spray: 0 | 1;
  ultraCm: number;
  coveragePct: number;
}

export interface CommandResponse {
  status: "ACK" | "NAK";
  verb: string;
  reason: string | null; // NAK only: ILLEGAL | BUSY | SAFETY | BADARG
}

export interface RigEvent {
  kind: string; // MODE | OBSTACLE | FAULT | WALL | COLUMN | BURST | END
  detail: string;
}

export type Inbound =
  | { type: "telemetry"; telemetry: Telemetry }
  | { type: "response"; response: CommandResponse }
  | { type: "event"; event: RigEvent }
  | { type: "unknown"; body: string };

const TELEM_KEYS = ["t", "mode", "x", "y", "spray", "ultra", "cov"] as const;
const INT = /^[+-]?\d+$/;
const FLOAT = /^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$/;

/** Parse a fixed-field-order telemetry body, or null on any shape violation. */
export function parseTelemetry(body: string): Telemetry | null {
  const parts = body.split(" ");
  if (parts.length !== 1 + TELEM_KEYS.length || parts[0] !== "TELEM") {
    return null;
  }
  const vals: Record<string, string> = {};
  for (let i = 0; i < TELEM_KEYS.length; i++) {
    const part = parts[i + 1] as string;
    const eq = part.indexOf("=");
    if (eq === -1) {
      return null;
    }
    const key = part.slice(0, eq);
    const value = part.slice(eq + 1);
    if (key !== TELEM_KEYS[i] || value === "") {
      return null;
    }
    vals[key] = value;
  }
  const t = vals["t"] as string;
  const spray = vals["spray"] as string;
  if (!INT.test(t) || !INT.test(spray)) {
    return null;
  }
  const sprayNum = parseInt(spray, 10);
  if (sprayNum !== 0 && sprayNum !== 1) {
    return null;
  }
  const floats: number[] = [];
  for (const key of ["x", "y", "ultra", "cov"]) {
    const raw = vals[key] as string;
    if (!FLOAT.test(raw)) {
      return null;
    }
    floats.push(Number(raw));
  }
  return {
    tMs: parseInt(t, 10),
    mode: vals["mode"] as string,
    xMm: floats[0] as number,
    yMm: floats[1] as number,
    spray: sprayNum,
    ultraCm: floats[2] as number,
    coveragePct: floats[3] as number,
  };
}

/** Parse an "ACK <verb>" / "NAK <verb> <reason>" body, or null. */
export function parseResponse(body: string): CommandResponse | null {
  const parts = body.split(/\s+/).filter((p) => p !== "");
  if (parts.length === 2 && parts[0] === "ACK") {
    return { status: "ACK", verb: parts[1] as string, reason: null };
  }
  if (parts.length === 3 && parts[0] === "NAK") {
    return { status: "NAK", verb: parts[1] as string, reason: parts[2] as string };
  }
  return null;
}

const EVENT_RE = /^EVENT (\S+) (.*)$/;

/** Parse an "EVENT <KIND> <detail>" broadcast body, or null. */
export function parseEvent(body: string): RigEvent | null {
  const m = EVENT_RE.exec(body);
  if (m === null) {
    return null;
  }
  return { kind: m[1] as string, detail: m[2] as string };
}

/** Sort one inbound frame body into its message type. */
export function classify(body: string): Inbound {
  if (body.startsWith("TELEM ")) {
    const telemetry = parseTelemetry(body);
    if (telemetry !== null) {
      return { type: "telemetry", telemetry };
    }
  } else if (body.startsWith("ACK") || body.startsWith("NAK")) {
    const response = parseResponse(body);
    if (response !== null) {
      return { type: "response", response };
    }
  } else if (body.startsWith("EVENT ")) {
    const event = parseEvent(body);
    if (event !== null) {
      return { type: "event", event };
    }
  }
  return { type: "unknown", body };
}
