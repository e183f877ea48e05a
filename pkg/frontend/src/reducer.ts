// Console state machine. One socket, one reducer: every frame, socket
// edge and sent command flows through reduce(), and the view renders
// whatever comes out. Keeping this pure makes the whole operator UI
// testable without a browser or a bridge.

import { classify, CommandResponse, RigEvent, Telemetry } from "./messages.js";
import { emptyRaster, rasterEvent, rasterTelemetry, RasterState } from "./raster.js";

export type Connection = "idle" | "connecting" | "live" | "readonly" | "offline";

export type CommandStatus = "pending" | "ack" | "nak" | "unconfirmed";

export interface CommandLogEntry {
  seq: number;
  body: string;
  verb: string;
  sentAtMs: number;
  status: CommandStatus;
  reason: string | null; // NAK reason, verbatim
}

export interface ConsoleState {
  connection: Connection;
  telemetry: Telemetry | null; // latest record; the pose marker renders this
  mode: string; // latest known rig mode, "?" before the first report
  commandLog: CommandLogEntry[]; // newest last, capped
  obstacle: { active: boolean; detail: string };
  notice: string | null; // operator banner: NAK bodies verbatim, busy, fault
  raster: RasterState;
  events: RigEvent[]; // recent broadcasts, newest last, capped
  droppedTelemetry: number;
  frameErrors: number;
  unknownBodies: number;
  endOutcome: string | null;
}

export type Action =
  | { type: "connect" }
  | { type: "open" }
  | { type: "closed" }
  | { type: "sent"; body: string; seq: number; atMs: number }
  | { type: "frame"; body: string; atMs: number }
  | { type: "frame-error"; message: string }
  | { type: "clock"; atMs: number };

export const COMMAND_TIMEOUT_MS = 2000;
const LOG_CAP = 50;
const EVENT_CAP = 100;

export function initialState(): ConsoleState {
  return {
    connection: "idle",
    telemetry: null,
    mode: "?",
    commandLog: [],
    obstacle: { active: false, detail: "" },
    notice: null,
    raster: emptyRaster(),
    events: [],
    droppedTelemetry: 0,
    frameErrors: 0,
    unknownBodies: 0,
    endOutcome: null,
  };
}

/** Mark commands that waited past the response deadline as unconfirmed. */
function expirePending(log: CommandLogEntry[], atMs: number): CommandLogEntry[] {
  let changed = false;
  const next = log.map((entry) => {
    if (entry.status === "pending" && atMs - entry.sentAtMs >= COMMAND_TIMEOUT_MS) {
      changed = true;
      return { ...entry, status: "unconfirmed" as CommandStatus };
    }
    return entry;
  });
  return changed ? next : log;
}

/** Resolve the oldest pending command the response's verb names. */
function settle(
  log: CommandLogEntry[],
  response: CommandResponse,
): CommandLogEntry[] {
  const idx = log.findIndex(
    (entry) => entry.status === "pending" && entry.verb === response.verb,
  );
  if (idx === -1) {
    return log; // late or unsolicited; nothing to settle
  }
  const next = log.slice();
  const entry = log[idx] as CommandLogEntry;
  next[idx] = {
    ...entry,
    status: response.status === "ACK" ? "ack" : "nak",
    reason: response.reason,
  };
  return next;
}

function applyResponse(state: ConsoleState, response: CommandResponse, body: string): ConsoleState {
  let connection = state.connection;
  let notice = state.notice;
  if (response.verb === "HELLO") {
    if (response.status === "ACK") {
      connection = "live";
      notice = null;
    } else if (response.reason === "BUSY") {
      connection = "readonly";
      notice = "another operator owns the session: watching only";
    }
  } else if (response.status === "NAK") {
    notice = body; // surface the refusal verbatim
  }
  return { ...state, connection, notice, commandLog: settle(state.commandLog, response) };
}

function applyEvent(state: ConsoleState, event: RigEvent): ConsoleState {
  const events = [...state.events, event].slice(-EVENT_CAP);
  let next: ConsoleState = { ...state, events, raster: rasterEvent(state.raster, event) };
  if (event.kind === "MODE") {
    const arrow = event.detail.indexOf("->");
    if (arrow !== -1) {
      next = { ...next, mode: event.detail.slice(arrow + 2) };
    }
  } else if (event.kind === "OBSTACLE") {
    next = {
      ...next,
      obstacle: { active: event.detail.startsWith("HOLD"), detail: event.detail },
    };
  } else if (event.kind === "FAULT") {
    next = { ...next, notice: `FAULT: ${event.detail}` };
  } else if (event.kind === "END") {
    next = { ...next, endOutcome: event.detail };
  }
  return next;
}

function applyFrame(state: ConsoleState, body: string, atMs: number): ConsoleState {
  const base = { ...state, commandLog: expirePending(state.commandLog, atMs) };
  const msg = classify(body);
  switch (msg.type) {
    case "telemetry":
      return {
        ...base,
        telemetry: msg.telemetry,
        mode: msg.telemetry.mode,
        raster: rasterTelemetry(base.raster, msg.telemetry),
      };
    case "response":
      return applyResponse(base, msg.response, body);
    case "event":
      return applyEvent(base, msg.event);
    case "unknown":
      if (body.startsWith("TELEM")) {
        return { ...base, droppedTelemetry: base.droppedTelemetry + 1 };
      }
      return { ...base, unknownBodies: base.unknownBodies + 1 };
  }
}

export function reduce(state: ConsoleState, action: Action): ConsoleState {
  switch (action.type) {
    case "connect":
      return { ...state, connection: "connecting" };
    case "open":
      return state; // live only after the hello handshake answers
    case "closed":
      return {
        ...state,
        connection: "offline",
        commandLog: state.commandLog.map((entry) =>
          entry.status === "pending"
            ? { ...entry, status: "unconfirmed" as CommandStatus }
            : entry,
        ),
      };
    case "sent": {
      const entry: CommandLogEntry = {
        seq: action.seq,
        body: action.body,
        verb: action.body.split(" ")[0] as string,
        sentAtMs: action.atMs,
        status: "pending",
        reason: null,
      };
      const log = [...expirePending(state.commandLog, action.atMs), entry];
      return { ...state, commandLog: log.slice(-LOG_CAP) };
    }
    case "frame":
      return applyFrame(state, action.body, action.atMs);
    case "frame-error":
      return { ...state, frameErrors: state.frameErrors + 1 };
    case "clock":
      return { ...state, commandLog: expirePending(state.commandLog, action.atMs) };
  }
}
