// Command button gating. A pure function of (connection, rig mode) so the
// whole matrix is testable as data; it mirrors the rig's own legality
// rules, which still NAK anything a stale view lets through.

import { Connection } from "./reducer.js";

export type ButtonId =
  | "start"
  | "pause"
  | "resume"
  | "abort"
  | "sprayOn"
  | "sprayOff"
  | "shift"
  | "jog";

// Modes PAUSE interrupts.
const ACTIVE_MODES = new Set([
  "READY",
  "DESCENDING",
  "ASCENDING",
  "SHIFTING_COLUMN",
  "SHIFTING_WALL",
  "OBSTACLE_HOLD",
]);

export function buttonStates(
  connection: Connection,
  mode: string,
): Record<ButtonId, boolean> {
  const live = connection === "live";
  return {
    start: live && mode === "IDLE",
    pause: live && ACTIVE_MODES.has(mode),
    resume: live && mode === "PAUSED",
    abort: live,
    sprayOn: live && mode === "DESCENDING",
    sprayOff: live,
    shift: live && (mode === "READY" || mode === "DONE"),
    jog: live && (mode === "IDLE" || mode === "PAUSED"),
  };
}
