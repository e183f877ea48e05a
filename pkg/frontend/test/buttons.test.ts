// Button gating is a pure function of (connection, mode); the whole
// matrix is asserted as data so any drift is visible in the diff.

import { describe, expect, it } from "vitest";

import { buttonStates } from "../src/buttons.js";
import { Connection } from "../src/reducer.js";

const MODES = [
  "IDLE",
  "READY",
  "DESCENDING",
  "ASCENDING",
  "SHIFTING_COLUMN",
  "SHIFTING_WALL",
  "OBSTACLE_HOLD",
  "PAUSED",
  "DONE",
  "FAULT",
] as const;

describe("buttonStates", () => {
  it("disables everything unless the session owns the rig", () => {
    const others: Connection[] = ["idle", "connecting", "readonly", "offline"];
    for (const connection of others) {
      for (const mode of MODES) {
        const states = buttonStates(connection, mode);
        expect(Object.values(states).every((on) => !on), `${connection}/${mode}`).toBe(true);
      }
    }
  });

  it("matches the rig's command legality when live", () => {
    const matrix: Record<string, string[]> = {};
    for (const mode of MODES) {
      const states = buttonStates("live", mode);
      matrix[mode] = Object.entries(states)
        .filter(([, on]) => on)
        .map(([id]) => id)
        .sort();
    }
    expect(matrix).toEqual({
      IDLE: ["abort", "jog", "sprayOff", "start"],
      READY: ["abort", "pause", "shift", "sprayOff"],
      DESCENDING: ["abort", "pause", "sprayOff", "sprayOn"],
      ASCENDING: ["abort", "pause", "sprayOff"],
      SHIFTING_COLUMN: ["abort", "pause", "sprayOff"],
      SHIFTING_WALL: ["abort", "pause", "sprayOff"],
      OBSTACLE_HOLD: ["abort", "pause", "sprayOff"],
      PAUSED: ["abort", "jog", "resume", "sprayOff"],
      DONE: ["abort", "shift", "sprayOff"],
      FAULT: ["abort", "sprayOff"],
    });
  });

  it("an unknown mode leaves only the always-safe commands", () => {
    const states = buttonStates("live", "?");
    expect(states.abort).toBe(true);
    expect(states.sprayOff).toBe(true);
    expect(states.start).toBe(false);
    expect(states.sprayOn).toBe(false);
  });
});
