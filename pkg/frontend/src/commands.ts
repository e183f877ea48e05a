// Builders for every command body the console can put on the wire. Each
// returns a body the link grammar accepts; the fixture suite holds them
// byte-for-byte against the rig's own encoder.

export type JogDirection = "UP" | "DOWN" | "LEFT" | "RIGHT";

/** Millimetres with up to two decimals, trailing zeros stripped. */
export function formatMm(v: number): string {
  let s = v.toFixed(2);
  if (s.includes(".")) {
    s = s.replace(/0+$/, "").replace(/\.$/, "");
  }
  return s === "-0" ? "0" : s;
}

export const commands = {
  hello: (): string => "HELLO",
  start: (): string => "START",
  pause: (): string => "PAUSE",
  resume: (): string => "RESUME",
  abort: (): string => "ABORT",
  shift: (): string => "SHIFT",
  sprayOn: (): string => "SPRAY ON",
  sprayOff: (): string => "SPRAY OFF",
  getStatus: (): string => "GET STATUS",
  jog: (direction: JogDirection, mm: number): string =>
    `JOG ${direction} ${formatMm(mm)}`,
  set: (key: string, value: string): string => `SET ${key} ${value}`,
};

/** The token a response names for a given command body. */
export function commandVerb(body: string): string {
  return body.split(" ")[0] as string;
}
