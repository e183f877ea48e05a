// Framed link codec, the browser-side twin of the rig's wire format.
//
// A frame is '$' + body + '*' + two uppercase hex digits + '\n'; the hex
// digits are the XOR fold of the body characters. Bodies are printable
// ASCII without '$' or '*', non-empty, and a whole frame never exceeds
// 256 bytes. Frames arrive over WebSocket as text, one or more per
// message; the parser resynchronizes at the next '$' after any damage.

export const FRAME_MAX = 256;
export const BODY_MAX = FRAME_MAX - 5; // minus '$', '*', two hex digits, newline

export class FrameCodecError extends Error {}

/** XOR fold of the body characters as two uppercase hex digits. */
export function checksum(body: string): string {
  let acc = 0;
  for (let i = 0; i < body.length; i++) {
    acc ^= body.charCodeAt(i);
  }
  return acc.toString(16).toUpperCase().padStart(2, "0");
}

/** Why `body` cannot go on the wire, or null when it can. */
export function bodyProblem(body: string): string | null {
  if (body.length === 0) {
    return "empty body";
  }
  if (body.length > BODY_MAX) {
    return `body longer than ${BODY_MAX} bytes`;
  }
  for (let i = 0; i < body.length; i++) {
    const c = body.charCodeAt(i);
    if (c < 0x20 || c > 0x7e || body[i] === "$" || body[i] === "*") {
      return `forbidden character ${JSON.stringify(body[i])}`;
    }
  }
  return null;
}

/** Serialize one body to wire text; throws on a grammar-illegal body. */
export function encodeFrame(body: string): string {
  const problem = bodyProblem(body);
  if (problem !== null) {
    throw new FrameCodecError(problem);
  }
  return `$${body}*${checksum(body)}\n`;
}

export interface FeedResult {
  frames: string[]; // verified bodies, in stream order
  errors: string[]; // human-readable reasons, in stream order
}

const HEX_PAIR = /^[0-9A-F]{2}$/;

/**
 * Incremental parser for a character stream carrying frames.
 *
 * feed() never throws; damaged spans come back as error strings and the
 * characters outside any accepted frame are counted in droppedBytes.
 */
export class FrameParser {
  droppedBytes = 0;
  private buf = "";

  feed(chunk: string): FeedResult {
    this.buf += chunk;
    const frames: string[] = [];
    const errors: string[] = [];
    for (;;) {
      const start = this.buf.indexOf("$");
      if (start === -1) {
        this.droppedBytes += this.buf.length;
        this.buf = "";
        break;
      }
      if (start > 0) {
        this.droppedBytes += start;
        this.buf = this.buf.slice(start);
      }
      const restart = this.buf.indexOf("$", 1);
      const star = this.buf.indexOf("*", 1);
      if (restart !== -1 && (star === -1 || restart < star)) {
        // A new frame began before this one terminated.
        errors.push("frame restarted before '*'");
        this.droppedBytes += restart;
        this.buf = this.buf.slice(restart);
        continue;
      }
      if (star === -1) {
        if (this.buf.length > FRAME_MAX) {
          errors.push(`no terminator within ${FRAME_MAX} bytes`);
          this.droppedBytes += this.buf.length;
          this.buf = "";
          break;
        }
        break; // incomplete: wait for more characters
      }
      if (this.buf.length < star + 3) {
        break; // checksum digits not in yet
      }
      const body = this.buf.slice(1, star);
      const cks = this.buf.slice(star + 1, star + 3);
      let consumed = star + 3;
      if (this.buf.charAt(consumed) === "\n") {
        consumed += 1;
      }
      this.buf = this.buf.slice(consumed);

      const problem = bodyProblem(body);
      if (problem !== null) {
        errors.push(problem);
        continue;
      }
      if (!HEX_PAIR.test(cks)) {
        errors.push(`bad checksum field ${JSON.stringify(cks)}`);
        continue;
      }
      const want = checksum(body);
      if (cks !== want) {
        errors.push(`checksum ${cks} != ${want} for body ${JSON.stringify(body)}`);
        continue;
      }
      frames.push(body);
    }
    return { frames, errors };
  }
}
