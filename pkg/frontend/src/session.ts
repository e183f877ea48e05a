// Socket lifecycle around the reducer: dial, introduce ourselves, keep a
// parser on the inbound text, resend HELLO after drops with a capped
// backoff, and expire unanswered commands. The socket and clock are
// injectable so the whole thing runs under test without a browser.

import { encodeFrame, FrameParser } from "./frames.js";
import { commands } from "./commands.js";
import {
  Action,
  ConsoleState,
  initialState,
  reduce,
  COMMAND_TIMEOUT_MS,
} from "./reducer.js";

/** The slice of the WebSocket surface the session uses. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

export interface SessionOptions {
  url: string;
  makeSocket: (url: string) => SocketLike;
  now?: () => number;
  schedule?: (fn: () => void, ms: number) => unknown;
  cancel?: (handle: unknown) => void;
  onChange?: (state: ConsoleState) => void;
  baseBackoffMs?: number;
  maxBackoffMs?: number;
}

export class ConsoleSession {
  state: ConsoleState = initialState();

  private readonly opts: Required<Pick<SessionOptions, "url" | "makeSocket">> &
    SessionOptions;
  private readonly now: () => number;
  private readonly schedule: (fn: () => void, ms: number) => unknown;
  private readonly cancel: (handle: unknown) => void;
  private socket: SocketLike | null = null;
  private parser = new FrameParser();
  private seq = 0;
  private attempts = 0;
  private stopped = false;
  private timers = new Set<unknown>();

  constructor(opts: SessionOptions) {
    this.opts = opts;
    this.now = opts.now ?? (() => Date.now());
    this.schedule = opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.cancel = opts.cancel ?? ((h) => clearTimeout(h as number));
  }

  /** Dial the bridge (or re-dial immediately, resetting backoff). */
  start(): void {
    this.stopped = false;
    this.attempts = 0;
    this.connect();
  }

  /** Close for good: no reconnect, all timers cancelled. */
  stop(): void {
    this.stopped = true;
    for (const t of this.timers) {
      this.cancel(t);
    }
    this.timers.clear();
    const s = this.socket;
    this.socket = null;
    if (s !== null) {
      s.onopen = s.onmessage = s.onclose = s.onerror = null;
      try {
        s.close();
      } catch {
        // already dead
      }
    }
  }

  /**
   * Frame and send one command body. Returns the sequence number, or null
   * when there is no open socket to put it on.
   */
  send(body: string): number | null {
    if (this.socket === null) {
      return null;
    }
    let wire: string;
    try {
      wire = encodeFrame(body);
    } catch {
      return null; // grammar-illegal body: never goes on the wire
    }
    try {
      this.socket.send(wire);
    } catch {
      return null;
    }
    const seq = ++this.seq;
    this.dispatch({ type: "sent", body, seq, atMs: this.now() });
    // One-shot expiry check just past the deadline.
    this.after(COMMAND_TIMEOUT_MS + 50, () => {
      this.dispatch({ type: "clock", atMs: this.now() });
    });
    return seq;
  }

  private dispatch(action: Action): void {
    this.state = reduce(this.state, action);
    this.opts.onChange?.(this.state);
  }

  private after(ms: number, fn: () => void): void {
    const handle = this.schedule(() => {
      this.timers.delete(handle);
      if (!this.stopped) {
        fn();
      }
    }, ms);
    this.timers.add(handle);
  }

  private connect(): void {
    if (this.stopped) {
      return;
    }
    this.parser = new FrameParser();
    this.dispatch({ type: "connect" });
    let socket: SocketLike;
    try {
      socket = this.opts.makeSocket(this.opts.url);
    } catch {
      this.onDrop();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.dispatch({ type: "open" });
      this.send(commands.hello());
    };
    socket.onmessage = (ev) => {
      const text = typeof ev.data === "string" ? ev.data : String(ev.data);
      this.onText(text);
    };
    socket.onclose = () => {
      this.onDrop();
    };
    socket.onerror = () => {
      // the close handler does the bookkeeping
    };
  }

  private onText(text: string): void {
    const { frames, errors } = this.parser.feed(text);
    const atMs = this.now();
    for (const message of errors) {
      this.dispatch({ type: "frame-error", message });
    }
    for (const body of frames) {
      this.dispatch({ type: "frame", body, atMs });
    }
    if (this.state.connection === "live") {
      this.attempts = 0; // handshake done: next drop backs off from scratch
    }
  }

  private onDrop(): void {
    if (this.socket !== null) {
      this.socket.onopen = this.socket.onmessage = null;
      this.socket.onclose = this.socket.onerror = null;
      this.socket = null;
    }
    if (this.stopped) {
      return;
    }
    this.dispatch({ type: "closed" });
    const base = this.opts.baseBackoffMs ?? 500;
    const cap = this.opts.maxBackoffMs ?? 8000;
    const delay = Math.min(base * 2 ** this.attempts, cap);
    this.attempts += 1;
    this.after(delay, () => {
      this.connect();
    });
  }
}
