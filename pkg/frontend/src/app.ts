// Thin DOM shell. Everything interesting lives in the reducer and the
// session; this file only wires buttons to command bodies and paints the
// latest state into the page.

import { buttonStates, ButtonId } from "./buttons.js";
import { commands, JogDirection } from "./commands.js";
import { ConsoleState } from "./reducer.js";
import { renderCells } from "./raster.js";
import { ConsoleSession, SocketLike } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function defaultUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const host = location.hostname || "localhost";
  return `${scheme}://${host}:8766/link`;
}

const urlInput = el<HTMLInputElement>("bridge-url");
urlInput.value = defaultUrl();

let session: ConsoleSession | null = null;
let rafPending = false;

const RASTER_COLS = 96;
const RASTER_ROWS = 96;

function render(state: ConsoleState): void {
  el("connection").textContent = state.connection;
  el("connection").dataset["state"] = state.connection;
  el("mode").textContent = state.mode;
  el("mode").dataset["mode"] = state.mode;

  const t = state.telemetry;
  el("pose").textContent =
    t === null ? "x=? y=?" : `x=${t.xMm.toFixed(1)} y=${t.yMm.toFixed(1)} mm`;
  el("spray").textContent = t !== null && t.spray === 1 ? "SPRAYING" : "dry";
  el("spray").dataset["on"] = t !== null && t.spray === 1 ? "1" : "0";
  el("ultra").textContent = t === null ? "?" : `${t.ultraCm.toFixed(1)} cm`;
  el("ultra").dataset["warn"] = state.obstacle.active ? "1" : "0";

  const pct = state.raster.coveragePct;
  el("gauge-fill").style.width = `${Math.min(100, Math.max(0, pct))}%`;
  el("gauge-label").textContent = `${pct.toFixed(1)}%`;
  el("strokes").textContent =
    `${state.raster.strokesDone} strokes, ${state.raster.bursts} bursts`;

  const banner = el("obstacle-banner");
  banner.hidden = !state.obstacle.active;
  banner.textContent = state.obstacle.active
    ? `OBSTACLE ${state.obstacle.detail}`
    : "";

  const notice = el("notice");
  notice.hidden = state.notice === null;
  notice.textContent = state.notice ?? "";

  el("outcome").textContent = state.endOutcome ?? "";
  el("counters").textContent =
    `${state.frameErrors} frame errors, ${state.droppedTelemetry} dropped telemetry`;

  const enabled = buttonStates(state.connection, state.mode);
  for (const id of Object.keys(enabled) as ButtonId[]) {
    const button = document.querySelector<HTMLButtonElement>(`[data-cmd="${id}"]`);
    if (button !== null) {
      button.disabled = !enabled[id];
    }
  }
  for (const jogButton of document.querySelectorAll<HTMLButtonElement>("[data-jog]")) {
    jogButton.disabled = !enabled.jog;
  }

  const log = el("command-log");
  log.textContent = state.commandLog
    .slice(-12)
    .map((entry) => {
      const tag =
        entry.status === "nak"
          ? `NAK ${entry.reason ?? ""}`
          : entry.status.toUpperCase();
      return `${entry.body}  [${tag}]`;
    })
    .reverse()
    .join("\n");

  const eventLog = el("event-log");
  eventLog.textContent = state.events
    .slice(-12)
    .map((ev) => `${ev.kind} ${ev.detail}`)
    .reverse()
    .join("\n");

  if (!rafPending) {
    rafPending = true;
    requestAnimationFrame(() => {
      rafPending = false;
      drawRaster(state);
    });
  }
}

function drawRaster(state: ConsoleState): void {
  const canvas = el<HTMLCanvasElement>("wall");
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    return;
  }
  const { width, height } = canvas;
  ctx.fillStyle = "#1b1f27";
  ctx.fillRect(0, 0, width, height);
  const cells = renderCells(state.raster, RASTER_COLS, RASTER_ROWS);
  const cw = width / RASTER_COLS;
  const ch = height / RASTER_ROWS;
  ctx.fillStyle = "#3fa7ff";
  for (let row = 0; row < RASTER_ROWS; row++) {
    const line = cells[row] as number[];
    for (let col = 0; col < RASTER_COLS; col++) {
      if (line[col] === 1) {
        ctx.fillRect(col * cw, row * ch, Math.ceil(cw), Math.ceil(ch));
      }
    }
  }
  // Pose marker from the latest telemetry only.
  const t = state.telemetry;
  const e = state.raster.extent;
  if (t !== null && e !== null && e.maxX > e.minX && e.maxY > e.minY) {
    const px = ((t.xMm - e.minX) / (e.maxX - e.minX)) * width;
    const py = ((e.maxY - t.yMm) / (e.maxY - e.minY)) * height;
    ctx.strokeStyle = t.spray === 1 ? "#ffd23f" : "#e8e8e8";
    ctx.lineWidth = 2;
    ctx.strokeRect(px - 4, py - 4, 8, 8);
  }
}

function sendBody(body: string): void {
  session?.send(body);
}

function jogAmount(): number {
  const value = Number(el<HTMLSelectElement>("jog-mm").value);
  return Number.isFinite(value) && value > 0 ? value : 1;
}

const BODY_BY_BUTTON: Record<ButtonId, () => string> = {
  start: commands.start,
  pause: commands.pause,
  resume: commands.resume,
  abort: commands.abort,
  sprayOn: commands.sprayOn,
  sprayOff: commands.sprayOff,
  shift: commands.shift,
  jog: () => commands.jog("UP", jogAmount()), // unused: jog has its own pads
};

for (const button of document.querySelectorAll<HTMLButtonElement>("[data-cmd]")) {
  const id = button.dataset["cmd"] as ButtonId;
  button.addEventListener("click", () => {
    sendBody(BODY_BY_BUTTON[id]());
  });
}

for (const button of document.querySelectorAll<HTMLButtonElement>("[data-jog]")) {
  button.addEventListener("click", () => {
    sendBody(commands.jog(button.dataset["jog"] as JogDirection, jogAmount()));
  });
}

el("connect").addEventListener("click", () => {
  session?.stop();
  session = new ConsoleSession({
    url: urlInput.value,
    makeSocket: (url) => new WebSocket(url) as unknown as SocketLike,
    onChange: render,
  });
  session.start();
});
