// Client-side wall picture. The bridge never streams the paint grid, so
// the console rebuilds one from what it does get: the pose and spray bit
// in each telemetry record, the coverage percentage, and the stroke
// progress events. Each column the nozzle sprayed in becomes a vertical
// painted span; the wall extent is inferred from everywhere the rig has
// been.

import { Telemetry, RigEvent } from "./messages.js";

export interface ColumnSpan {
  xMm: number;
  topMm: number; // highest sprayed y seen in this column
  bottomMm: number; // lowest sprayed y seen in this column
}

export interface Extent {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

export interface RasterState {
  columns: Record<string, ColumnSpan>; // keyed by x to 0.01 mm
  extent: Extent | null;
  coveragePct: number;
  strokesDone: number;
  bursts: number;
}

export function emptyRaster(): RasterState {
  return { columns: {}, extent: null, coveragePct: 0, strokesDone: 0, bursts: 0 };
}

function growExtent(extent: Extent | null, x: number, y: number): Extent {
  if (extent === null) {
    return { minX: x, maxX: x, minY: y, maxY: y };
  }
  return {
    minX: Math.min(extent.minX, x),
    maxX: Math.max(extent.maxX, x),
    minY: Math.min(extent.minY, y),
    maxY: Math.max(extent.maxY, y),
  };
}

/** Fold one telemetry record into the picture. */
export function rasterTelemetry(r: RasterState, t: Telemetry): RasterState {
  const extent = growExtent(r.extent, t.xMm, t.yMm);
  let columns = r.columns;
  if (t.spray === 1) {
    const key = t.xMm.toFixed(2);
    const prior = columns[key];
    const span: ColumnSpan =
      prior === undefined
        ? { xMm: t.xMm, topMm: t.yMm, bottomMm: t.yMm }
        : {
            xMm: prior.xMm,
            topMm: Math.max(prior.topMm, t.yMm),
            bottomMm: Math.min(prior.bottomMm, t.yMm),
          };
    columns = { ...columns, [key]: span };
  }
  return { ...r, columns, extent, coveragePct: t.coveragePct };
}

/** Fold one broadcast event into the picture. */
export function rasterEvent(r: RasterState, ev: RigEvent): RasterState {
  if (ev.kind === "COLUMN") {
    return { ...r, strokesDone: r.strokesDone + 1 };
  }
  if (ev.kind === "BURST") {
    return { ...r, bursts: r.bursts + 1 };
  }
  if (ev.kind === "WALL" && ev.detail.startsWith("shifted")) {
    // New facade: the paint picture starts over, the gauge resets itself
    // with the next telemetry record.
    return { ...emptyRaster(), coveragePct: r.coveragePct };
  }
  return r;
}

/**
 * Rasterize the column spans onto a cols x rows grid, row 0 at the top.
 * Cell values are 0 or 1; the caller maps them to pixels.
 */
export function renderCells(r: RasterState, cols: number, rows: number): number[][] {
  const grid: number[][] = [];
  for (let row = 0; row < rows; row++) {
    grid.push(new Array<number>(cols).fill(0));
  }
  const e = r.extent;
  if (e === null || cols < 1 || rows < 1) {
    return grid;
  }
  const width = Math.max(e.maxX - e.minX, 1e-9);
  const height = Math.max(e.maxY - e.minY, 1e-9);
  for (const key of Object.keys(r.columns)) {
    const span = r.columns[key] as ColumnSpan;
    const col = Math.min(
      cols - 1,
      Math.max(0, Math.floor(((span.xMm - e.minX) / width) * cols)),
    );
    // y grows upward on the wall; row 0 renders the wall top.
    const rowTop = Math.floor(((e.maxY - span.topMm) / height) * rows);
    const rowBottom = Math.floor(((e.maxY - span.bottomMm) / height) * rows);
    const lo = Math.max(0, Math.min(rows - 1, rowTop));
    const hi = Math.max(0, Math.min(rows - 1, rowBottom));
    for (let row = lo; row <= hi; row++) {
      (grid[row] as number[])[col] = 1;
    }
  }
  return grid;
}
