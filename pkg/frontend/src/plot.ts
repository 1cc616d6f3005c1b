/** Canvas scatter/line plot: pure layout math plus guarded drawing.
 *
 * The geometry functions are pure so hit-testing works (and is testable)
 * without a 2D context; drawing is skipped when the environment cannot
 * provide one.
 */

import type { Columns } from "./types.js";

export const HIT_RADIUS_PX = 6;

export interface PlotGeometry {
  width: number;
  height: number;
  marginLeft: number;
  marginRight: number;
  marginTop: number;
  marginBottom: number;
}

export const DEFAULT_GEOMETRY: PlotGeometry = {
  width: 640,
  height: 320,
  marginLeft: 64,
  marginRight: 16,
  marginTop: 16,
  marginBottom: 28,
};

export interface PlotPoint {
  x: number;
  y: number;
  row: number;
  series: string;
  flagged: boolean;
}

const SERIES_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];

function extent(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (!isFinite(lo) || !isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  return [lo, hi];
}

/** Pixel positions for every row of the plot's source columns. */
export function layoutPoints(
  columns: Columns,
  xField: string,
  yField: string,
  seriesField: string,
  flagField: string,
  geom: PlotGeometry = DEFAULT_GEOMETRY,
): PlotPoint[] {
  const xs = (columns[xField] ?? []) as number[];
  const ys = (columns[yField] ?? []) as number[];
  if (xs.length === 0) return [];
  const series = (seriesField && (columns[seriesField] as string[])) || xs.map(() => "");
  const flags = (flagField && (columns[flagField] as boolean[])) || xs.map(() => false);
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const innerW = geom.width - geom.marginLeft - geom.marginRight;
  const innerH = geom.height - geom.marginTop - geom.marginBottom;
  return xs.map((x, i) => ({
    x: geom.marginLeft + ((x - x0) / (x1 - x0)) * innerW,
    y: geom.marginTop + (1 - (ys[i] - y0) / (y1 - y0)) * innerH,
    row: i,
    series: String(series[i] ?? ""),
    flagged: Boolean(flags[i]),
  }));
}

/** Index of the nearest point within the hit radius, or null. */
export function hitTest(points: PlotPoint[], px: number, py: number, radius = HIT_RADIUS_PX): number | null {
  let best: number | null = null;
  let bestD = radius * radius;
  for (const p of points) {
    const d = (p.x - px) ** 2 + (p.y - py) ** 2;
    if (d <= bestD) {
      bestD = d;
      best = p.row;
    }
  }
  return best;
}

export function seriesColor(names: string[], name: string): string {
  const idx = Math.max(0, names.indexOf(name));
  return SERIES_COLORS[idx % SERIES_COLORS.length];
}

export function drawPlot(
  canvas: HTMLCanvasElement,
  points: PlotPoint[],
  selected: number[],
  title: string,
  connectSeries: boolean,
  geom: PlotGeometry = DEFAULT_GEOMETRY,
): void {
  let ctx: CanvasRenderingContext2D | null = null;
  try {
    ctx = canvas.getContext("2d");
  } catch {
    ctx = null; // jsdom and friends: layout math still ran, skip pixels
  }
  if (!ctx) return;

  ctx.clearRect(0, 0, geom.width, geom.height);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(geom.marginLeft, geom.marginTop, geom.width - geom.marginLeft - geom.marginRight,
    geom.height - geom.marginTop - geom.marginBottom);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.fillText(title, geom.marginLeft, 12);

  const names = [...new Set(points.map((p) => p.series))].sort();
  for (const name of names) {
    const run = points.filter((p) => p.series === name);
    const color = seriesColor(names, name);
    if (connectSeries && run.length > 1) {
      ctx.strokeStyle = color;
      ctx.beginPath();
      run.forEach((p, i) => (i === 0 ? ctx!.moveTo(p.x, p.y) : ctx!.lineTo(p.x, p.y)));
      ctx.stroke();
    }
    for (const p of run) {
      ctx.beginPath();
      ctx.arc(p.x, p.y, 4, 0, Math.PI * 2);
      if (p.flagged) {
        ctx.strokeStyle = "#d62728";
        ctx.lineWidth = 2;
        ctx.stroke();
        ctx.lineWidth = 1;
      } else {
        ctx.fillStyle = color;
        ctx.fill();
      }
      if (selected.includes(p.row)) {
        ctx.strokeStyle = "#000";
        ctx.beginPath();
        ctx.arc(p.x, p.y, 7, 0, Math.PI * 2);
        ctx.stroke();
      }
    }
  }

  // series legend, top-right
  names.forEach((name, i) => {
    if (!name) return;
    ctx!.fillStyle = seriesColor(names, name);
    ctx!.fillText(name, geom.width - geom.marginRight - 40, geom.marginTop + 14 * (i + 1));
  });
}
