/**
 * Minimal deterministic SVG line-chart renderer.
 *
 * No DOM, no randomness: the same series always produce the same markup,
 * so figures are diffable and the data path is unit-testable.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Marker {
  x: number;
  y: number;
  label: string;
}

export interface ChartOptions {
  title?: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
  markers?: Marker[];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { top: 34, right: 16, bottom: 46, left: 72 };

function fmt(value: number): string {
  // fixed-notation compact form keeps the markup stable across platforms
  return Number(value.toPrecision(6)).toString();
}

/** Round limits outward to 1-2-5 style tick steps. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.1 : 1;
    lo -= pad;
    hi += pad;
  }
  const span = hi - lo;
  const rawStep = span / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

interface Extent {
  lo: number;
  hi: number;
}

function extent(values: number[][]): Extent {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of values) {
    for (const v of arr) {
      if (Number.isFinite(v)) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return { lo, hi };
}

/** Pixel coordinates of one series inside the plot box (exported for tests). */
export function scalePoints(
  xs: number[],
  ys: number[],
  xe: Extent,
  ye: Extent,
  plotW: number,
  plotH: number,
): Array<[number, number]> {
  const sx = (v: number) => ((v - xe.lo) / (xe.hi - xe.lo)) * plotW;
  const sy = (v: number) => plotH - ((v - ye.lo) / (ye.hi - ye.lo)) * plotH;
  const out: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    out.push([sx(xs[i]), sy(ys[i])]);
  }
  return out;
}

export function renderChart(series: Series[], options: ChartOptions): string {
  if (series.length === 0) {
    throw new Error("renderChart: empty series list");
  }
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xe = extent(series.map((s) => s.x));
  const ye = extent(series.map((s) => s.y));
  // headroom so curves do not sit on the frame
  const yPad = (ye.hi - ye.lo) * 0.05;
  ye.lo -= yPad;
  ye.hi += yPad;

  const sx = (v: number) => MARGIN.left + ((v - xe.lo) / (xe.hi - xe.lo)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - ye.lo) / (ye.hi - ye.lo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">` +
        `${escapeXml(options.title)}</text>`,
    );
  }

  // frame and ticks
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const tick of niceTicks(xe.lo, xe.hi)) {
    const px = sx(tick);
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top + plotH}" x2="${fmt(px)}" ` +
        `y2="${MARGIN.top + plotH + 5}" stroke="#333"/>`,
      `<text x="${fmt(px)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="11">${fmt(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(ye.lo, ye.hi)) {
    const py = sy(tick);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${fmt(py)}" x2="${MARGIN.left}" ` +
        `y2="${fmt(py)}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(py + 4)}" text-anchor="end" ` +
        `font-size="11">${formatTick(tick)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 10}" text-anchor="middle" ` +
      `font-size="12">${escapeXml(options.xLabel)}</text>`,
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${escapeXml(options.yLabel)}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.x
      .map((xv, j) => `${fmt(sx(xv))},${fmt(sy(s.y[j]))}`)
      .join(" ");
    const dash = i > 0 ? ` stroke-dasharray="${4 + 3 * i},4"` : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`,
    );
  });

  for (const marker of options.markers ?? []) {
    const px = sx(marker.x);
    const py = sy(marker.y);
    parts.push(
      `<circle cx="${fmt(px)}" cy="${fmt(py)}" r="4" fill="none" stroke="#d62728" stroke-width="1.6"/>`,
      `<text x="${fmt(px + 7)}" y="${fmt(py - 7)}" font-size="11" fill="#d62728">` +
        `${escapeXml(marker.label)}</text>`,
    );
  }

  // legend, top right of the plot box
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const lx = MARGIN.left + plotW - 150;
    const ly = MARGIN.top + 16 + 18 * i;
    const dash = i > 0 ? ` stroke-dasharray="${4 + 3 * i},4"` : "";
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" ` +
        `stroke="${color}" stroke-width="1.6"${dash}/>`,
      `<text x="${lx + 32}" y="${ly}" font-size="12">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}

function formatTick(value: number): string {
  const abs = Math.abs(value);
  if (value !== 0 && (abs >= 1e4 || abs < 1e-3)) {
    return value.toExponential(1).replace("e", "e");
  }
  return fmt(value);
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
