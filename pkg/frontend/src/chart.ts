/** Best-so-far convergence chart, rendered as a self-contained SVG string. */

import type { ChartPoint } from "./state.js";

export interface ChartOptions {
  width: number;
  height: number;
}

const MARGIN = { top: 12, right: 16, bottom: 28, left: 56 };

function scale(value: number, d0: number, d1: number, r0: number, r1: number): number {
  if (d1 === d0) {
    return (r0 + r1) / 2;
  }
  return r0 + ((value - d0) / (d1 - d0)) * (r1 - r0);
}

function ticks(lo: number, hi: number, count: number): number[] {
  if (hi === lo) {
    return [lo];
  }
  const out: number[] = [];
  for (let i = 0; i <= count; i++) {
    out.push(lo + ((hi - lo) * i) / count);
  }
  return out;
}

function fmt(value: number): string {
  if (!Number.isFinite(value)) {
    return "";
  }
  const abs = Math.abs(value);
  if (abs !== 0 && (abs >= 10000 || abs < 0.01)) {
    return value.toExponential(2);
  }
  return String(Math.round(value * 10000) / 10000);
}

/** Render the series; undefined best values (before the first valid candidate)
 * simply do not produce a segment. */
export function chartSvg(points: ChartPoint[], options: ChartOptions): string {
  const { width, height } = options;
  const defined = points.filter((p): p is { sampleIndex: number; best: number } => p.best !== null);
  const inner = {
    x0: MARGIN.left,
    x1: width - MARGIN.right,
    y0: height - MARGIN.bottom,
    y1: MARGIN.top,
  };
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img">`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="none"/>`,
    `<line x1="${inner.x0}" y1="${inner.y0}" x2="${inner.x1}" y2="${inner.y0}" stroke="#888"/>`,
    `<line x1="${inner.x0}" y1="${inner.y0}" x2="${inner.x0}" y2="${inner.y1}" stroke="#888"/>`,
  ];
  if (defined.length > 0) {
    const xMax = Math.max(points[points.length - 1]!.sampleIndex, 1);
    let yLo = Math.min(...defined.map((p) => p.best));
    let yHi = Math.max(...defined.map((p) => p.best));
    if (yLo === yHi) {
      yLo -= 0.5;
      yHi += 0.5;
    }
    for (const t of ticks(yLo, yHi, 4)) {
      const y = scale(t, yLo, yHi, inner.y0, inner.y1);
      parts.push(
        `<line x1="${inner.x0 - 4}" y1="${y}" x2="${inner.x1}" y2="${y}" stroke="#ddd" stroke-dasharray="3,3"/>`,
        `<text x="${inner.x0 - 8}" y="${y + 4}" text-anchor="end" font-size="11" fill="#555">${fmt(t)}</text>`,
      );
    }
    for (const t of ticks(0, xMax, Math.min(8, xMax))) {
      const x = scale(t, 0, xMax, inner.x0, inner.x1);
      parts.push(
        `<text x="${x}" y="${inner.y0 + 18}" text-anchor="middle" font-size="11" fill="#555">${Math.round(t)}</text>`,
      );
    }
    const coords = defined.map((p) => {
      const x = scale(p.sampleIndex, 0, xMax, inner.x0, inner.x1);
      const y = scale(p.best, yLo, yHi, inner.y0, inner.y1);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    });
    parts.push(
      `<polyline points="${coords.join(" ")}" fill="none" stroke="#2563eb" stroke-width="1.8"/>`,
    );
    for (const c of coords) {
      const [x, y] = c.split(",");
      parts.push(`<circle cx="${x}" cy="${y}" r="2.4" fill="#2563eb"/>`);
    }
  } else {
    parts.push(
      `<text x="${(inner.x0 + inner.x1) / 2}" y="${(inner.y0 + inner.y1) / 2}" text-anchor="middle" font-size="12" fill="#777">no valid candidate yet</text>`,
    );
  }
  parts.push(
    `<text x="${(inner.x0 + inner.x1) / 2}" y="${height - 6}" text-anchor="middle" font-size="11" fill="#555">samples drawn</text>`,
    "</svg>",
  );
  return parts.join("");
}
