/**
 * BER-vs-SNR chart rendered straight to SVG: linear SNR axis, log10 BER
 * axis, one polyline per series.  Zero-BER points are clipped to the
 * y-floor and drawn as open downward triangles.  Output is a pure function
 * of the input (fixed palette, fixed formatting, no ids or timestamps).
 */

import { BerRow } from "./csv.js";

export interface PlotSpec {
  rows: BerRow[];
  groupBy: ("code" | "decoder")[];
  title?: string;
  yFloor?: number; // default 1e-6
}

export class ChartError extends Error {}

interface Series {
  label: string;
  points: { snr: number; ber: number; clipped: boolean }[];
}

const WIDTH = 760;
const HEIGHT = 520;
const MARGIN = { left: 70, right: 24, top: 42, bottom: 52 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function fmt(x: number): string {
  return x.toFixed(2);
}

export function buildSeries(spec: PlotSpec): Series[] {
  const floor = spec.yFloor ?? 1e-6;
  if (floor <= 0) {
    throw new ChartError(`y floor must be positive, got ${floor}`);
  }
  if (spec.rows.length === 0) {
    throw new ChartError("no rows selected");
  }
  const byKey = new Map<string, BerRow[]>();
  for (const row of spec.rows) {
    const key = spec.groupBy.map((k) => (k === "code" ? row.code : row.decoder)).join("/");
    const list = byKey.get(key) ?? [];
    list.push(row);
    byKey.set(key, list);
  }
  return [...byKey.keys()].sort().map((label) => {
    const points = byKey
      .get(label)!
      .slice()
      .sort((a, b) => a.snr_db - b.snr_db)
      .map((r) => ({
        snr: r.snr_db,
        ber: Math.max(r.ber, floor),
        clipped: r.ber < floor || r.ber === 0,
      }));
    return { label, points };
  });
}

export function renderSvg(spec: PlotSpec): string {
  const floor = spec.yFloor ?? 1e-6;
  const series = buildSeries(spec);

  const snrs = series.flatMap((s) => s.points.map((p) => p.snr));
  const xMin = Math.min(...snrs);
  const xMax = Math.max(...snrs);
  const xSpan = xMax - xMin || 1;
  const yTop = 0; // log10 of 1
  const yBottom = Math.floor(Math.log10(floor));

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (snr: number) => MARGIN.left + ((snr - xMin) / xSpan) * plotW;
  const py = (ber: number) => {
    const l = Math.max(Math.min(Math.log10(ber), yTop), yBottom);
    return MARGIN.top + ((yTop - l) / (yTop - yBottom)) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  if (spec.title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${esc(spec.title)}</text>`,
    );
  }

  // log-decade gridlines and y tick labels
  for (let d = yTop; d >= yBottom; d--) {
    const y = py(10 ** d);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">1e${d}</text>`,
    );
  }
  // x gridlines on the observed SNR values
  const xticks = [...new Set(snrs)].sort((a, b) => a - b);
  for (const t of xticks) {
    const x = px(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${HEIGHT - MARGIN.bottom}" stroke="#eeeeee" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(x)}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle" font-size="11">${t}</text>`,
    );
  }
  // frame and axis labels
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">SNR (dB)</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">BER</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const coords = s.points.map((p) => `${fmt(px(p.snr))},${fmt(py(p.ber))}`).join(" ");
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${coords}" data-series="${esc(s.label)}"/>`,
    );
    for (const p of s.points) {
      const x = px(p.snr);
      const y = py(p.ber);
      if (p.clipped) {
        // open triangle marks a point at or below the floor
        parts.push(
          `<path d="M ${fmt(x - 4)} ${fmt(y - 3.5)} L ${fmt(x + 4)} ${fmt(y - 3.5)} L ${fmt(x)} ${fmt(y + 4.5)} Z" fill="white" stroke="${color}" stroke-width="1.4"/>`,
        );
      } else {
        parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="3" fill="${color}"/>`);
      }
    }
  });

  // legend, one entry per series
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = MARGIN.top + 14 + i * 18;
    const lx = WIDTH - MARGIN.right - 150;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 32}" y="${ly}" font-size="12">${esc(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
