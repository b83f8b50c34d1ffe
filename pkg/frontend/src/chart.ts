/**
 * SVG power-curve chart: sample size on x, power on y, one step curve
 * per visible scenario, a dotted horizontal line at the target power,
 * a marker at each recommendation, and optional oracle points with
 * 95% error bars.  Pure string construction, no DOM dependency, so the
 * renderer is unit-testable.
 */

import type { OracleRow, ScenarioCard } from "./types.js";

export interface ChartLayout {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_LAYOUT: ChartLayout = {
  width: 720,
  height: 400,
  margin: { top: 16, right: 24, bottom: 40, left: 56 },
};

export const SERIES_COLORS = ["#2563eb", "#d97706", "#059669", "#db2777", "#7c3aed", "#475569"];

export interface ChartScale {
  nMin: number;
  nMax: number;
  x: (n: number) => number;
  y: (power: number) => number;
  invertX: (px: number) => number;
}

export function makeScale(cards: ScenarioCard[], layout: ChartLayout = DEFAULT_LAYOUT): ChartScale {
  let nMin = Number.POSITIVE_INFINITY;
  let nMax = Number.NEGATIVE_INFINITY;
  for (const card of cards) {
    if (!card.result) continue;
    for (const [n] of card.result.curve) {
      nMin = Math.min(nMin, n);
      nMax = Math.max(nMax, n);
    }
    for (const row of card.oracle ?? []) {
      nMin = Math.min(nMin, row.n);
      nMax = Math.max(nMax, row.n);
    }
  }
  if (!Number.isFinite(nMin)) {
    nMin = 0;
    nMax = 1;
  }
  if (nMax <= nMin) nMax = nMin + 1;
  const { width, height, margin } = layout;
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;
  const x = (n: number) => margin.left + ((n - nMin) / (nMax - nMin)) * innerW;
  const y = (p: number) => margin.top + (1 - p) * innerH;
  const invertX = (px: number) => nMin + ((px - margin.left) / innerW) * (nMax - nMin);
  return { nMin, nMax, x, y, invertX };
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function curvePath(curve: [number, number][], scale: ChartScale): string {
  if (curve.length === 0) return "";
  let d = `M ${scale.x(curve[0][0]).toFixed(1)} ${scale.y(curve[0][1]).toFixed(1)}`;
  for (let i = 1; i < curve.length; i++) {
    // step rendering: the empirical CDF is flat between jump points
    d += ` H ${scale.x(curve[i][0]).toFixed(1)} V ${scale.y(curve[i][1]).toFixed(1)}`;
  }
  return d;
}

function oracleMarks(rows: OracleRow[], scale: ChartScale, color: string): string {
  const parts: string[] = [];
  for (const row of rows) {
    const cx = scale.x(row.n).toFixed(1);
    const lo = scale.y(row.ci95[0]).toFixed(1);
    const hi = scale.y(row.ci95[1]).toFixed(1);
    parts.push(
      `<line class="oracle-bar" x1="${cx}" x2="${cx}" y1="${lo}" y2="${hi}" stroke="${color}"/>`,
      `<circle class="oracle-point" cx="${cx}" cy="${scale.y(row.power_hat).toFixed(1)}" r="3.5" fill="${color}"/>`,
    );
  }
  return parts.join("");
}

/** Oracle rows whose error bars miss the engine curve entirely. */
export function oracleDisagreements(card: ScenarioCard): OracleRow[] {
  if (!card.result || !card.oracle) return [];
  const out: OracleRow[] = [];
  for (const row of card.oracle) {
    const enginePower = readCurve(card.result.curve, row.n);
    if (enginePower === null) continue;
    if (enginePower < row.ci95[0] || enginePower > row.ci95[1]) out.push(row);
  }
  return out;
}

/** Piecewise-constant read-off of the empirical power curve at n. */
export function readCurve(curve: [number, number][], n: number): number | null {
  if (curve.length === 0) return null;
  if (n < curve[0][0]) return 0;
  let value = curve[0][1];
  for (const [cn, p] of curve) {
    if (cn > n) break;
    value = p;
  }
  return value;
}

export interface HoverReadout {
  n: number;
  series: { label: string; power: number }[];
}

export function hoverReadout(
  cards: ScenarioCard[],
  pixelX: number,
  layout: ChartLayout = DEFAULT_LAYOUT,
): HoverReadout {
  const scale = makeScale(cards, layout);
  const n = Math.round(scale.invertX(pixelX));
  const series = cards
    .filter((c) => c.visible && c.result)
    .map((c) => ({
      label: c.spec.label || `scenario ${c.localId}`,
      power: readCurve(c.result!.curve, n) ?? 0,
    }));
  return { n, series };
}

export function renderChart(
  cards: ScenarioCard[],
  targetPower: number | null,
  layout: ChartLayout = DEFAULT_LAYOUT,
): string {
  const visible = cards.filter((c) => c.visible && c.result);
  const scale = makeScale(visible, layout);
  const { width, height, margin } = layout;
  const bottom = height - margin.bottom;
  const parts: string[] = [
    `<svg class="power-chart" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
    `<line class="axis" x1="${margin.left}" y1="${bottom}" x2="${width - margin.right}" y2="${bottom}" stroke="#333"/>`,
    `<line class="axis" x1="${margin.left}" y1="${margin.top}" x2="${margin.left}" y2="${bottom}" stroke="#333"/>`,
    `<text class="axis-label" x="${(margin.left + width - margin.right) / 2}" y="${height - 6}">sample size per group (n)</text>`,
    `<text class="axis-label" transform="rotate(-90)" x="${-height / 2}" y="14">power</text>`,
  ];
  // y ticks every 0.2
  for (let p = 0; p <= 1.0001; p += 0.2) {
    const py = scale.y(p).toFixed(1);
    parts.push(
      `<line class="tick" x1="${margin.left - 4}" x2="${margin.left}" y1="${py}" y2="${py}" stroke="#333"/>`,
      `<text class="tick-label" x="${margin.left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle">${p.toFixed(1)}</text>`,
    );
  }
  if (targetPower !== null) {
    const ty = scale.y(targetPower).toFixed(1);
    parts.push(
      `<line class="target-power" x1="${margin.left}" x2="${width - margin.right}" y1="${ty}" y2="${ty}" stroke="#555" stroke-dasharray="4 4"/>`,
      `<text class="target-label" x="${width - margin.right}" y="${ty}" dy="-4" text-anchor="end">target ${targetPower}</text>`,
    );
  }
  visible.forEach((card, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    const label = esc(card.spec.label || `scenario ${card.localId}`);
    parts.push(
      `<path class="curve" data-card="${card.localId}" d="${curvePath(card.result!.curve, scale)}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    const rec = card.result!.recommendation;
    parts.push(
      `<line class="recommendation" data-card="${card.localId}" x1="${scale.x(rec).toFixed(1)}" x2="${scale.x(rec).toFixed(1)}" y1="${bottom}" y2="${scale.y(readCurve(card.result!.curve, rec) ?? 1).toFixed(1)}" stroke="${color}" stroke-dasharray="2 3"/>`,
      `<text class="legend" x="${margin.left + 8}" y="${margin.top + 14 + 16 * idx}" fill="${color}">${label}: n = ${rec}</text>`,
    );
    if (card.oracle && card.oracle.length > 0) {
      parts.push(oracleMarks(card.oracle, scale, color));
      for (const bad of oracleDisagreements(card)) {
        const bx = scale.x(bad.n);
        parts.push(
          `<rect class="disagreement" x="${(bx - 6).toFixed(1)}" y="${margin.top}" width="12" height="${bottom - margin.top}" fill="${color}" opacity="0.12"/>`,
        );
      }
    }
  });
  parts.push("</svg>");
  return parts.join("\n");
}
