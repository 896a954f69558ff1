/** Pinned colors for point states, plus categorical/sequential scales. */

import { ColorMode, PaperRecord, PointState, ProjectionPoint } from "./types.js";

export const STATE_COLORS: Record<PointState, string> = {
  unfiltered: "#4a4a4a",        // dark grey
  filtered: "#d3d3d3",          // light grey
  similarity_input: "#ff69b4",  // pink
  similarity_output: "#ffa500", // orange
  saved: "#e03131",             // red
};

export const CATEGORICAL_PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export function colorForState(state: PointState): string {
  return STATE_COLORS[state];
}

export function categoricalColor(value: string): string {
  let hash = 0;
  for (let i = 0; i < value.length; i++) {
    hash = (hash * 31 + value.charCodeAt(i)) | 0;
  }
  return CATEGORICAL_PALETTE[Math.abs(hash) % CATEGORICAL_PALETTE.length];
}

/** Light-blue to dark-blue ramp for t in [0, 1]. */
export function sequentialColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const from = [222, 235, 247];
  const to = [8, 48, 107];
  const rgb = from.map((f, i) => Math.round(f + (to[i] - f) * clamped));
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}

export interface ColorContext {
  recordsById: Map<number, PaperRecord>;
  scoresById: Map<number, number>;
  yearRange: [number, number];
  citationMax: number;
}

export function colorForPoint(
  point: ProjectionPoint,
  mode: ColorMode,
  ctx: ColorContext,
): string {
  if (mode === "default") return colorForState(point.state);
  const record = ctx.recordsById.get(point.paper_id);
  if (mode === "source") {
    return record ? categoricalColor(record.Source) : STATE_COLORS.filtered;
  }
  if (mode === "year") {
    if (!record) return STATE_COLORS.filtered;
    const [lo, hi] = ctx.yearRange;
    return sequentialColor(hi > lo ? (record.Year - lo) / (hi - lo) : 0.5);
  }
  if (mode === "citations") {
    const count = record?.CitationCounts;
    if (count === null || count === undefined) return STATE_COLORS.filtered;
    return sequentialColor(ctx.citationMax > 0 ? Math.log1p(count) / Math.log1p(ctx.citationMax) : 0);
  }
  const score = ctx.scoresById.get(point.paper_id);
  return score === undefined ? STATE_COLORS.filtered : sequentialColor(score);
}
