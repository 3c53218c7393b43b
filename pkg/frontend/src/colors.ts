// Color scales: a 3-class categorical scale for performance clusters and a
// sequential 5-class scale for variable coloring.

export const CLUSTER_COLORS: Record<string, string> = {
  "high-performing": "#2a9d3f",
  "medium-performing": "#e9b824",
  "low-performing": "#d1495b",
};

export const FALLBACK_CLUSTER_PALETTE = [
  "#d1495b",
  "#e9b824",
  "#2a9d3f",
  "#3567b3",
  "#8a5fbf",
  "#e07b39",
];

export const SEQUENTIAL_PALETTE = [
  "#eff3ff",
  "#bdd7e7",
  "#6baed6",
  "#3182bd",
  "#08519c",
];

export const GREY_FILTERED = "#d6d6d6";
export const HATCH_FILL = "url(#no-data-hatch)";

export function clusterColor(label: string | null, cluster: number | null): string {
  if (label && CLUSTER_COLORS[label]) return CLUSTER_COLORS[label];
  if (cluster !== null) {
    return FALLBACK_CLUSTER_PALETTE[cluster % FALLBACK_CLUSTER_PALETTE.length]!;
  }
  return GREY_FILTERED;
}

/** Quantize a value into the sequential palette between min and max. */
export function sequentialColor(value: number, min: number, max: number): string {
  if (!(max > min)) return SEQUENTIAL_PALETTE[0]!;
  const t = (value - min) / (max - min);
  const idx = Math.min(
    SEQUENTIAL_PALETTE.length - 1,
    Math.max(0, Math.floor(t * SEQUENTIAL_PALETTE.length)),
  );
  return SEQUENTIAL_PALETTE[idx]!;
}

export function sequentialLegend(
  min: number,
  max: number,
): { label: string; color: string }[] {
  const step = (max - min) / SEQUENTIAL_PALETTE.length;
  return SEQUENTIAL_PALETTE.map((color, i) => ({
    color,
    label: `${(min + i * step).toPrecision(3)} – ${(min + (i + 1) * step).toPrecision(3)}`,
  }));
}
