// County comparison panel: a verbatim view of /api/gap. Order and numbers
// are the engine's; the panel only formats.

import type { GapResponse } from "./types.js";

export interface CompareRow {
  feature: string;
  gap: number;
  rawA: number;
  rawB: number;
  barFraction: number; // of the largest gap
}

export interface ComparePanel {
  fipsA: string;
  fipsB: string;
  totalDistance: number;
  rows: CompareRow[];
  skipped: string[];
}

export function buildComparePanel(response: GapResponse): ComparePanel {
  const maxGap = Math.max(1e-12, ...response.entries.map((e) => e.gap));
  return {
    fipsA: response.fips_a,
    fipsB: response.fips_b,
    totalDistance: response.total_distance,
    rows: response.entries.map((e) => ({
      feature: e.feature,
      gap: e.gap,
      rawA: e.raw_a,
      rawB: e.raw_b,
      barFraction: e.gap / maxGap,
    })),
    skipped: response.skipped_features,
  };
}
