// Distribution panel model: bars come straight from /api/distribution, so
// panel counts integer-match the endpoint by construction.

import type { DistributionResponse } from "./types.js";

export interface DistributionBar {
  cluster: number;
  label: string;
  count: number;
  fraction: number; // of the largest bar, for rendering widths
}

export interface DistributionPanel {
  feature: string;
  op: "gte" | "lte";
  threshold: number;
  bars: DistributionBar[];
  missing: number;
  totalPassing: number;
  totalClustered: number;
}

export function buildDistributionPanel(
  response: DistributionResponse,
  clusterLabels: Record<string, string>,
): DistributionPanel {
  const entries = Object.entries(response.counts)
    .map(([cluster, count]) => ({ cluster: Number(cluster), count }))
    .sort((a, b) => a.cluster - b.cluster);
  const maxCount = Math.max(1, ...entries.map((e) => e.count));
  const bars = entries.map((e) => ({
    cluster: e.cluster,
    label: clusterLabels[String(e.cluster)] ?? `cluster ${e.cluster}`,
    count: e.count,
    fraction: e.count / maxCount,
  }));
  return {
    feature: response.feature,
    op: response.op,
    threshold: response.threshold,
    bars,
    missing: response.missing,
    totalPassing: entries.reduce((sum, e) => sum + e.count, 0),
    totalClustered: response.total_clustered,
  };
}

/** Trailing-edge debounce; used to keep slider drags from flooding the API. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 150,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, waitMs);
  };
}

/** Monotonically increasing token source; stale async responses get dropped. */
export function tokenSource(): { next(): number; isCurrent(token: number): boolean } {
  let current = 0;
  return {
    next() {
      current += 1;
      return current;
    },
    isCurrent(token: number) {
      return token === current;
    },
  };
}
