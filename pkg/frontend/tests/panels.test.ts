import { describe, expect, it, vi } from "vitest";

import { buildComparePanel } from "../src/compare.js";
import { buildDistributionPanel, debounce, tokenSource } from "../src/distribution.js";
import { DEFAULT_VIEW } from "../src/state.js";
import { buildTooltip } from "../src/tooltip.js";
import type { CountyResponse, DistributionResponse, GapResponse } from "../src/types.js";

const DISTRIBUTION: DistributionResponse = {
  feature: "hs_education_pct",
  op: "gte",
  threshold: 85,
  counts: { "0": 0, "1": 100, "2": 6 },
  missing: 7,
  total_clustered: 295,
};

describe("distribution panel", () => {
  it("carries endpoint counts through verbatim", () => {
    const panel = buildDistributionPanel(DISTRIBUTION, {
      "0": "low-performing",
      "1": "high-performing",
      "2": "medium-performing",
    });
    expect(panel.bars.map((b) => b.count)).toEqual([0, 100, 6]);
    expect(panel.bars.map((b) => b.label)).toEqual([
      "low-performing",
      "high-performing",
      "medium-performing",
    ]);
    expect(panel.totalPassing).toBe(106);
    expect(panel.missing).toBe(7);
    const fractions = panel.bars.map((b) => b.fraction);
    expect(Math.max(...fractions)).toBe(1);
  });

  it("debounce collapses bursts to the trailing call", () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((x: number) => calls.push(x), 150);
    fn(1);
    fn(2);
    fn(3);
    vi.advanceTimersByTime(149);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(2);
    expect(calls).toEqual([3]);
    vi.useRealTimers();
  });

  it("token source marks earlier requests stale", () => {
    const tokens = tokenSource();
    const first = tokens.next();
    const second = tokens.next();
    expect(tokens.isCurrent(first)).toBe(false);
    expect(tokens.isCurrent(second)).toBe(true);
  });
});

const GAP: GapResponse = {
  fips_a: "01001",
  fips_b: "02001",
  entries: [
    { feature: "vote_share_dem", gap: 2.55, raw_a: 0.27, raw_b: 0.56 },
    { feature: "mask_usage_score", gap: 2.1, raw_a: 2.0, raw_b: 3.9 },
    { feature: "poverty_rate", gap: 0.4, raw_a: 21.0, raw_b: 20.1 },
  ],
  total_distance: 3.33,
  skipped_features: ["staffed_beds"],
};

describe("compare panel", () => {
  it("preserves the engine's gap ordering exactly", () => {
    const panel = buildComparePanel(GAP);
    expect(panel.rows.map((r) => r.feature)).toEqual([
      "vote_share_dem",
      "mask_usage_score",
      "poverty_rate",
    ]);
    expect(panel.rows[0]!.barFraction).toBe(1);
    expect(panel.totalDistance).toBe(3.33);
    expect(panel.skipped).toEqual(["staffed_beds"]);
  });
});

function county(partial: Partial<CountyResponse>): CountyResponse {
  return {
    fips: "01001",
    state: "AA",
    county_name: "AA County 1",
    cluster: 0,
    performance_label: "low-performing",
    reason: null,
    values: { positivity_rate: 0.16 },
    top_extremes: [
      { feature: "positivity_rate", value: 0.16, z: 1.8 },
      { feature: "mask_usage_score", value: 2.0, z: -1.4 },
      { feature: "poverty_rate", value: 21.0, z: 1.1 },
    ],
    ...partial,
  };
}

describe("tooltip", () => {
  it("shows cluster label, selected variable, and top-3 extremes", () => {
    const view = { ...DEFAULT_VIEW, variable: "positivity_rate" };
    const model = buildTooltip(county({}), view, false);
    expect(model.status).toBe("clustered");
    expect(model.title).toBe("AA County 1");
    expect(model.lines[0]).toEqual({ label: "cluster", value: "low-performing" });
    expect(model.lines[1]!.label).toBe("positivity_rate");
    expect(model.lines).toHaveLength(5); // cluster + variable + 3 extremes
  });

  it("marks filtered-out counties", () => {
    const model = buildTooltip(county({}), DEFAULT_VIEW, true);
    expect(model.status).toBe("excluded-by-filter");
    expect(model.lines[0]!.value).toBe("excluded by filter");
  });

  it("marks counties dropped for sparsity", () => {
    const model = buildTooltip(
      county({ cluster: null, performance_label: null, reason: "filtered", top_extremes: [] }),
      DEFAULT_VIEW,
      false,
    );
    expect(model.status).toBe("insufficient-data");
    expect(model.lines[0]!.value).toBe("insufficient data");
  });

  it("renders a placeholder for absent values", () => {
    const view = { ...DEFAULT_VIEW, variable: "unknown_feature" };
    const model = buildTooltip(county({}), view, false);
    const line = model.lines.find((l) => l.label === "unknown_feature");
    expect(line!.value).toBe("—");
  });
});
