// UI contract against a real engine serving the structural fixture bundle:
//   - choropleth legend renders one class per cluster (3)
//   - distribution panel counts integer-match /api/distribution
//   - compare panel preserves /api/gap ordering exactly
// Builds the fixture (python engine) and spawns the server once.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApi, type Api } from "../src/api.js";
import { buildChoropleth } from "../src/choropleth.js";
import { buildComparePanel } from "../src/compare.js";
import { buildDistributionPanel } from "../src/distribution.js";
import { DEFAULT_VIEW } from "../src/state.js";
import type { AssignmentsFile, BoundaryCollection } from "../src/types.js";

const root = join(dirname(fileURLToPath(import.meta.url)), "..");
const bundleDir = join(root, ".fixture", "bundle");

let server: ChildProcess | null = null;
let api: Api;
let assignments: AssignmentsFile;
let boundaries: BoundaryCollection;

beforeAll(async () => {
  execFileSync("node", [join(root, "scripts", "make_fixture.mjs")], {
    stdio: "inherit",
  });
  assignments = JSON.parse(readFileSync(join(bundleDir, "assignments.json"), "utf8"));
  boundaries = JSON.parse(readFileSync(join(bundleDir, "boundaries.geojson"), "utf8"));

  server = spawn(
    "python3",
    ["-m", "countycluster.cli", "serve", "--out", bundleDir, "--port", "0"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const baseUrl = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(
      () => reject(new Error(`server start timeout; output: ${buffer}`)),
      30000,
    );
    server!.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/http:\/\/([\d.]+):(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(`http://${match[1]}:${match[2]}`);
      }
    });
    server!.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early with code ${code}`));
    });
  });

  api = createApi(baseUrl);
  for (let attempt = 0; ; attempt++) {
    try {
      await api.meta();
      break;
    } catch {
      if (attempt > 100) throw new Error("server never became ready");
      await new Promise((r) => setTimeout(r, 200));
    }
  }
}, 180000);

afterAll(() => {
  server?.kill();
});

describe("fixture bundle UI contract", () => {
  it("choropleth renders 3 legend classes over the fixture bundle", () => {
    const model = buildChoropleth({ boundaries, assignments, view: DEFAULT_VIEW });
    expect(model.legend).toHaveLength(3);
    expect(new Set(model.legend.map((l) => l.label))).toEqual(
      new Set(["high-performing", "medium-performing", "low-performing"]),
    );
    // every county in the bundle has a shape; filtered ones render hatched
    expect(model.missingGeometry).toEqual([]);
    const hatched = model.shapes.filter((s) => s.hatched).map((s) => s.fips);
    const nullClusters = Object.keys(assignments).filter(
      (f) => assignments[f]!.cluster === null,
    );
    expect(hatched.sort()).toEqual(nullClusters.sort());
  });

  it("distribution panel counts integer-match the endpoint as the slider moves", async () => {
    const clusters = await api.clusters();
    const features = await api.features();
    const summary = features.find((f) => f.name === "hs_education_pct")!;
    const steps = 7;
    for (let i = 0; i <= steps; i++) {
      const threshold = summary.min! + ((summary.max! - summary.min!) * i) / steps;
      const panelResponse = await api.distribution("hs_education_pct", "gte", threshold);
      const panel = buildDistributionPanel(panelResponse, clusters.labels);
      const direct = await api.distribution("hs_education_pct", "gte", threshold);
      for (const bar of panel.bars) {
        expect(bar.count).toBe(direct.counts[String(bar.cluster)]);
      }
      expect(panel.missing).toBe(direct.missing);
      expect(panel.totalClustered).toBe(direct.total_clustered);
    }
  });

  it("vacuous and impossible thresholds bracket the cluster sizes", async () => {
    const clusters = await api.clusters();
    const features = await api.features();
    const summary = features.find((f) => f.name === "vaccination_rate")!;
    const everything = await api.distribution("vaccination_rate", "gte", summary.min!);
    const sizes = clusters.sizes;
    const passing = Object.entries(everything.counts).map(([c, n]) => [Number(c), n]);
    for (const [cluster, count] of passing) {
      // everything with a value passes: size minus missing-in-that-cluster
      expect(count).toBeLessThanOrEqual(sizes[cluster!]!);
    }
    const nothing = await api.distribution("vaccination_rate", "gte", summary.max! + 1);
    expect(Object.values(nothing.counts).every((n) => n === 0)).toBe(true);
  });

  it("compare panel matches /api/gap ordering exactly", async () => {
    const clustered = Object.keys(assignments).filter(
      (f) => assignments[f]!.cluster !== null,
    );
    const [a, b] = [clustered[0]!, clustered[clustered.length - 1]!];
    const gap = await api.gap(a, b);
    const panel = buildComparePanel(gap);
    expect(panel.rows.map((r) => r.feature)).toEqual(gap.entries.map((e) => e.feature));
    const gaps = panel.rows.map((r) => r.gap);
    expect([...gaps].sort((x, y) => y - x)).toEqual(gaps); // engine sorted desc
    expect(panel.totalDistance).toBeCloseTo(
      Math.sqrt(gaps.reduce((s, g) => s + g * g, 0)),
      9,
    );
  });

  it("county endpoint feeds tooltips for hatched counties", async () => {
    const filtered = Object.keys(assignments).find(
      (f) => assignments[f]!.cluster === null,
    )!;
    const county = await api.county(filtered);
    expect(county.cluster).toBeNull();
    expect(county.reason).toBe("filtered");
  });

  it("served assignments match the exported file", async () => {
    const served = await api.assignments();
    expect(served).toEqual(assignments);
  });
});
