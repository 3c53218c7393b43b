// Pure choropleth render model: county shapes with fills plus a legend.
// The DOM layer only has to turn shapes into <path> elements.

import {
  GREY_FILTERED,
  HATCH_FILL,
  clusterColor,
  sequentialColor,
  sequentialLegend,
} from "./colors.js";
import type { ViewState } from "./state.js";
import type { AssignmentsFile, BoundaryCollection, BoundaryFeature } from "./types.js";

export interface CountyShape {
  fips: string;
  path: string;
  fill: string;
  hatched: boolean;
  greyed: boolean;
}

export interface LegendItem {
  label: string;
  color: string;
}

export interface ChoroplethModel {
  shapes: CountyShape[];
  legend: LegendItem[];
  missingGeometry: string[]; // assigned counties without a boundary (drawn grey elsewhere? listed)
  unknownCounties: string[]; // boundaries without assignment data
  width: number;
  height: number;
}

function featureFips(feature: BoundaryFeature): string | null {
  if (typeof feature.properties?.fips === "string") return feature.properties.fips;
  if (typeof feature.id === "string") return feature.id;
  return null;
}

function rings(feature: BoundaryFeature): number[][][] {
  if (feature.geometry.type === "Polygon") {
    return feature.geometry.coordinates as number[][][];
  }
  return (feature.geometry.coordinates as number[][][][]).flat();
}

/** Linear lon/lat fit into the viewport (adequate for county-scale maps). */
export function buildProjection(
  boundaries: BoundaryCollection,
  width: number,
  height: number,
): (lon: number, lat: number) => [number, number] {
  let minLon = Infinity;
  let maxLon = -Infinity;
  let minLat = Infinity;
  let maxLat = -Infinity;
  for (const feature of boundaries.features) {
    for (const ring of rings(feature)) {
      for (const point of ring) {
        const lon = point[0]!;
        const lat = point[1]!;
        if (lon < minLon) minLon = lon;
        if (lon > maxLon) maxLon = lon;
        if (lat < minLat) minLat = lat;
        if (lat > maxLat) maxLat = lat;
      }
    }
  }
  const lonSpan = maxLon - minLon || 1;
  const latSpan = maxLat - minLat || 1;
  return (lon, lat) => [
    ((lon - minLon) / lonSpan) * width,
    ((maxLat - lat) / latSpan) * height,
  ];
}

function svgPath(
  feature: BoundaryFeature,
  project: (lon: number, lat: number) => [number, number],
): string {
  const parts: string[] = [];
  for (const ring of rings(feature)) {
    ring.forEach((point, i) => {
      const [x, y] = project(point[0]!, point[1]!);
      parts.push(`${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
    });
    parts.push("Z");
  }
  return parts.join("");
}

export interface ChoroplethInputs {
  boundaries: BoundaryCollection;
  assignments: AssignmentsFile;
  view: ViewState;
  /** fips -> value of the active variable (from /api/scatter); null-ish = absent */
  variableValues?: Map<string, number>;
  variableRange?: { min: number; max: number };
  /** fips -> value of the filter feature, used only for pass/fail greying */
  filterValues?: Map<string, number>;
}

export function buildChoropleth(
  inputs: ChoroplethInputs,
  width = 960,
  height = 600,
): ChoroplethModel {
  const { boundaries, assignments, view } = inputs;
  const project = buildProjection(boundaries, width, height);

  const shapes: CountyShape[] = [];
  const unknownCounties: string[] = [];
  const seen = new Set<string>();

  for (const feature of boundaries.features) {
    const fips = featureFips(feature);
    if (fips === null) continue;
    seen.add(fips);
    const entry = assignments[fips];
    const path = svgPath(feature, project);

    if (!entry) {
      unknownCounties.push(fips);
      shapes.push({ fips, path, fill: GREY_FILTERED, hatched: false, greyed: true });
      continue;
    }
    if (entry.cluster === null) {
      // excluded by the sparsity filter: hatched "insufficient data"
      shapes.push({ fips, path, fill: HATCH_FILL, hatched: true, greyed: false });
      continue;
    }

    let excludedByFilter = false;
    if (view.filter && inputs.filterValues) {
      const value = inputs.filterValues.get(fips);
      if (value === undefined) {
        excludedByFilter = true;
      } else {
        excludedByFilter =
          view.filter.op === "gte"
            ? value < view.filter.threshold
            : value > view.filter.threshold;
      }
    }
    if (excludedByFilter) {
      shapes.push({ fips, path, fill: GREY_FILTERED, hatched: false, greyed: true });
      continue;
    }

    let fill: string;
    if (view.colorMode === "variable" && view.variable && inputs.variableValues) {
      const value = inputs.variableValues.get(fips);
      const range = inputs.variableRange;
      fill =
        value !== undefined && range
          ? sequentialColor(value, range.min, range.max)
          : GREY_FILTERED;
    } else {
      fill = clusterColor(entry.performance_label, entry.cluster);
    }
    shapes.push({ fips, path, fill, hatched: false, greyed: false });
  }

  const missingGeometry = Object.keys(assignments)
    .filter((fips) => !seen.has(fips))
    .sort();

  return {
    shapes,
    legend: buildLegend(inputs),
    missingGeometry,
    unknownCounties,
    width,
    height,
  };
}

export function buildLegend(inputs: ChoroplethInputs): LegendItem[] {
  const { assignments, view } = inputs;
  if (view.colorMode === "variable" && view.variable && inputs.variableRange) {
    return sequentialLegend(inputs.variableRange.min, inputs.variableRange.max);
  }
  // one class per cluster, labeled by performance
  const byCluster = new Map<number, string | null>();
  for (const entry of Object.values(assignments)) {
    if (entry.cluster !== null && !byCluster.has(entry.cluster)) {
      byCluster.set(entry.cluster, entry.performance_label);
    }
  }
  return [...byCluster.entries()]
    .sort((x, y) => x[0] - y[0])
    .map(([cluster, label]) => ({
      label: label ?? `cluster ${cluster}`,
      color: clusterColor(label, cluster),
    }));
}
