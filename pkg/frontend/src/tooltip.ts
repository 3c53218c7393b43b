// Tooltip content model for county mouseover. Absent data renders as an
// em-style placeholder; the UI itself computes nothing.

import type { ViewState } from "./state.js";
import type { CountyResponse } from "./types.js";

export interface TooltipLine {
  label: string;
  value: string;
}

export interface TooltipModel {
  title: string;
  subtitle: string;
  status: "clustered" | "excluded-by-filter" | "insufficient-data";
  lines: TooltipLine[];
}

const PLACEHOLDER = "—";

function formatValue(value: number | null | undefined): string {
  if (value === null || value === undefined) return PLACEHOLDER;
  if (Number.isInteger(value)) return String(value);
  return Math.abs(value) >= 1000 ? value.toFixed(0) : value.toPrecision(4);
}

export function buildTooltip(
  county: CountyResponse,
  view: ViewState,
  excludedByFilter: boolean,
): TooltipModel {
  const lines: TooltipLine[] = [];
  let status: TooltipModel["status"] = "clustered";

  if (county.cluster === null) {
    status = "insufficient-data";
    lines.push({ label: "status", value: "insufficient data" });
  } else if (excludedByFilter) {
    status = "excluded-by-filter";
    lines.push({ label: "status", value: "excluded by filter" });
    lines.push({
      label: "cluster",
      value: county.performance_label ?? `cluster ${county.cluster}`,
    });
  } else {
    lines.push({
      label: "cluster",
      value: county.performance_label ?? `cluster ${county.cluster}`,
    });
  }

  if (view.variable) {
    lines.push({
      label: view.variable,
      value: formatValue(county.values[view.variable]),
    });
  }

  for (const extreme of county.top_extremes.slice(0, 3)) {
    lines.push({
      label: `${extreme.feature} (z=${extreme.z.toFixed(2)})`,
      value: formatValue(extreme.value),
    });
  }

  return {
    title: county.county_name || county.fips,
    subtitle: `${county.state} · ${county.fips}`,
    status,
    lines,
  };
}
