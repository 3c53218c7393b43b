// Explorer app: wires the engine API, the boundary file, and the view state
// into the choropleth, tooltip, distribution panel, and comparison panel.

import { createApi } from "./api.js";
import { buildChoropleth } from "./choropleth.js";
import { buildComparePanel } from "./compare.js";
import { buildDistributionPanel, debounce, tokenSource } from "./distribution.js";
import {
  DEFAULT_VIEW,
  clampThreshold,
  readViewFromLocation,
  writeViewToLocation,
  type ViewState,
} from "./state.js";
import { buildTooltip } from "./tooltip.js";
import type {
  AssignmentsFile,
  BoundaryCollection,
  ClustersResponse,
  CountyResponse,
  FeatureSummary,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

interface AppData {
  boundaries: BoundaryCollection;
  assignments: AssignmentsFile;
  features: FeatureSummary[];
  clusters: ClustersResponse;
}

const api = createApi("");
const countyCache = new Map<string, CountyResponse>();
const valueCache = new Map<string, Map<string, number>>();
const distributionTokens = tokenSource();

let view: ViewState = { ...DEFAULT_VIEW };
let data: AppData | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function valuesFor(feature: string): Promise<Map<string, number>> {
  const cached = valueCache.get(feature);
  if (cached) return cached;
  // scatter with x = y = feature doubles as a per-county value lookup
  const scatter = await api.scatter(feature, feature);
  const map = new Map(scatter.points.map((p) => [p.fips, p.x]));
  valueCache.set(feature, map);
  return map;
}

async function countyFor(fips: string): Promise<CountyResponse> {
  const cached = countyCache.get(fips);
  if (cached) return cached;
  const county = await api.county(fips);
  countyCache.set(fips, county);
  return county;
}

function setView(patch: Partial<ViewState>): void {
  view = { ...view, ...patch };
  writeViewToLocation(view);
  void render();
}

async function render(): Promise<void> {
  if (!data) return;
  const { boundaries, assignments } = data;

  const variableValues =
    view.colorMode === "variable" && view.variable
      ? await valuesFor(view.variable)
      : undefined;
  const summary = data.features.find((f) => f.name === view.variable);
  const variableRange =
    summary && summary.min !== null && summary.max !== null
      ? { min: summary.min, max: summary.max }
      : undefined;
  const filterValues = view.filter ? await valuesFor(view.filter.feature) : undefined;

  const model = buildChoropleth({
    boundaries,
    assignments,
    view,
    variableValues,
    variableRange,
    filterValues,
  });

  const svg = el<HTMLElement>("map");
  svg.setAttribute("viewBox", `0 0 ${model.width} ${model.height}`);
  svg.querySelectorAll("path.county").forEach((n) => n.remove());
  for (const shape of model.shapes) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", shape.path);
    path.setAttribute("fill", shape.fill);
    path.setAttribute("class", "county");
    path.setAttribute("data-fips", shape.fips);
    if (shape.greyed) path.setAttribute("data-greyed", "1");
    path.addEventListener("mouseenter", () => void onHover(shape.fips));
    path.addEventListener("mouseleave", () => onHover(null));
    path.addEventListener("click", (event) => onCountyClick(shape.fips, event));
    svg.appendChild(path);
  }

  const legend = el("legend");
  legend.replaceChildren(
    ...model.legend.map((item) => {
      const row = document.createElement("div");
      row.className = "legend-item";
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = item.color;
      row.append(swatch, document.createTextNode(item.label));
      return row;
    }),
  );

  const diagnostics: string[] = [];
  if (model.missingGeometry.length) {
    diagnostics.push(
      `${model.missingGeometry.length} counties lack geometry: ` +
        model.missingGeometry.slice(0, 8).join(", ") +
        (model.missingGeometry.length > 8 ? ", …" : ""),
    );
  }
  if (model.unknownCounties.length) {
    diagnostics.push(`${model.unknownCounties.length} boundary shapes have no data`);
  }
  el("diagnostics").textContent = diagnostics.join(" · ");

  await Promise.all([renderDistribution(), renderCompare(), renderTooltipFromState()]);
}

async function renderDistribution(): Promise<void> {
  const panel = el("distribution");
  if (!data || !view.filter) {
    panel.replaceChildren();
    el("distribution-empty").hidden = !view.filter ? false : true;
    return;
  }
  el("distribution-empty").hidden = true;
  const token = distributionTokens.next();
  try {
    const response = await api.distribution(
      view.filter.feature,
      view.filter.op,
      view.filter.threshold,
    );
    if (!distributionTokens.isCurrent(token)) return; // stale slider position
    const model = buildDistributionPanel(response, data.clusters.labels);
    panel.replaceChildren(
      ...model.bars.map((bar) => {
        const row = document.createElement("div");
        row.className = "dist-row";
        const label = document.createElement("span");
        label.className = "dist-label";
        label.textContent = bar.label;
        const track = document.createElement("span");
        track.className = "dist-track";
        const fill = document.createElement("span");
        fill.className = "dist-fill";
        fill.style.width = `${(bar.fraction * 100).toFixed(1)}%`;
        track.appendChild(fill);
        const count = document.createElement("span");
        count.className = "dist-count";
        count.textContent = String(bar.count);
        row.append(label, track, count);
        return row;
      }),
    );
    el("distribution-summary").textContent =
      `${model.totalPassing} of ${model.totalClustered} clustered counties pass` +
      (model.missing ? ` (${model.missing} missing values)` : "");
  } catch (error) {
    el("distribution-summary").textContent = `distribution error: ${String(error)}`;
  }
}

async function renderCompare(): Promise<void> {
  const body = el("compare-body");
  if (!view.compare) {
    body.replaceChildren();
    el("compare-total").textContent = "";
    return;
  }
  try {
    const response = await api.gap(view.compare.a, view.compare.b);
    const model = buildComparePanel(response);
    el("compare-total").textContent =
      `total standardized distance ${model.totalDistance.toFixed(3)}`;
    body.replaceChildren(
      ...model.rows.map((row) => {
        const tr = document.createElement("tr");
        const cells = [
          row.feature,
          row.rawA.toPrecision(4),
          row.rawB.toPrecision(4),
          row.gap.toFixed(3),
        ];
        for (const text of cells) {
          const td = document.createElement("td");
          td.textContent = text;
          tr.appendChild(td);
        }
        return tr;
      }),
    );
  } catch (error) {
    el("compare-total").textContent =
      error instanceof Error && error.message ? error.message : "insufficient data";
    body.replaceChildren();
  }
}

async function onHover(fips: string | null): Promise<void> {
  view = { ...view, hovered: fips };
  writeViewToLocation(view);
  await renderTooltipFromState();
}

async function renderTooltipFromState(): Promise<void> {
  const tooltip = el("tooltip");
  if (!view.hovered || !data) {
    tooltip.hidden = true;
    return;
  }
  try {
    const county = await countyFor(view.hovered);
    if (view.hovered !== county.fips) return;
    let excluded = false;
    if (view.filter && county.cluster !== null) {
      const values = await valuesFor(view.filter.feature);
      const value = values.get(county.fips);
      excluded =
        value === undefined ||
        (view.filter.op === "gte"
          ? value < view.filter.threshold
          : value > view.filter.threshold);
    }
    const model = buildTooltip(county, view, excluded);
    el("tooltip-title").textContent = model.title;
    el("tooltip-subtitle").textContent = model.subtitle;
    el("tooltip-lines").replaceChildren(
      ...model.lines.map((line) => {
        const row = document.createElement("div");
        row.className = "tooltip-line";
        row.textContent = `${line.label}: ${line.value}`;
        return row;
      }),
    );
    tooltip.hidden = false;
  } catch {
    tooltip.hidden = true;
  }
}

function onCountyClick(fips: string, event: MouseEvent): void {
  // plain click picks county A, shift-click county B
  const compare = view.compare ?? { a: "", b: "" };
  const next = event.shiftKey ? { ...compare, b: fips } : { ...compare, a: fips };
  el<HTMLInputElement>("compare-a").value = next.a;
  el<HTMLInputElement>("compare-b").value = next.b;
  if (next.a && next.b) setView({ compare: next });
}

function bindControls(): void {
  if (!data) return;
  const variableSelect = el<HTMLSelectElement>("variable-select");
  const filterSelect = el<HTMLSelectElement>("filter-select");
  for (const feature of data.features) {
    variableSelect.add(new Option(feature.name, feature.name));
    filterSelect.add(new Option(feature.name, feature.name));
  }
  variableSelect.value = view.variable ?? data.features[0]?.name ?? "";
  if (!view.variable) view = { ...view, variable: variableSelect.value || null };

  variableSelect.addEventListener("change", () =>
    setView({ variable: variableSelect.value || null }),
  );

  const modeToggle = el<HTMLInputElement>("color-variable");
  modeToggle.checked = view.colorMode === "variable";
  modeToggle.addEventListener("change", () =>
    setView({ colorMode: modeToggle.checked ? "variable" : "cluster" }),
  );

  const opSelect = el<HTMLSelectElement>("filter-op");
  const slider = el<HTMLInputElement>("filter-threshold");
  const readout = el("filter-readout");
  const filterToggle = el<HTMLInputElement>("filter-enabled");

  const configureSlider = (featureName: string) => {
    const summary = data!.features.find((f) => f.name === featureName);
    if (!summary || summary.min === null || summary.max === null) return;
    slider.min = String(summary.min);
    slider.max = String(summary.max);
    slider.step = String((summary.max - summary.min) / 200 || 1);
  };

  const applyFilter = debounce(() => {
    if (!filterToggle.checked) {
      setView({ filter: null });
      return;
    }
    const summary = data!.features.find((f) => f.name === filterSelect.value);
    const threshold = clampThreshold(
      Number(slider.value),
      summary ?? { min: null, max: null },
    );
    readout.textContent = threshold.toPrecision(4);
    setView({
      filter: {
        feature: filterSelect.value,
        op: opSelect.value === "lte" ? "lte" : "gte",
        threshold,
      },
    });
  }, 150);

  if (view.filter) {
    filterToggle.checked = true;
    filterSelect.value = view.filter.feature;
    opSelect.value = view.filter.op;
    configureSlider(view.filter.feature);
    slider.value = String(view.filter.threshold);
    readout.textContent = view.filter.threshold.toPrecision(4);
  } else {
    configureSlider(filterSelect.value);
  }

  filterToggle.addEventListener("change", applyFilter);
  opSelect.addEventListener("change", applyFilter);
  slider.addEventListener("input", applyFilter);
  filterSelect.addEventListener("change", () => {
    configureSlider(filterSelect.value);
    slider.value = slider.min;
    applyFilter();
  });

  const compareA = el<HTMLInputElement>("compare-a");
  const compareB = el<HTMLInputElement>("compare-b");
  if (view.compare) {
    compareA.value = view.compare.a;
    compareB.value = view.compare.b;
  }
  el<HTMLButtonElement>("compare-go").addEventListener("click", () => {
    if (compareA.value && compareB.value) {
      setView({ compare: { a: compareA.value.trim(), b: compareB.value.trim() } });
    }
  });

  window.addEventListener("hashchange", () => {
    view = readViewFromLocation();
    void render();
  });
}

async function boot(): Promise<void> {
  view = readViewFromLocation();
  try {
    const [boundaries, assignments, features, clusters] = await Promise.all([
      fetch("boundaries.geojson").then((r) => {
        if (!r.ok) throw new Error("boundaries.geojson not found next to the UI");
        return r.json() as Promise<BoundaryCollection>;
      }),
      fetch("/api/assignments").then((r) => {
        if (!r.ok) throw new Error("assignments unavailable from the engine");
        return r.json() as Promise<AssignmentsFile>;
      }),
      api.features(),
      api.clusters(),
    ]);
    data = { boundaries, assignments, features, clusters };
  } catch (error) {
    el("diagnostics").textContent = String(error);
    return;
  }
  bindControls();
  await render();
}

if (typeof window !== "undefined" && "document" in globalThis) {
  void boot();
}
