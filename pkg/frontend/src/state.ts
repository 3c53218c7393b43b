// View state and its URL-hash codec. Every durable piece of the view lives
// in the hash so a shared or reloaded URL reproduces the identical view.

export type ColorMode = "cluster" | "variable";
export type FilterOp = "gte" | "lte";

export interface Filter {
  feature: string;
  op: FilterOp;
  threshold: number;
}

export interface ViewState {
  variable: string | null;
  colorMode: ColorMode;
  filter: Filter | null;
  hovered: string | null;
  compare: { a: string; b: string } | null;
}

export const DEFAULT_VIEW: ViewState = {
  variable: null,
  colorMode: "cluster",
  filter: null,
  hovered: null,
  compare: null,
};

export function encodeView(view: ViewState): string {
  const params = new URLSearchParams();
  if (view.variable) params.set("v", view.variable);
  if (view.colorMode !== "cluster") params.set("cm", view.colorMode);
  if (view.filter) {
    params.set("ff", view.filter.feature);
    params.set("fo", view.filter.op);
    params.set("ft", String(view.filter.threshold));
  }
  if (view.hovered) params.set("h", view.hovered);
  if (view.compare) {
    params.set("a", view.compare.a);
    params.set("b", view.compare.b);
  }
  return params.toString();
}

export function decodeView(hash: string): ViewState {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  const params = new URLSearchParams(raw);
  const view: ViewState = { ...DEFAULT_VIEW };

  view.variable = params.get("v");
  view.colorMode = params.get("cm") === "variable" ? "variable" : "cluster";

  const feature = params.get("ff");
  const op = params.get("fo");
  const threshold = params.get("ft");
  if (feature && (op === "gte" || op === "lte") && threshold !== null) {
    const value = Number(threshold);
    if (Number.isFinite(value)) {
      view.filter = { feature, op, threshold: value };
    }
  }

  view.hovered = params.get("h");
  const a = params.get("a");
  const b = params.get("b");
  if (a && b) view.compare = { a, b };
  return view;
}

export function readViewFromLocation(): ViewState {
  return decodeView(window.location.hash);
}

export function writeViewToLocation(view: ViewState): void {
  const encoded = encodeView(view);
  const url =
    window.location.pathname + window.location.search + (encoded ? `#${encoded}` : "");
  window.history.replaceState(null, "", url);
}

/** Clamp a filter threshold into the feature's observed [min, max]. */
export function clampThreshold(
  value: number,
  summary: { min: number | null; max: number | null },
): number {
  if (summary.min !== null && value < summary.min) return summary.min;
  if (summary.max !== null && value > summary.max) return summary.max;
  return value;
}
