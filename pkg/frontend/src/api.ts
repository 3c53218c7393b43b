// Thin typed client over the engine's read-only JSON API.

import type {
  AssignmentsFile,
  ClustersResponse,
  CountyResponse,
  DistributionResponse,
  FeatureSummary,
  GapResponse,
  ScatterResponse,
  StatesResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(url: string): Promise<T> {
  const resp = await fetch(url);
  if (!resp.ok) {
    let code = "http-error";
    let message = `${resp.status} ${resp.statusText}`;
    try {
      const body = await resp.json();
      if (body && typeof body.code === "string") {
        code = body.code;
        message = body.message ?? message;
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, code, message);
  }
  return (await resp.json()) as T;
}

export function createApi(baseUrl = "") {
  const root = baseUrl.replace(/\/$/, "");
  return {
    clusters: () => getJson<ClustersResponse>(`${root}/api/clusters`),
    features: () => getJson<FeatureSummary[]>(`${root}/api/features`),
    county: (fips: string) => getJson<CountyResponse>(`${root}/api/county/${fips}`),
    distribution: (feature: string, op: "gte" | "lte", threshold: number) =>
      getJson<DistributionResponse>(
        `${root}/api/distribution?feature=${encodeURIComponent(feature)}&op=${op}&threshold=${threshold}`,
      ),
    scatter: (x: string, y: string) =>
      getJson<ScatterResponse>(
        `${root}/api/scatter?x=${encodeURIComponent(x)}&y=${encodeURIComponent(y)}`,
      ),
    gap: (a: string, b: string) =>
      getJson<GapResponse>(
        `${root}/api/gap?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`,
      ),
    states: () => getJson<StatesResponse>(`${root}/api/states`),
    assignments: () => getJson<AssignmentsFile>(`${root}/api/assignments`),
    meta: () => getJson<Record<string, unknown>>(`${root}/api/meta`),
  };
}

export type Api = ReturnType<typeof createApi>;
