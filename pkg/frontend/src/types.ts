// Payload shapes returned by the engine API (read-only bundle server).

export interface ClustersResponse {
  k: number;
  sizes: number[];
  inertia: number;
  mean_silhouette: number;
  labels: Record<string, string>;
  recommended_k: number;
  converged: boolean;
  iterations: number;
}

export interface FeatureSummary {
  name: string;
  kind: string;
  source: string;
  units: string | null;
  min: number | null;
  max: number | null;
  median: number | null;
  missing: number;
}

export interface ExtremeFeature {
  feature: string;
  value: number;
  z: number;
}

export interface CountyResponse {
  fips: string;
  state: string;
  county_name: string;
  cluster: number | null;
  performance_label: string | null;
  reason: string | null;
  values: Record<string, number | null>;
  top_extremes: ExtremeFeature[];
}

export interface DistributionResponse {
  feature: string;
  op: "gte" | "lte";
  threshold: number;
  counts: Record<string, number>;
  missing: number;
  total_clustered: number;
}

export interface ScatterPoint {
  fips: string;
  x: number;
  y: number;
  cluster: number;
}

export interface ScatterResponse {
  x_feature: string;
  y_feature: string;
  points: ScatterPoint[];
  excluded: number;
}

export interface GapEntry {
  feature: string;
  gap: number;
  raw_a: number;
  raw_b: number;
}

export interface GapResponse {
  fips_a: string;
  fips_b: string;
  entries: GapEntry[];
  total_distance: number;
  skipped_features: string[];
}

export interface StatesResponse {
  per_state: Record<string, Record<string, { count: number; fraction: number }>>;
  exceed: { state: string; cluster: number; fraction: number }[];
  threshold: number;
  total_counties: number;
}

// Boundary file: FIPS-keyed GeoJSON (Polygon / MultiPolygon features).

export interface BoundaryFeature {
  type: "Feature";
  id?: string;
  properties: { fips?: string; name?: string } & Record<string, unknown>;
  geometry: {
    type: "Polygon" | "MultiPolygon";
    coordinates: number[][][] | number[][][][];
  };
}

export interface BoundaryCollection {
  type: "FeatureCollection";
  features: BoundaryFeature[];
}

// Assignment export (choropleth file written by the engine).

export interface AssignmentEntry {
  cluster: number | null;
  performance_label: string | null;
  state: string;
  county_name: string;
  values: Record<string, number | null>;
  reason?: string;
}

export type AssignmentsFile = Record<string, AssignmentEntry>;
