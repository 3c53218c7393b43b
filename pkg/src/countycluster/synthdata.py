"""Synthetic data generators: Gaussian blob matrices for algorithm checks and
an 18-table county corpus for exercising the full pipeline end to end.

Everything is seeded and deterministic so generated corpora are reproducible
byte for byte.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def gaussian_blobs(
    n_points: int = 300,
    n_dims: int = 10,
    n_clusters: int = 3,
    cluster_std: float = 0.5,
    center_distance: float = 6.0,
    seed: int = 7,
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic Gaussian clusters around simplex-style centers.

    Centers sit at ``center_distance / sqrt(2)`` along distinct axes, so every
    pair of centers is exactly ``center_distance`` apart.
    """
    if n_clusters > n_dims:
        raise ValueError("need n_dims >= n_clusters for axis-aligned centers")
    rng = np.random.default_rng(seed)
    centers = np.zeros((n_clusters, n_dims))
    for i in range(n_clusters):
        centers[i, i] = center_distance / np.sqrt(2.0)

    sizes = [n_points // n_clusters] * n_clusters
    for i in range(n_points % n_clusters):
        sizes[i] += 1

    points = []
    labels = []
    for c, size in enumerate(sizes):
        points.append(centers[c] + cluster_std * rng.standard_normal((size, n_dims)))
        labels.extend([c] * size)
    return np.vstack(points), np.asarray(labels)


# --- synthetic county corpus --------------------------------------------------

STATES = ["01", "02", "03", "04", "05"]
STATE_CODES = {"01": "AA", "02": "BB", "03": "CC", "04": "DD", "05": "EE"}

GROUP_LOW, GROUP_MEDIUM, GROUP_HIGH = 0, 1, 2

# counties per performance group (low, medium, high) for each fake state;
# state 01 concentrates low performers, state 02 high performers
STATE_GROUP_QUOTAS = {
    "01": (42, 12, 6),
    "02": (6, 12, 42),
    "03": (20, 20, 20),
    "04": (25, 20, 15),
    "05": (15, 25, 20),
}

# feature -> ((low mean, medium mean, high mean), within-group std)
GROUP_FEATURES = {
    "hs_education_pct": ((72.0, 82.0, 92.0), 2.0),
    "college_education_pct": ((18.0, 28.0, 38.0), 2.5),
    "median_income": ((42000.0, 55000.0, 70000.0), 2500.0),
    "poverty_rate": ((22.0, 15.0, 9.0), 1.5),
    "unemployment_rate": ((9.5, 6.5, 4.0), 0.6),
    "vote_share_dem": ((0.30, 0.55, 0.50), 0.03),
    "population_density": ((45.0, 520.0, 180.0), 35.0),
    "crime_rate_per_100k": ((520.0, 380.0, 260.0), 25.0),
    "mask_usage_score": ((2.1, 3.0, 3.9), 0.15),
    "essential_worker_pct": ((0.34, 0.28, 0.22), 0.015),
    "vaccination_rate": ((0.38, 0.55, 0.72), 0.025),
    "booster_rate": ((0.20, 0.32, 0.45), 0.02),
    "tests_per_person": ((0.9, 1.4, 1.9), 0.08),
    "positivity_rate": ((0.16, 0.10, 0.05), 0.008),
    "confirmed_cases_per_person": ((0.14, 0.10, 0.06), 0.006),
    "deaths_per_person": ((0.0030, 0.0020, 0.0010), 0.00012),
    "population": ((30000.0, 150000.0, 80000.0), 9000.0),
    "broadband_pct": ((55.0, 70.0, 85.0), 3.0),
    "media_exposure_index": ((40.0, 60.0, 75.0), 5.0),  # sparse, gets dropped
    "icu_occupancy_rate": ((0.82, 0.66, 0.52), 0.04),  # sparse, gets dropped
    "federal_education_investment": ((1.2e6, 2.4e6, 3.5e6), 2e5),  # sparse
}

SPARSE_FEATURES = {
    "media_exposure_index": 0.55,
    "icu_occupancy_rate": 0.60,
    "federal_education_investment": 0.70,
}

# dataset id -> (key kind, feature names); geo carries the identifiers
CORPUS_DATASETS = [
    ("geo", "fips", []),
    ("education", "fips", ["hs_education_pct", "college_education_pct"]),
    ("income", "fips", ["median_income", "poverty_rate"]),
    ("unemployment", "fips", ["unemployment_rate"]),
    ("election", "fips", ["vote_share_dem"]),
    ("crime", "fips", ["crime_rate_per_100k"]),
    ("mask_usage", "fips", ["mask_usage_score"]),
    ("population", "fips", ["population", "population_density"]),
    ("covid_cases", "fips", ["confirmed_cases_per_person", "positivity_rate"]),
    ("covid_deaths", "fips", ["deaths_per_person"]),
    ("vaccination", "fips", ["vaccination_rate", "booster_rate"]),
    ("covid_testing", "fips", ["tests_per_person"]),
    ("essential_workers", "fips", ["essential_worker_pct"]),
    ("broadband", "fips", ["broadband_pct", "media_exposure_index"]),
    ("icu", "fips", ["icu_occupancy_rate"]),
    ("federal_education", "fips", ["federal_education_investment"]),
    ("hospital_beds", "zip", ["staffed_beds"]),
    ("testing_clinics", "point", ["clinic_count"]),
]

BASE_MISSING_RATE = 0.03
SPARSE_COUNTY_MISSING_RATE = 0.7
N_SPARSE_COUNTIES = 5


def _county_cell(state: str, index: int) -> tuple[float, float]:
    lat = 30.0 + int(state) + (index // 10) / 10.0
    lon = -100.0 + (index % 10) / 10.0
    return lat, lon


def county_corpus(out_dir: str | Path, seed: int = 2024, n_per_state: int = 60) -> dict:
    """Write an 18-table synthetic county corpus plus crosswalk and config.

    Three latent performance groups drive every informative feature; state 01
    concentrates low performers (>60%), state 02 high performers. Returns the
    generative truth (group per fips, sparse counties) for verification.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    counties = []  # (fips, state_code, name, group)
    for state in STATES:
        quotas = STATE_GROUP_QUOTAS[state]
        scaled = [round(q * n_per_state / 60) for q in quotas]
        scaled[0] += n_per_state - sum(scaled)
        groups = (
            [GROUP_LOW] * scaled[0] + [GROUP_MEDIUM] * scaled[1] + [GROUP_HIGH] * scaled[2]
        )
        rng.shuffle(groups)
        for i, group in enumerate(groups):
            fips = f"{state}{i + 1:03d}"
            name = f"{STATE_CODES[state]} County {i + 1}"
            counties.append((fips, STATE_CODES[state], name, group))

    truth = {fips: group for fips, _, _, group in counties}
    sparse_candidates = [fips for fips, _, _, _ in counties if fips.startswith("03")]
    sparse_fips = set(
        rng.choice(sparse_candidates, size=N_SPARSE_COUNTIES, replace=False).tolist()
    )

    values: dict[str, dict[str, float | None]] = {}
    for feature, ((low, med, high), std) in GROUP_FEATURES.items():
        means = [low, med, high]
        sparse_rate = SPARSE_FEATURES.get(feature)
        per_county = {}
        for fips, _, _, group in counties:
            drop_p = sparse_rate if sparse_rate is not None else BASE_MISSING_RATE
            if fips in sparse_fips:
                drop_p = max(drop_p, SPARSE_COUNTY_MISSING_RATE)
            if rng.uniform() < drop_p:
                per_county[fips] = None
            else:
                per_county[fips] = float(means[group] + std * rng.standard_normal())
        values[feature] = per_county

    def fmt(v: float | None) -> str:
        return "" if v is None else f"{v:.6f}"

    # fips-keyed tables
    for ds_id, kind, features in CORPUS_DATASETS:
        if kind != "fips":
            continue
        path = out_dir / f"{ds_id}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if ds_id == "geo":
                writer.writerow(["fips", "state", "county_name"])
                for fips, state_code, name, _ in counties:
                    writer.writerow([fips, state_code, name])
                continue
            writer.writerow(["fips"] + features)
            for fips, _, _, _ in counties:
                row = [fips] + [fmt(values[f][fips]) for f in features]
                writer.writerow(row)
            if ds_id == "crime":
                # a duplicate county row with junk data; first occurrence wins
                writer.writerow([counties[0][0], "999999.0"])
        if ds_id == "unemployment":
            # plant a few unparseable cells to exercise parse warnings
            text = path.read_text(encoding="utf-8").splitlines()
            for line_no in (3, 7, 11):
                fips, _ = text[line_no].split(",", 1)
                text[line_no] = f"{fips},N/A"
            path.write_text("\n".join(text) + "\n", encoding="utf-8")

    # crosswalk: two wholly-contained zips per county plus a shared zip pair,
    # and one grid cell per county for the point dataset
    crosswalk_rows = []
    zip_rows = []
    zip_counter = 90000
    by_state: dict[str, list[tuple[str, int]]] = {}
    for fips, _, _, group in counties:
        by_state.setdefault(fips[:2], []).append((fips, group))
    beds_means = {GROUP_LOW: 150.0, GROUP_MEDIUM: 420.0, GROUP_HIGH: 300.0}
    for state, state_counties in by_state.items():
        for i, (fips, group) in enumerate(state_counties):
            for _ in range(2):
                z = str(zip_counter)
                zip_counter += 1
                crosswalk_rows.append((z, fips, 1.0))
                zip_rows.append((z, beds_means[group] / 2 + 12.0 * rng.standard_normal()))
            if i + 1 < len(state_counties):
                z = str(zip_counter)
                zip_counter += 1
                neighbor = state_counties[i + 1][0]
                crosswalk_rows.append((z, fips, 0.6))
                crosswalk_rows.append((z, neighbor, 0.4))
                zip_rows.append((z, 40.0 + 8.0 * rng.standard_normal()))

    clinic_rows = []
    clinic_counts = {GROUP_LOW: 1, GROUP_MEDIUM: 3, GROUP_HIGH: 2}
    for fips, _, _, group in counties:
        state, index = fips[:2], int(fips[2:]) - 1
        lat, lon = _county_cell(state, index)
        crosswalk_rows.append((f"{lat:.1f},{lon:.1f}", fips, 1.0))
        n_clinics = clinic_counts[group] + int(rng.integers(0, 2))
        for _ in range(n_clinics):
            clinic_rows.append(
                (
                    lat + float(rng.uniform(0.01, 0.04)),
                    lon + float(rng.uniform(0.01, 0.04)),
                    1.0,
                )
            )

    with open(out_dir / "crosswalk.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source_key", "fips", "weight"])
        for source_key, fips, weight in crosswalk_rows:
            writer.writerow([source_key, fips, f"{weight:g}"])

    with open(out_dir / "hospital_beds.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["zip", "staffed_beds"])
        for z, beds in zip_rows:
            writer.writerow([z, f"{beds:.6f}"])

    with open(out_dir / "testing_clinics.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lat", "lon", "clinic_count"])
        for lat, lon, count in clinic_rows:
            writer.writerow([f"{lat:.6f}", f"{lon:.6f}", f"{count:g}"])

    descriptors = []
    for ds_id, kind, features in CORPUS_DATASETS:
        if ds_id == "geo":
            descriptors.append(
                {
                    "id": "geo",
                    "path": "geo.csv",
                    "key": {"kind": "fips", "column": "fips"},
                    "columns": [
                        {"name": "state", "kind": "identifier"},
                        {"name": "county_name", "kind": "identifier"},
                    ],
                }
            )
            continue
        if kind == "fips":
            key = {"kind": "fips", "column": "fips"}
        elif kind == "zip":
            key = {"kind": "zip", "column": "zip"}
        else:
            key = {"kind": "point", "lat": "lat", "lon": "lon"}
        agg = {"staffed_beds": "sum", "clinic_count": "sum"}
        columns = [
            {"name": f, "kind": "numeric", "aggregation": agg.get(f, "mean")}
            for f in features
        ]
        descriptors.append(
            {"id": ds_id, "path": f"{ds_id}.csv", "key": key, "columns": columns}
        )

    (out_dir / "datasets.json").write_text(
        json.dumps(descriptors, indent=2) + "\n", encoding="utf-8"
    )

    config = {
        "datasets_path": "datasets.json",
        "crosswalk_path": "crosswalk.csv",
        "seed": seed,
        "display_features": [
            "mask_usage_score",
            "vaccination_rate",
            "positivity_rate",
            "hs_education_pct",
            "median_income",
        ],
    }
    (out_dir / "config.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8"
    )

    return {
        "truth": truth,
        "sparse_fips": sorted(sparse_fips),
        "n_counties": len(counties),
        "states": dict(STATE_CODES),
    }


def _main() -> None:
    import argparse

    parser = argparse.ArgumentParser(description="Generate a synthetic county corpus")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--counties-per-state", type=int, default=60)
    args = parser.parse_args()
    info = county_corpus(args.out, seed=args.seed, n_per_state=args.counties_per_state)
    print(f"wrote {info['n_counties']} counties across {len(info['states'])} states to {args.out}")


if __name__ == "__main__":
    _main()
