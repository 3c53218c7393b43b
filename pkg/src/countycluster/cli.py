"""Command-line driver for the pipeline and the explorer service.

Subcommands: ingest, cluster, sweep, importance, profile, export, serve, gap.
Exit codes: 0 success, 2 usage error, 1 data/processing error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import socket
import sys
from pathlib import Path

from .bundle import AnalysisBundle, write_assignments
from .cluster import sweep_csv, sweep_k
from .errors import EngineError, InvalidDescriptor, MissingFile, PortInUse
from .ingest import filter_sparse_rows, impute_median
from .ingest.master import MasterTable
from .interpret import county_gap, top_features
from .pca import pca_fit, project
from .pipeline import RunConfig, run_analysis, run_ingest
from .preprocess import zscore

logger = logging.getLogger(__name__)

INGEST_REPORT_FILE = "ingest_report.json"


def _add_common(parser: argparse.ArgumentParser, needs_config: bool) -> None:
    parser.add_argument(
        "--config", help="JSON run config", required=needs_config, default=None
    )
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--out", default=None, help="output / bundle directory")
    parser.add_argument(
        "--json", action="store_true", help="machine-readable output and errors"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="countycluster",
        description="County clustering analytics engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fuse datasets into master.csv")
    _add_common(p, needs_config=True)

    p = sub.add_parser("cluster", help="standardize, PCA, sweep k, fit, interpret")
    _add_common(p, needs_config=True)
    p.add_argument("--k", type=int, default=None, help="override the elbow-selected k")

    p = sub.add_parser("sweep", help="write the k-sweep CSV for plotting")
    _add_common(p, needs_config=True)

    p = sub.add_parser("importance", help="export feature importances")
    _add_common(p, needs_config=False)
    p.add_argument("--top", type=int, default=10, help="rows to print")

    p = sub.add_parser("profile", help="export per-cluster profiles")
    _add_common(p, needs_config=False)

    p = sub.add_parser("export", help="write choropleth assignments.json")
    _add_common(p, needs_config=False)

    p = sub.add_parser("serve", help="serve the explorer API over a bundle")
    _add_common(p, needs_config=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000, help="0 picks a free port")
    p.add_argument("--ui", default=None, help="static UI directory to mount at /ui")

    p = sub.add_parser("gap", help="feature-gap analysis between two counties")
    _add_common(p, needs_config=False)
    p.add_argument("fips_a")
    p.add_argument("fips_b")
    return parser


def _load_config(args) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out_dir = args.out
    return config


def _out_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    if args.config:
        return Path(_load_config(args).out_dir)
    raise ValueError("--out (bundle directory) is required")


def _load_master(out_dir: Path) -> MasterTable:
    master_path = out_dir / "master.csv"
    if not master_path.exists():
        raise MissingFile(
            f"{master_path} not found; run `countycluster ingest` first"
        )
    return MasterTable.read(master_path, out_dir / "dictionary.json")


def _emit(args, payload: dict, human: str) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True) if args.json else human)


def cmd_ingest(args) -> int:
    config = _load_config(args)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_ingest(config)
    result.master.write(out_dir / "master.csv", out_dir / "dictionary.json")
    (out_dir / INGEST_REPORT_FILE).write_text(
        json.dumps(result.report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _emit(
        args,
        dict(result.report, out_dir=str(out_dir)),
        "ingested {datasets} datasets -> {counties} counties x {features} features\n"
        "dropped columns: {dropped_columns}\n"
        "dedup rows: {dedup_rows}, parse warnings: {parse_warnings}, "
        "crosswalk misses: {dropped_crosswalk_rows}\n"
        "master written to {out}".format(out=out_dir / "master.csv", **result.report),
    )
    return 0


def cmd_cluster(args) -> int:
    config = _load_config(args)
    if args.k is not None:
        config.k_override = args.k
    out_dir = Path(config.out_dir)
    master = _load_master(out_dir)
    report_path = out_dir / INGEST_REPORT_FILE
    ingest_report = (
        json.loads(report_path.read_text(encoding="utf-8"))
        if report_path.exists()
        else None
    )
    bundle = run_analysis(master, config, ingest_report)
    bundle.save(out_dir)
    payload = {
        "out_dir": str(out_dir),
        "recommended_k": bundle.sweep.recommended_k,
        "final_k": bundle.clusters.k,
        "inertia": bundle.clusters.inertia,
        "mean_silhouette": bundle.mean_silhouette,
        "counties_clustered": len(bundle.clusters.row_ids),
        "performance_labels": {
            str(c): v for c, v in bundle.report.performance.labels.items()
        },
    }
    _emit(
        args,
        payload,
        "clustered {n} counties: recommended k={rk}, final k={k}, "
        "inertia={inertia:.4f}, silhouette={sil:.4f}\nbundle written to {out}".format(
            n=payload["counties_clustered"],
            rk=payload["recommended_k"],
            k=payload["final_k"],
            inertia=payload["inertia"],
            sil=payload["mean_silhouette"],
            out=out_dir,
        ),
    )
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args)
    out_dir = Path(config.out_dir)
    master = _load_master(out_dir)
    filtered = filter_sparse_rows(master, config.row_threshold, min_rows=config.k_max + 1)
    scaled, _ = zscore(impute_median(filtered))
    if config.use_pca:
        scaled = project(pca_fit(scaled, variance_target=config.variance_target), scaled)
    report = sweep_k(
        scaled.values,
        k_min=config.k_min,
        k_max=config.k_max,
        restarts=config.restarts,
        seed=config.seed,
    )
    path = out_dir / "sweep.csv"
    path.write_text(sweep_csv(report), encoding="utf-8")
    _emit(
        args,
        dict(report.to_dict(), csv=str(path)),
        f"swept k={config.k_min}..{config.k_max}; recommended k={report.recommended_k}"
        f"{' (low confidence)' if report.low_confidence else ''}\nwrote {path}",
    )
    return 0


def cmd_importance(args) -> int:
    out_dir = _out_dir(args)
    bundle = AnalysisBundle.load(out_dir)
    importance = bundle.report.importance_original
    path = out_dir / "importance.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", "importance", "wcss", "tss", "degenerate"])
        for e in importance.entries:
            writer.writerow([e.feature, repr(e.importance), repr(e.wcss), repr(e.tss), e.degenerate])
    (out_dir / "importance.json").write_text(
        json.dumps(
            {
                "original_space": importance.to_dict(),
                "clustered_space": bundle.report.importance_clustered.to_dict(),
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    rows = top_features(importance, args.top)
    lines = [f"top {len(rows)} features by importance (original feature space):"]
    lines += [f"  {e.feature}: {e.importance:.4f}" for e in rows]
    _emit(
        args,
        {"top": [e.to_dict() for e in rows], "csv": str(path)},
        "\n".join(lines) + f"\nwrote {path}",
    )
    return 0


def cmd_profile(args) -> int:
    out_dir = _out_dir(args)
    bundle = AnalysisBundle.load(out_dir)
    profile = bundle.report.profile
    path = out_dir / "profile.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cluster", "feature", "mean", "median", "std", "rating", "rank"])
        for c in range(profile.k):
            for feature in profile.features:
                cell = profile.cells[c][feature]
                writer.writerow(
                    [
                        c,
                        feature,
                        "" if cell.mean is None else repr(cell.mean),
                        "" if cell.median is None else repr(cell.median),
                        "" if cell.std is None else repr(cell.std),
                        cell.rating or "",
                        cell.rank if cell.rank is not None else "",
                    ]
                )
    (out_dir / "profile.json").write_text(
        json.dumps(profile.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _emit(
        args,
        {"csv": str(path), "clusters": profile.cluster_sizes},
        f"profiled {profile.k} clusters x {len(profile.features)} features\nwrote {path}",
    )
    return 0


def cmd_export(args) -> int:
    out_dir = _out_dir(args)
    bundle = AnalysisBundle.load(out_dir)
    path = out_dir / "assignments.json"
    write_assignments(bundle, path)
    _emit(
        args,
        {"assignments": str(path), "counties": bundle.master.n_rows},
        f"wrote {path} ({bundle.master.n_rows} counties)",
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    out_dir = _out_dir(args)
    bundle = AnalysisBundle.load(out_dir)
    ui_dir = Path(args.ui) if args.ui else Path(__file__).resolve().parents[2] / "frontend" / "dist"

    port = args.port
    if port == 0:
        with socket.socket() as s:
            s.bind((args.host, 0))
            port = s.getsockname()[1]
    print(f"serving bundle {out_dir} at http://{args.host}:{port}", flush=True)

    app = create_app(bundle, ui_dir=ui_dir if ui_dir.is_dir() else None)
    try:
        uvicorn.run(app, host=args.host, port=port, log_level="warning")
    except OSError as e:
        raise PortInUse(f"cannot bind {args.host}:{port}: {e}") from e
    return 0


def cmd_gap(args) -> int:
    out_dir = _out_dir(args)
    bundle = AnalysisBundle.load(out_dir)
    gap = county_gap(bundle.master, args.fips_a, args.fips_b, bundle.scaler)
    lines = [
        f"gap {args.fips_a} vs {args.fips_b}: total standardized distance "
        f"{gap.total_distance:.4f}"
    ]
    for e in gap.entries:
        lines.append(f"  {e.feature}: gap {e.gap:.4f} ({e.raw_a:g} vs {e.raw_b:g})")
    if gap.skipped_features:
        lines.append(f"  skipped (missing data): {', '.join(gap.skipped_features)}")
    _emit(args, gap.to_dict(), "\n".join(lines))
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "cluster": cmd_cluster,
    "sweep": cmd_sweep,
    "importance": cmd_importance,
    "profile": cmd_profile,
    "export": cmd_export,
    "serve": cmd_serve,
    "gap": cmd_gap,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    json_errors = getattr(args, "json", False)
    try:
        return COMMANDS[args.command](args)
    except InvalidDescriptor as e:
        # malformed descriptor/config files are usage problems, not data errors
        _print_error(e.to_dict(), json_errors)
        return 2
    except EngineError as e:
        _print_error(e.to_dict(), json_errors)
        return 1
    except (ValueError, json.JSONDecodeError) as e:
        _print_error({"code": "usage-error", "message": str(e)}, json_errors)
        return 2


def _print_error(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    else:
        print(f"error [{payload['code']}]: {payload['message']}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
