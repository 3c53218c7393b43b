"""FastAPI app exposing a loaded analysis bundle as read-only endpoints.

The bundle is immutable after load, so every response is deterministic and
concurrent reads need no synchronization.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..bundle import AnalysisBundle, export_assignments, filter_distribution
from ..errors import BadOperator, EngineError, UnknownCounty, UnknownFeature
from ..interpret import county_gap, scatter_pairs
from . import schemas

logger = logging.getLogger(__name__)

ERROR_STATUS = {
    UnknownFeature: 404,
    UnknownCounty: 404,
    BadOperator: 400,
}


def _feature_summaries(bundle: AnalysisBundle) -> list[schemas.FeatureSummary]:
    out = []
    for name in bundle.master.features:
        info = bundle.master.feature_info[name]
        if info.kind != "numeric":
            continue
        present = [v for v in bundle.master.column_values(name) if v is not None]
        missing = bundle.master.n_rows - len(present)
        arr = np.asarray(present, dtype=np.float64) if present else None
        out.append(
            schemas.FeatureSummary(
                name=name,
                kind=info.kind,
                source=info.source,
                units=info.units,
                min=float(arr.min()) if arr is not None else None,
                max=float(arr.max()) if arr is not None else None,
                median=float(np.median(arr)) if arr is not None else None,
                missing=missing,
            )
        )
    return out


def create_app(bundle: AnalysisBundle, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="countycluster explorer API", version="0.1.0")
    features = _feature_summaries(bundle)
    assignments = bundle.assignments_by_fips()
    labels = bundle.report.performance.labels

    @app.exception_handler(EngineError)
    async def engine_error_handler(_: Request, exc: EngineError):
        status = ERROR_STATUS.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content=schemas.ErrorBody(code=exc.code, message=exc.message).model_dump(),
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content=schemas.ErrorBody(
                code="validation-error", message=str(exc.errors())
            ).model_dump(),
        )

    @app.get("/api/meta")
    def api_meta() -> dict:
        return bundle.meta

    @app.get("/api/clusters", response_model=schemas.ClustersResponse)
    def api_clusters():
        model = bundle.clusters
        return schemas.ClustersResponse(
            k=model.k,
            sizes=model.cluster_sizes(),
            inertia=model.inertia,
            mean_silhouette=bundle.mean_silhouette,
            labels=labels,
            recommended_k=bundle.sweep.recommended_k,
            converged=model.converged,
            iterations=model.iterations,
        )

    @app.get("/api/sweep", response_model=schemas.SweepResponse)
    def api_sweep():
        return schemas.SweepResponse(**bundle.sweep.to_dict())

    @app.get("/api/features", response_model=list[schemas.FeatureSummary])
    def api_features():
        return features

    @app.get("/api/county/{fips}", response_model=schemas.CountyResponse)
    def api_county(fips: str):
        row = bundle.master.rows.get(fips)
        if row is None:
            raise UnknownCounty(f"county {fips} not in master table")
        cluster = assignments.get(fips)
        values = {
            f: row.cells.get(f)
            for f in bundle.master.features
            if bundle.master.feature_info[f].kind == "numeric"
        }
        extremes = []
        for i, feature in enumerate(bundle.scaler.columns):
            raw = row.cells.get(feature)
            if raw is None:
                continue
            z = (raw - bundle.scaler.means[i]) / bundle.scaler.stds[i]
            extremes.append(
                schemas.ExtremeFeature(feature=feature, value=raw, z=float(z))
            )
        extremes.sort(key=lambda e: (-abs(e.z), e.feature))
        return schemas.CountyResponse(
            fips=fips,
            state=row.state,
            county_name=row.county_name,
            cluster=cluster,
            performance_label=labels[cluster] if cluster is not None else None,
            reason=None if cluster is not None else "filtered",
            values=values,
            top_extremes=extremes[:3],
        )

    @app.get("/api/distribution", response_model=schemas.DistributionResponse)
    def api_distribution(
        feature: str, op: str = Query(...), threshold: float = Query(...)
    ):
        result = filter_distribution(bundle, feature, op, threshold)
        return schemas.DistributionResponse(**result.to_dict())

    @app.get("/api/scatter", response_model=schemas.ScatterResponse)
    def api_scatter(x: str, y: str):
        data = scatter_pairs(bundle.master, bundle.clusters, x, y)
        return schemas.ScatterResponse(**data.to_dict())

    @app.get("/api/importance", response_model=schemas.ImportanceResponse)
    def api_importance():
        return schemas.ImportanceResponse(
            clustered_space=schemas.ImportanceSpace(
                **bundle.report.importance_clustered.to_dict()
            ),
            original_space=schemas.ImportanceSpace(
                **bundle.report.importance_original.to_dict()
            ),
        )

    @app.get("/api/profile", response_model=schemas.ProfileResponse)
    def api_profile():
        payload = bundle.report.profile.to_dict()
        payload["performance_labels"] = {
            str(c): v for c, v in labels.items()
        }
        return schemas.ProfileResponse(**payload)

    @app.get("/api/states", response_model=schemas.StatesResponse)
    def api_states():
        return schemas.StatesResponse(**bundle.report.states.to_dict())

    @app.get("/api/gap", response_model=schemas.GapResponse)
    def api_gap(a: str, b: str):
        gap = county_gap(bundle.master, a, b, bundle.scaler)
        return schemas.GapResponse(**gap.to_dict())

    @app.get("/api/assignments")
    def api_assignments() -> dict:
        # same payload as the exported assignments.json, kept in sync with
        # the loaded bundle so the UI needs no file copy
        return export_assignments(bundle)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")
        logger.info("serving UI assets from %s", ui_dir)

    return app
