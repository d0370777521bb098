"""HTTP JSON API over a persisted model artifact.

The artifact is loaded once at app creation and shared read-only by all
handlers; permutation importance is precomputed from the bundled evaluation
slice so GET /importance is a cache hit.
"""

from __future__ import annotations

import json
import time

import numpy as np
from fastapi import FastAPI, HTTPException, Request

from ..artifact import LoadedArtifact, load
from ..data import Dataset
from ..metrics import permutation_importance
from .schemas import HealthResponse, ImportanceEntry, PredictResponse, SchemaEntry


def _compute_importance(
    art: LoadedArtifact, max_rows: int, seed: int
) -> list[ImportanceEntry] | None:
    if art.eval_sample is None:
        return None
    features, labels = art.eval_sample
    n = min(max_rows, features.shape[0])
    sample = Dataset.from_arrays(features[:n], labels[:n], names=art.feature_names)
    drops = permutation_importance(art.model, sample, metric="roc_auc", repeats=3, seed=seed)
    entries = [
        ImportanceEntry(name=name, score=max(mean, 0.0)) for name, (mean, _) in drops.items()
    ]
    entries.sort(key=lambda e: (-e.score, e.name))
    return entries


def create_app(
    model_path: str | None = None,
    artifact: LoadedArtifact | None = None,
    importance_rows: int = 512,
    importance_seed: int = 0,
    allow_origin: str | None = None,
) -> FastAPI:
    app = FastAPI(title="diabrisk scoring service")
    if allow_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[allow_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    if artifact is None and model_path is not None:
        artifact = load(model_path)
    app.state.artifact = artifact
    app.state.started = time.monotonic()
    app.state.importance = (
        _compute_importance(artifact, importance_rows, importance_seed) if artifact else None
    )

    def require_model() -> LoadedArtifact:
        if app.state.artifact is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return app.state.artifact

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        art = app.state.artifact
        return HealthResponse(
            status="ok" if art is not None else "loading",
            model_version=art.checksum[:12] if art is not None else None,
            uptime_seconds=time.monotonic() - app.state.started,
        )

    @app.get("/schema", response_model=list[SchemaEntry])
    def feature_schema() -> list[SchemaEntry]:
        art = require_model()
        if art.schema is None:
            raise HTTPException(status_code=503, detail="artifact carries no feature schema")
        return [
            SchemaEntry(
                name=s.name,
                kind=s.kind,
                observed_min=s.observed_min,
                observed_max=s.observed_max,
            )
            for s in art.schema
        ]

    @app.get("/importance", response_model=list[ImportanceEntry])
    def importance() -> list[ImportanceEntry]:
        require_model()
        if app.state.importance is None:
            raise HTTPException(
                status_code=503, detail="artifact bundles no evaluation sample"
            )
        return app.state.importance

    @app.post("/predict", response_model=PredictResponse)
    async def predict(request: Request) -> PredictResponse:
        art = require_model()
        try:
            body = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise HTTPException(status_code=400, detail="malformed JSON body") from None
        if not isinstance(body, dict):
            raise HTTPException(
                status_code=422, detail="request body must be a JSON object of feature values"
            )

        unknown = sorted(set(body) - set(art.feature_names))
        if unknown:
            raise HTTPException(status_code=422, detail=f"unknown feature: {unknown[0]}")
        missing = [name for name in art.feature_names if name not in body]
        if missing:
            raise HTTPException(status_code=422, detail=f"missing feature: {missing[0]}")
        for name in art.feature_names:
            value = body[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise HTTPException(
                    status_code=422, detail=f"feature {name} must be numeric"
                )

        warnings: list[str] = []
        if art.schema is not None:
            for s in art.schema:
                value = float(body[s.name])
                if not s.observed_min <= value <= s.observed_max:
                    warnings.append(
                        f"{s.name}={value:g} outside observed range "
                        f"[{s.observed_min:g}, {s.observed_max:g}]"
                    )

        raw = np.array([[float(body[name]) for name in art.feature_names]])
        probability = float(art.model.predict_proba(art.scaler.transform(raw))[0])
        return PredictResponse(
            label="diabetic" if probability >= 0.5 else "non-diabetic",
            probability=probability,
            confidence=max(probability, 1.0 - probability),
            warnings=warnings,
        )

    return app
