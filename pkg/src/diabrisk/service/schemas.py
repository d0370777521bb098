"""Pydantic response models for the scoring service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class PredictResponse(BaseModel):
    label: str = Field(description='"diabetic" iff probability >= 0.5')
    probability: float = Field(ge=0.0, le=1.0)
    confidence: float = Field(ge=0.0, le=1.0, description="max(p, 1-p)")
    warnings: list[str] = Field(default_factory=list)


class SchemaEntry(BaseModel):
    name: str
    kind: str
    observed_min: float
    observed_max: float


class ImportanceEntry(BaseModel):
    name: str
    score: float


class HealthResponse(BaseModel):
    status: str
    model_version: str | None = None
    uptime_seconds: float

    model_config = {"protected_namespaces": ()}
