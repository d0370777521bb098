"""Versioned, checksummed persistence for trained models.

Artifacts are JSON files. Every float is stored bit-exactly: arrays as
base64-encoded raw IEEE-754 bytes, scalars as C99 hex literals. The sha256
checksum covers the canonical serialization of the payload, so any corrupted
value is rejected at load time.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, fields, is_dataclass
from pathlib import Path

import numpy as np

from .data import FeatureSchema, Scaler
from .ensemble import StackModel, StackSpec
from .errors import ArtifactError
from .learners import GbdtParams, LearnerSpec, TrainedModel
from .learners.bayes import GaussianNbModel
from .learners.knn import KnnModel
from .learners.linear import LinearSvcModel, LogisticModel
from .learners.trees import DecisionTree, ForestModel, GbdtModel, TreeModel

FORMAT_VERSION = 1

_REGISTRY = {
    cls.__name__: cls
    for cls in (
        DecisionTree,
        FeatureSchema,
        ForestModel,
        GaussianNbModel,
        GbdtModel,
        GbdtParams,
        KnnModel,
        LearnerSpec,
        LinearSvcModel,
        LogisticModel,
        Scaler,
        StackModel,
        StackSpec,
        TrainedModel,
        TreeModel,
    )
}


def _encode(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return {"__f64__": float(value).hex()}
    if isinstance(value, np.ndarray):
        data = np.ascontiguousarray(value)
        return {
            "__ndarray__": {
                "dtype": str(data.dtype),
                "shape": list(data.shape),
                "data": base64.b64encode(data.tobytes()).decode("ascii"),
            }
        }
    if isinstance(value, tuple):
        return {"__tuple__": [_encode(v) for v in value]}
    if isinstance(value, list):
        return [_encode(v) for v in value]
    if isinstance(value, dict):
        return {"__map__": [[_encode(k), _encode(v)] for k, v in value.items()]}
    if is_dataclass(value):
        name = type(value).__name__
        if name not in _REGISTRY:
            raise ArtifactError(f"cannot serialize unregistered type {name}")
        return {
            "__dc__": name,
            "fields": {f.name: _encode(getattr(value, f.name)) for f in fields(value)},
        }
    raise ArtifactError(f"cannot serialize value of type {type(value).__name__}")


def _decode(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, list):
        return [_decode(v) for v in value]
    if isinstance(value, dict):
        if "__f64__" in value:
            return float.fromhex(value["__f64__"])
        if "__ndarray__" in value:
            spec = value["__ndarray__"]
            raw = base64.b64decode(spec["data"])
            return np.frombuffer(raw, dtype=np.dtype(spec["dtype"])).reshape(spec["shape"]).copy()
        if "__tuple__" in value:
            return tuple(_decode(v) for v in value["__tuple__"])
        if "__map__" in value:
            return {_decode(k): _decode(v) for k, v in value["__map__"]}
        if "__dc__" in value:
            cls = _REGISTRY.get(value["__dc__"])
            if cls is None:
                raise ArtifactError(f"unknown payload type {value['__dc__']!r}")
            kwargs = {k: _decode(v) for k, v in value["fields"].items()}
            return cls(**kwargs)
        raise ArtifactError(f"unrecognized payload node with keys {sorted(value)}")
    raise ArtifactError(f"cannot decode value of type {type(value).__name__}")


def _checksum(payload) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()


def dataset_fingerprint(features: np.ndarray, labels: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(features).tobytes())
    digest.update(np.ascontiguousarray(labels).tobytes())
    return digest.hexdigest()


@dataclass(frozen=True)
class ModelArtifact:
    """Summary of a written artifact file."""

    path: str
    format_version: int
    checksum: str
    size_bytes: int
    kind: str


@dataclass(frozen=True)
class LoadedArtifact:
    model: object  # TrainedModel or StackModel
    scaler: Scaler
    feature_names: tuple[str, ...]
    schema: tuple[FeatureSchema, ...] | None
    eval_sample: tuple[np.ndarray, np.ndarray] | None
    metadata: dict
    checksum: str
    format_version: int


def save(
    model,
    scaler: Scaler,
    features,
    path,
    *,
    schema=None,
    eval_sample=None,
    metadata=None,
) -> ModelArtifact:
    """Write a self-describing artifact; returns its summary."""
    path = Path(path)
    payload = {
        "kind": "stack" if isinstance(model, StackModel) else model.family,
        "model": _encode(model),
        "scaler": _encode(scaler),
        "features": [str(f) for f in features],
        "schema": _encode(tuple(schema)) if schema is not None else None,
        "eval_sample": (
            {
                "features": _encode(np.asarray(eval_sample[0], dtype=np.float64)),
                "labels": _encode(np.asarray(eval_sample[1], dtype=np.int8)),
            }
            if eval_sample is not None
            else None
        ),
        "metadata": _encode(dict(metadata or {})),
    }
    document = {
        "format_version": FORMAT_VERSION,
        "checksum": _checksum(payload),
        "payload": payload,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, indent=1)
    return ModelArtifact(
        path=str(path),
        format_version=FORMAT_VERSION,
        checksum=document["checksum"],
        size_bytes=path.stat().st_size,
        kind=payload["kind"],
    )


def load(path) -> LoadedArtifact:
    """Read, integrity-check, and decode an artifact file."""
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"artifact file not found: {path}")
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ArtifactError(f"not a valid artifact file: {exc}") from exc
    if not isinstance(document, dict) or "payload" not in document:
        raise ArtifactError("not a valid artifact file: missing payload")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise ArtifactError(f"unsupported artifact version {version!r}; expected {FORMAT_VERSION}")
    payload = document["payload"]
    if _checksum(payload) != document.get("checksum"):
        raise ArtifactError("artifact checksum mismatch; file is corrupted")
    try:
        model = _decode(payload["model"])
        scaler = _decode(payload["scaler"])
        schema = _decode(payload["schema"]) if payload.get("schema") is not None else None
        sample = payload.get("eval_sample")
        eval_sample = (
            (_decode(sample["features"]), _decode(sample["labels"])) if sample else None
        )
        metadata = _decode(payload.get("metadata") or {"__map__": []})
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactError(f"artifact payload malformed: {exc}") from exc
    return LoadedArtifact(
        model=model,
        scaler=scaler,
        feature_names=tuple(payload["features"]),
        schema=schema,
        eval_sample=eval_sample,
        metadata=metadata,
        checksum=document["checksum"],
        format_version=version,
    )
