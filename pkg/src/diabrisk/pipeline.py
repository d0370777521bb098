"""End-to-end pipeline driver: prep, profile, select, balance, split, train,
evaluate, persist.

Two stage orderings are supported. ``replicate-paper`` selects features and
balances classes on the full table before splitting, matching the source
protocol (and inheriting its leakage caveat). ``leakage-safe`` splits first
and fits selection/balancing on the training fold only.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numba
import numpy as np

from . import __version__, artifact, featsel
from .data import (
    Dataset,
    deduplicate,
    impute,
    load_csv,
    load_npz,
    normalize,
    profile,
    select_columns,
    split,
)
from .ensemble import StackModel, default_stack_spec, fit_stack
from .errors import DataError, DiabriskError
from .learners import GBDT_PRESETS, LearnerSpec, fit
from .metrics import EvalReport, evaluate_scores
from .resample import ResampleConfig, balance

MODES = ("replicate-paper", "leakage-safe")

DEFAULT_MODELS = ("stack", "gbdt:xgb", "random_forest", "knn", "logreg")


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str
    outdir: str
    label_column: str = "Diabetes_binary"
    mode: str = "replicate-paper"
    smote_k: int = 5
    target_ratio: float = 1.0
    keep: int = 18
    test_fraction: float = 0.2
    seed: int = 42
    bins: int = 10
    models: tuple[str, ...] = DEFAULT_MODELS
    eval_sample_rows: int = 2048
    threads: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise DataError(f"mode must be one of {MODES}")

    @staticmethod
    def from_file(path: str | Path, **overrides) -> "PipelineConfig":
        """Read a JSON config file; keyword overrides win over file values."""
        path = Path(path)
        if not path.exists():
            raise DataError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise DataError(f"config file is not valid JSON: {exc}") from exc
        known = set(PipelineConfig.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        if "models" in raw:
            raw["models"] = tuple(raw["models"])
        return PipelineConfig(**raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["models"] = list(self.models)
        return out


@dataclass
class RunResult:
    outdir: str
    manifest_path: str
    metrics: dict[str, dict]
    artifact_path: str | None
    stages: list[str] = field(default_factory=list)


def parse_model_name(name: str, seed: int) -> LearnerSpec | str:
    """'stack', a family name, or 'gbdt:<preset>'."""
    if name == "stack":
        return "stack"
    family, _, preset = name.partition(":")
    if family == "gbdt":
        preset = preset or "xgb"
        if preset not in GBDT_PRESETS:
            raise DataError(f"unknown gbdt preset {preset!r}")
        return LearnerSpec("gbdt", {"preset": preset}, seed=seed)
    if preset:
        raise DataError(f"only gbdt accepts a preset suffix, got {name!r}")
    return LearnerSpec(family, seed=seed)


def _json_dump(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _write_curve_csv(curve, path: Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "y", "threshold"])
        for x, y, t in curve.to_rows():
            writer.writerow([repr(x), repr(y), "inf" if np.isinf(t) else repr(float(t))])


def _evaluate_and_write(
    tag: str, model, test: Dataset, outdir: Path
) -> tuple[EvalReport, list[str]]:
    scores = model.predict_proba(test.features)
    report = evaluate_scores(test.labels, scores)
    safe = tag.replace(":", "_")
    files = [f"eval_{safe}.json", f"eval_{safe}_roc.csv", f"eval_{safe}_pr.csv"]
    _json_dump(report.to_dict(), outdir / files[0])
    _write_curve_csv(report.roc_curve, outdir / files[1])
    _write_curve_csv(report.pr_curve, outdir / files[2])
    return report, files


def load_table(path: str | Path, label_column: str) -> Dataset:
    path = Path(path)
    if path.suffix == ".npz":
        return load_npz(path)
    return load_csv(path, label_column)


def run(config: PipelineConfig) -> RunResult:
    """Execute the configured pipeline; writes all reports under outdir."""
    if config.threads is not None:
        numba.set_num_threads(max(1, config.threads))
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stages: list[str] = []
    notes: dict[str, object] = {}

    def stage(name: str):
        stages.append(name)

    def fail(name: str, exc: Exception):
        kind = type(exc) if isinstance(exc, DiabriskError) else DiabriskError
        raise kind(f"stage '{name}' failed: {exc}") from exc

    try:
        stage("load")
        dataset = load_table(config.input_path, config.label_column)
    except Exception as exc:  # noqa: BLE001 - rewrapped with stage name
        fail("load", exc)

    try:
        stage("deduplicate")
        dataset, removed = deduplicate(dataset)
        notes["duplicates_removed"] = removed
        stage("impute")
        dataset = impute(dataset)
        stage("profile")
        prof = profile(dataset, bins=config.bins)
        _json_dump(prof.to_dict(), outdir / "profile.json")
        stage("normalize")
        raw_schema = dataset.schema  # pre-normalization units for the service
        dataset, scaler = normalize(dataset)
    except DiabriskError as exc:
        fail(stages[-1], exc)

    resample_cfg = ResampleConfig(
        smote_k=config.smote_k, target_ratio=config.target_ratio, seed=config.seed
    )

    try:
        if config.mode == "replicate-paper":
            stage("select")
            ranking = featsel.select_features(dataset, keep=config.keep, bins=config.bins)
            _json_dump(ranking.to_dict(), outdir / "feature_ranking.json")
            dataset = select_columns(dataset, ranking.selected)
            stage("balance")
            dataset, resample_report = balance(dataset, resample_cfg)
            _json_dump(resample_report.to_dict(), outdir / "resample_report.json")
            stage("split")
            train, test = split(
                dataset, config.test_fraction, stratify=True, seed=config.seed
            )
        else:
            stage("split")
            train, test = split(
                dataset, config.test_fraction, stratify=True, seed=config.seed
            )
            stage("select")
            ranking = featsel.select_features(train, keep=config.keep, bins=config.bins)
            _json_dump(ranking.to_dict(), outdir / "feature_ranking.json")
            train = select_columns(train, ranking.selected)
            test = select_columns(test, ranking.selected)
            stage("balance")
            train, resample_report = balance(train, resample_cfg)
            _json_dump(resample_report.to_dict(), outdir / "resample_report.json")
    except DiabriskError as exc:
        fail(stages[-1], exc)

    name_to_col = {s.name: j for j, s in enumerate(raw_schema)}
    selected_idx = [name_to_col[n] for n in ranking.selected]
    selected_scaler = scaler.select(selected_idx)
    selected_schema = tuple(raw_schema[j] for j in selected_idx)

    metrics_by_model: dict[str, dict] = {}
    artifact_info = None
    primary_model = None
    for tag in config.models:
        parsed = parse_model_name(tag, config.seed)
        try:
            stage(f"train:{tag}")
            if parsed == "stack":
                model: StackModel | object = fit_stack(default_stack_spec(config.seed), train)
            else:
                model = fit(parsed, train)
            stage(f"evaluate:{tag}")
            report, _ = _evaluate_and_write(tag, model, test, outdir)
        except DiabriskError as exc:
            fail(stages[-1], exc)
        metrics_by_model[tag] = {
            "accuracy": report.metrics.accuracy,
            "precision": report.metrics.precision,
            "recall": report.metrics.recall,
            "f1": report.metrics.f1,
            "roc_auc": report.roc_auc,
            "pr_auc": report.pr_auc,
        }
        if primary_model is None or parsed == "stack":
            primary_model = (tag, model)

    if primary_model is not None:
        stage("artifact")
        tag, model = primary_model
        n_sample = min(config.eval_sample_rows, test.row_count)
        artifact_info = artifact.save(
            model,
            selected_scaler,
            ranking.selected,
            outdir / "model_artifact.json",
            schema=selected_schema,
            eval_sample=(test.features[:n_sample], test.labels[:n_sample]),
            metadata={
                "seed": config.seed,
                "mode": config.mode,
                "model": tag,
                "dataset_fingerprint": artifact.dataset_fingerprint(
                    train.features, train.labels
                ),
            },
        )

    manifest = {
        "package_version": __version__,
        "numpy_version": np.__version__,
        "numba_version": numba.__version__,
        "config": config.to_dict(),
        "stages": stages,
        "notes": notes,
        "resample_report": resample_report.to_dict(),
        "selected_features": list(ranking.selected),
        "metrics": metrics_by_model,
        "artifact": None if artifact_info is None else asdict(artifact_info),
    }
    manifest_path = outdir / "manifest.json"
    _json_dump(manifest, manifest_path)
    return RunResult(
        outdir=str(outdir),
        manifest_path=str(manifest_path),
        metrics=metrics_by_model,
        artifact_path=None if artifact_info is None else artifact_info.path,
        stages=stages,
    )
