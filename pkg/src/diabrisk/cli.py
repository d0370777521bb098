"""Command-line pipeline driver and thin service client.

Exit codes: 0 success, 1 usage error, 2 data/artifact error, 3 training
error. Heavy lifting lives in the library; `serve` wraps the FastAPI app and
`predict` is an HTTP client for a running service.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__, artifact as artifact_io, featsel
from .data import deduplicate, impute, normalize, profile, select_columns, split
from .data import save_npz
from .ensemble import default_stack_spec, fit_stack
from .errors import ArtifactError, DataError, DiabriskError, TrainingError
from .learners import GBDT_PRESETS, LearnerSpec, fit
from .metrics import evaluate_scores
from .pipeline import (
    DEFAULT_MODELS,
    PipelineConfig,
    load_table,
    parse_model_name,
    run as run_pipeline,
    _evaluate_and_write,
    _json_dump,
)
from .resample import ResampleConfig, balance as balance_ds
from .tuning import DEFAULT_SPACES, two_stage_search


@click.group(name="diabrisk")
@click.version_option(__version__)
def cli() -> None:
    """Diabetes-risk pipeline: prep, balance, select, train, evaluate, serve."""


def _prep(dataset):
    dataset, removed = deduplicate(dataset)
    dataset = impute(dataset)
    raw_schema = dataset.schema
    dataset, scaler = normalize(dataset)
    return dataset, scaler, raw_schema, removed


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


input_argument = click.argument("input_path", type=str)
label_option = click.option("--label", default="Diabetes_binary", show_default=True,
                            help="Name of the 0/1 label column.")
out_option = click.option("-o", "--outdir", default="out", show_default=True)
seed_option = click.option("--seed", default=42, show_default=True, type=int)


@cli.command("profile")
@input_argument
@label_option
@click.option("--bins", default=10, show_default=True, type=int)
@out_option
def profile_cmd(input_path, label, bins, outdir):
    """Histograms, correlations, and VIF of the (deduplicated, imputed) table."""
    out = _outdir(outdir)
    dataset = load_table(input_path, label)
    dataset, _ = deduplicate(dataset)
    dataset = impute(dataset)
    report = profile(dataset, bins=bins)
    _json_dump(report.to_dict(), out / "profile.json")
    infinite = [n for n, v in report.vif.items() if v is None]
    click.echo(f"profiled {dataset.row_count} rows, {dataset.n_features} features "
               f"-> {out / 'profile.json'}")
    if infinite:
        click.echo(f"perfectly collinear features: {', '.join(infinite)}")


@cli.command("prep")
@input_argument
@label_option
@out_option
def prep_cmd(input_path, label, outdir):
    """Deduplicate, impute, and min-max normalize; writes prepped.npz."""
    out = _outdir(outdir)
    dataset = load_table(input_path, label)
    dataset, scaler, _, removed = _prep(dataset)
    save_npz(dataset, out / "prepped.npz")
    _json_dump(scaler.to_dict(), out / "scaler.json")
    _json_dump(
        {"rows": dataset.row_count, "duplicates_removed": removed,
         "transform_log": list(dataset.transform_log)},
        out / "prep_report.json",
    )
    click.echo(f"prepped {dataset.row_count} rows ({removed} duplicates removed) -> "
               f"{out / 'prepped.npz'}")


@cli.command("balance")
@input_argument
@label_option
@click.option("--smote-k", default=5, show_default=True, type=int)
@click.option("--ratio", default=1.0, show_default=True, type=float,
              help="Minority/majority ratio after SMOTE.")
@seed_option
@out_option
def balance_cmd(input_path, label, smote_k, ratio, seed, outdir):
    """SMOTE + Tomek rebalancing; CSV inputs are prepped first."""
    out = _outdir(outdir)
    dataset = load_table(input_path, label)
    if not input_path.endswith(".npz"):
        dataset, _, _, _ = _prep(dataset)
    balanced, report = balance_ds(dataset, ResampleConfig(smote_k=smote_k, target_ratio=ratio,
                                                          seed=seed))
    save_npz(balanced, out / "balanced.npz")
    _json_dump(report.to_dict(), out / "resample_report.json")
    click.echo(json.dumps(report.to_dict(), indent=1))
    click.echo(f"balanced table -> {out / 'balanced.npz'}")


@cli.command("select")
@input_argument
@label_option
@click.option("--keep", default=18, show_default=True, type=int)
@click.option("--bins", default=10, show_default=True, type=int)
@out_option
def select_cmd(input_path, label, keep, bins, outdir):
    """Rank features by MI, RFE, and LASSO; select the best `keep`."""
    out = _outdir(outdir)
    dataset = load_table(input_path, label)
    if not input_path.endswith(".npz"):
        dataset, _, _, _ = _prep(dataset)
    ranking = featsel.select_features(dataset, keep=keep, bins=bins)
    _json_dump(ranking.to_dict(), out / "feature_ranking.json")
    click.echo(ranking.format_table())
    click.echo(f"ranking -> {out / 'feature_ranking.json'}")


def _train_common(input_path, label, keep, do_balance, test_fraction, seed, outdir,
                  build_model, tag):
    out = _outdir(outdir)
    dataset = load_table(input_path, label)
    dataset, scaler, raw_schema, _ = _prep(dataset)
    if keep > 0:
        ranking = featsel.select_features(dataset, keep=keep)
        selected = ranking.selected
        dataset = select_columns(dataset, selected)
        _json_dump(ranking.to_dict(), out / "feature_ranking.json")
    else:
        selected = dataset.feature_names
    if do_balance:
        dataset, report = balance_ds(dataset, ResampleConfig(seed=seed))
        _json_dump(report.to_dict(), out / "resample_report.json")
    train, test = split(dataset, test_fraction, stratify=True, seed=seed)
    model = build_model(train)
    report, files = _evaluate_and_write(tag, model, test, out)

    name_to_col = {s.name: j for j, s in enumerate(raw_schema)}
    idx = [name_to_col[n] for n in selected]
    n_sample = min(2048, test.row_count)
    summary = artifact_io.save(
        model,
        scaler.select(idx),
        selected,
        out / "model_artifact.json",
        schema=tuple(raw_schema[j] for j in idx),
        eval_sample=(test.features[:n_sample], test.labels[:n_sample]),
        metadata={"seed": seed, "model": tag},
    )
    click.echo(f"{tag}: accuracy={report.metrics.accuracy:.4f} "
               f"roc_auc={report.roc_auc:.4f} pr_auc={report.pr_auc:.4f}")
    click.echo(f"artifact -> {summary.path} (sha256 {summary.checksum[:12]})")
    click.echo(f"eval report -> {out / files[0]}")


@cli.command("train")
@input_argument
@label_option
@click.option("--family", default="gbdt", show_default=True,
              type=click.Choice(["logreg", "linear_svc", "gaussian_nb", "knn", "tree",
                                 "random_forest", "gbdt"]))
@click.option("--preset", default="xgb", show_default=True,
              type=click.Choice(sorted(GBDT_PRESETS)), help="GBDT preset (gbdt family only).")
@click.option("--params", default=None, help="JSON object of hyperparameter overrides.")
@click.option("--keep", default=0, show_default=True, type=int,
              help="Feature-selection count; 0 keeps all columns.")
@click.option("--balance/--no-balance", "do_balance", default=False, show_default=True)
@click.option("--test-fraction", default=0.2, show_default=True, type=float)
@seed_option
@out_option
def train_cmd(input_path, label, family, preset, params, keep, do_balance, test_fraction,
              seed, outdir):
    """Train a single learner and evaluate it on a held-out split."""
    hyper = {}
    if params:
        try:
            hyper = json.loads(params)
        except json.JSONDecodeError as exc:
            raise DataError(f"--params is not valid JSON: {exc}") from exc
    if family == "gbdt":
        hyper.setdefault("preset", preset)
    spec = LearnerSpec(family, hyper, seed=seed)
    tag = f"{family}:{hyper['preset']}" if family == "gbdt" else family
    _train_common(input_path, label, keep, do_balance, test_fraction, seed, outdir,
                  lambda train: fit(spec, train), tag)


@cli.command("stack")
@input_argument
@label_option
@click.option("--keep", default=0, show_default=True, type=int)
@click.option("--balance/--no-balance", "do_balance", default=True, show_default=True)
@click.option("--folds", default=5, show_default=True, type=int)
@click.option("--test-fraction", default=0.2, show_default=True, type=float)
@seed_option
@out_option
def stack_cmd(input_path, label, keep, do_balance, folds, test_fraction, seed, outdir):
    """Train the default stacking ensemble (GBDT + KNN under a GBDT meta)."""
    from dataclasses import replace

    spec = replace(default_stack_spec(seed), n_folds=folds)
    _train_common(input_path, label, keep, do_balance, test_fraction, seed, outdir,
                  lambda train: fit_stack(spec, train), "stack")


@cli.command("tune")
@input_argument
@label_option
@click.option("--family", default="gbdt",
              type=click.Choice(sorted(DEFAULT_SPACES)), show_default=True)
@click.option("--budget", default=25, show_default=True, type=int)
@click.option("--cv", default=5, show_default=True, type=int)
@click.option("--metric", default="roc_auc", show_default=True,
              type=click.Choice(["roc_auc", "accuracy"]))
@click.option("--test-fraction", default=0.2, show_default=True, type=float)
@seed_option
@out_option
def tune_cmd(input_path, label, family, budget, cv, metric, test_fraction, seed, outdir):
    """Randomized search then +-1-neighbor grid refinement on the train fold."""
    out = _outdir(outdir)
    dataset = load_table(input_path, label)
    if not input_path.endswith(".npz"):
        dataset, _, _, _ = _prep(dataset)
    train, _ = split(dataset, test_fraction, stratify=True, seed=seed)
    trace = two_stage_search(family, DEFAULT_SPACES[family], train, budget=budget,
                             cv_k=cv, metric=metric, seed=seed)
    _json_dump(trace.to_dict(), out / "tuning_trace.json")
    click.echo(f"best {family} params: {json.dumps(trace.best_params)}")
    click.echo(f"cv {metric}: {trace.best_mean:.4f}")
    click.echo(f"trace -> {out / 'tuning_trace.json'}")


@cli.command("evaluate")
@click.option("--model", "model_path", required=True, type=str)
@input_argument
@label_option
@out_option
def evaluate_cmd(model_path, input_path, label, outdir):
    """Score a saved artifact against a labeled table."""
    out = _outdir(outdir)
    art = artifact_io.load(model_path)
    dataset = load_table(input_path, label)
    dataset = impute(dataset)
    dataset = select_columns(dataset, art.feature_names)
    scores = art.model.predict_proba(art.scaler.transform(dataset.features))
    report = evaluate_scores(dataset.labels, scores)
    _json_dump(report.to_dict(), out / "eval_artifact.json")
    click.echo(f"accuracy={report.metrics.accuracy:.4f} roc_auc={report.roc_auc:.4f} "
               f"pr_auc={report.pr_auc:.4f}")
    click.echo(f"eval report -> {out / 'eval_artifact.json'}")


@cli.command("run")
@click.option("--config", "config_path", required=True, type=str,
              help="JSON pipeline config file.")
@click.option("--input", "input_path", default=None, help="Override config input path.")
@click.option("--outdir", default=None, help="Override config output directory.")
@click.option("--seed", default=None, type=int)
@click.option("--mode", default=None, type=click.Choice(["replicate-paper", "leakage-safe"]))
@click.option("--threads", default=None, type=int)
def run_cmd(config_path, input_path, outdir, seed, mode, threads):
    """Run the full pipeline from a config file (flags override)."""
    config = PipelineConfig.from_file(config_path, input_path=input_path, outdir=outdir,
                                      seed=seed, mode=mode, threads=threads)
    result = run_pipeline(config)
    for tag, values in result.metrics.items():
        click.echo(f"{tag}: " + " ".join(f"{k}={v:.4f}" for k, v in values.items()))
    click.echo(f"manifest -> {result.manifest_path}")


@cli.command("reproduce-paper")
@input_argument
@label_option
@click.option("--keep", default=18, show_default=True, type=int)
@click.option("--mode", default="replicate-paper", show_default=True,
              type=click.Choice(["replicate-paper", "leakage-safe"]))
@click.option("--models", default=",".join(DEFAULT_MODELS), show_default=True,
              help="Comma-separated: stack, gbdt:<preset>, random_forest, knn, logreg, ...")
@click.option("--threads", default=None, type=int)
@seed_option
@out_option
def reproduce_cmd(input_path, label, keep, mode, models, threads, seed, outdir):
    """Full replication pipeline: prep, select, balance, split, stack, evaluate.

    Note: replicate-paper mode balances before splitting (the source
    protocol), which leaks synthetic-neighbor information into the test
    fold; use leakage-safe mode for honest generalization estimates.
    """
    model_list = tuple(m.strip() for m in models.split(",") if m.strip())
    for name in model_list:
        parse_model_name(name, seed)  # fail fast on typos
    config = PipelineConfig(input_path=input_path, outdir=outdir, label_column=label,
                            mode=mode, keep=keep, seed=seed, models=model_list,
                            threads=threads)
    result = run_pipeline(config)
    for tag, values in result.metrics.items():
        click.echo(f"{tag}: " + " ".join(f"{k}={v:.4f}" for k, v in values.items()))
    click.echo(f"manifest -> {result.manifest_path}")


@cli.command("serve")
@click.option("--model", "model_path", required=True, type=str)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--allow-origin", default=None, help="CORS origin for the web UI.")
@click.option("--importance-rows", default=512, show_default=True, type=int)
def serve_cmd(model_path, host, port, allow_origin, importance_rows):
    """Serve a model artifact over HTTP (POST /predict, GET /schema, ...)."""
    import uvicorn

    from .service import create_app

    app = create_app(model_path=model_path, importance_rows=importance_rows,
                     allow_origin=allow_origin)
    click.echo(f"serving {model_path} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command("predict")
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
@click.option("--json", "json_body", default=None, help="Feature map as a JSON string.")
@click.option("--input", "input_file", default=None, help="File with the JSON feature map.")
def predict_cmd(url, json_body, input_file):
    """Thin client: post one feature map to a running service."""
    import httpx

    if (json_body is None) == (input_file is None):
        raise click.UsageError("provide exactly one of --json or --input")
    text = json_body if json_body is not None else Path(input_file).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"request body is not valid JSON: {exc}") from exc
    try:
        response = httpx.post(f"{url.rstrip('/')}/predict", json=payload, timeout=30.0)
    except httpx.HTTPError as exc:
        raise DataError(f"service unreachable at {url}: {exc}") from exc
    if response.status_code != 200:
        raise DataError(f"service returned {response.status_code}: {response.text}")
    click.echo(json.dumps(response.json(), indent=1))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except TrainingError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except (DataError, ArtifactError, DiabriskError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
