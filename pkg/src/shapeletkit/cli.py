"""Command-line interface: one command per pipeline stage.

Exit codes: 0 ok, 2 validation failure, 3 empty result, 4 format error.
Every artifact embeds the run config and its hash; downstream commands
check the hashes and the shapelet-set fingerprint before using it.
"""
from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import fileio
from .config import RunConfig, config_hash
from .core import LabeledDataset
from .discovery import ShapeletSet, discover
from .exceptions import (ArtifactError, DatasetValidationError, EmptyResult, InputFormatError,
                         InvalidInput)
from .forest import ForestClassifier, train
from .metrics import evaluate as evaluate_metrics
from .metrics import probability_bands
from .preprocess import run_pipeline
from .transform import TransformMatrix, shapelet_transform

EXIT_OK, EXIT_VALIDATION, EXIT_EMPTY, EXIT_FORMAT = 0, 2, 3, 4
HIGH_CONFIDENCE = 0.90

logger = logging.getLogger("shapeletkit")


class Refusal(Exception):
    """Artifacts do not belong together."""


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DatasetValidationError as exc:
            click.echo("dataset validation failed:", err=True)
            for p in exc.problems:
                click.echo(f"  - {p}", err=True)
            sys.exit(EXIT_VALIDATION)
        except EmptyResult as exc:
            diag = ", ".join(f"{k}={v}" for k, v in exc.diagnostics.items())
            _fail(EXIT_EMPTY, f"{exc} ({diag})" if diag else str(exc))
        except (InputFormatError, ArtifactError) as exc:
            _fail(EXIT_FORMAT, str(exc))
        except (Refusal, InvalidInput) as exc:
            _fail(EXIT_VALIDATION, str(exc))
    return wrapper


def _num(v):
    """Round floats to 9 significant digits for reports."""
    if isinstance(v, float):
        return float(fileio.fmt(v))
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_num(x) for x in v]
    return v


def _producer(command: str, cfg: RunConfig, **upstream) -> dict:
    echo = cfg.to_dict()
    out = {"command": command, "config": echo, "config_hash": config_hash(echo)}
    out.update(upstream)
    return out


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _load_config(path: Optional[str], seed: Optional[int]) -> RunConfig:
    cfg = RunConfig.load(path) if path else RunConfig()
    return cfg.with_seed(seed)


def _resolve_path(flag: Optional[str], from_cfg: Optional[str], what: str) -> Path:
    value = flag or from_cfg
    if not value:
        raise click.UsageError(f"missing --{what}")
    return Path(value)


def _check_producer(doc: dict, what: str):
    prod = doc.get("producer")
    if prod is None:
        return
    if config_hash(prod.get("config")) != prod.get("config_hash"):
        raise ArtifactError(f"{what}: embedded config hash does not match its config")


def load_shapelets(path: Path) -> ShapeletSet:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: invalid JSON: {exc}") from None
    _check_producer(doc, str(path))
    return ShapeletSet.from_dict(doc)


def load_model(path: Path) -> ForestClassifier:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: invalid JSON: {exc}") from None
    model = ForestClassifier.from_dict(doc)
    _check_producer(model.metadata_, str(path))
    return model


def _check_pair(model: ForestClassifier, shapelets: ShapeletSet):
    expected = model.metadata_.get("shapelet_fingerprint")
    if expected != shapelets.fingerprint():
        raise Refusal("model was trained on a different shapelet set "
                      f"(model {str(expected)[:12]}, shapelets {shapelets.fingerprint()[:12]})")


def _read_dataset(path: Path, header: bool) -> LabeledDataset:
    return fileio.read_dataset_csv(path, header=header)


config_option = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                             help="Run config (YAML).")
seed_option = click.option("--seed", type=int, default=None, help="Overrides the config seed.")
threads_option = click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
                              help="Worker threads; outputs do not depend on it.")
required_input = click.option("--input", "input_path", required=True,
                              type=click.Path(exists=True, dir_okay=False))
required_output = click.option("--output", "output_path", required=True,
                               type=click.Path(dir_okay=False))
header_option = click.option("--header/--no-header", default=False, show_default=True,
                             help="Whether the dataset CSV starts with a header row.")
input_option = click.option("--input", "input_path", type=click.Path(dir_okay=False),
                            help="Input file; falls back to the config's input.")
output_option = click.option("--output", "output_path", type=click.Path(dir_okay=False),
                             help="Output file; falls back to the config's output.")


@click.group()
@click.option("--log", "log_path", type=click.Path(dir_okay=False),
              help="Append a timestamped run log to this file.")
@click.option("-v", "--verbose", is_flag=True)
def main(log_path, verbose):
    """Shapelet discovery, transform and random-forest event detection."""
    root = logging.getLogger("shapeletkit")
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    if log_path:
        handler = logging.FileHandler(log_path)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)


@main.command()
@click.option("--input", "input_paths", multiple=True, type=click.Path(exists=True, dir_okay=False),
              help="Continuous stream, one sample per line. Repeatable.")
@output_option
@config_option
@click.option("--sample-rate", type=float, default=None, help="Stream sample rate in Hz.")
@click.option("--label", default=fileio.UNLABELED, show_default=True,
              help="Label written for every output row.")
@handle_errors
def preprocess(input_paths, output_path, config_path, sample_rate, label):
    """Condition continuous streams into a dataset CSV."""
    cfg = _load_config(config_path, None)
    if not input_paths:
        input_paths = (str(_resolve_path(None, cfg.input, "input")),)
    out = _resolve_path(output_path, cfg.output, "output")
    rate = sample_rate if sample_rate is not None else cfg.preprocess.get("sample_rate_hz")
    streams = [fileio.read_stream(p, rate) for p in input_paths]
    series = run_pipeline(streams, cfg.preprocess["steps"])
    _write(out, fileio.format_dataset_csv(series, [label] * len(series)))
    logger.info("preprocess: %d stream(s) -> %d series", len(streams), len(series))
    click.echo(f"wrote {len(series)} series to {out}")


def _report(shapelets: ShapeletSet) -> str:
    lines = [f"{len(shapelets)} shapelets, per class: "
             + ", ".join(f"{c}={n}" for c, n in shapelets.per_class().items()),
             "rank\tid\tclass\tig\tthreshold\tmargin\tlength"]
    for i, s in enumerate(shapelets, start=1):
        lines.append("\t".join([str(i), s.key, s.class_label, fileio.fmt(s.ig),
                                fileio.fmt(s.split_threshold), fileio.fmt(s.margin),
                                str(s.length)]))
    return "\n".join(lines) + "\n"


@main.command("discover")
@input_option
@output_option
@config_option
@seed_option
@threads_option
@header_option
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              help="Write the shapelet report here instead of stdout.")
@handle_errors
def discover_cmd(input_path, output_path, config_path, seed, threads, header, report_path):
    """Find shapelets in a labelled dataset CSV."""
    cfg = _load_config(config_path, seed)
    data = _read_dataset(_resolve_path(input_path, cfg.input, "input"), header)
    out = _resolve_path(output_path, cfg.output, "output")
    shapelets = discover(data, cfg.discovery, n_jobs=threads)
    doc = shapelets.to_dict()
    doc["producer"] = _producer("discover", cfg)
    _write(out, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    report = _report(shapelets)
    if report_path:
        _write(Path(report_path), report)
    else:
        click.echo(report, nl=False)


def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


@main.command("transform")
@required_input
@required_output
@click.option("--shapelets", "shapelets_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@threads_option
@header_option
@handle_errors
def transform_cmd(input_path, output_path, shapelets_path, threads, header):
    """Write the n x k shapelet-distance matrix of a dataset CSV.

    A sidecar <output>.meta.json records the shapelet-set fingerprint.
    """
    shapelets = load_shapelets(Path(shapelets_path))
    data = _read_dataset(Path(input_path), header)
    out = Path(output_path)
    labeled = any(lab != fileio.UNLABELED for lab in data.labels)
    matrix = shapelet_transform(data if labeled else list(data.series), shapelets, n_jobs=threads)
    _write(out, matrix.to_csv())
    doc = json.loads(Path(shapelets_path).read_text())
    meta = {"shapelet_fingerprint": shapelets.fingerprint(),
            "shapelet_config_hash": doc.get("producer", {}).get("config_hash"),
            "rows": matrix.shape[0], "columns": matrix.shape[1]}
    _write(_meta_path(out), json.dumps(meta, indent=1, sort_keys=True) + "\n")
    click.echo(f"wrote {matrix.shape[0]} x {matrix.shape[1]} matrix to {out}")


@main.command("train")
@required_input
@required_output
@config_option
@seed_option
@threads_option
@handle_errors
def train_cmd(input_path, output_path, config_path, seed, threads):
    """Train the forest on a labelled transform CSV."""
    cfg = _load_config(config_path, seed)
    src = Path(input_path)
    out = Path(output_path)
    meta_path = _meta_path(src)
    if not meta_path.exists():
        raise ArtifactError(f"{src}: missing sidecar {meta_path.name}; produce it with 'transform'")
    meta = json.loads(meta_path.read_text())
    features = TransformMatrix.from_csv(src.read_text())
    if features.labels is None:
        raise InvalidInput(f"{src}: transform CSV has no label column")
    if features.shape[1] != meta.get("columns") or features.shape[0] != meta.get("rows"):
        raise ArtifactError(f"{src}: shape does not match its sidecar")
    model = train(features, cfg.forest, n_jobs=threads)
    metadata = _producer("train", cfg, shapelet_fingerprint=meta["shapelet_fingerprint"],
                         shapelet_config_hash=meta.get("shapelet_config_hash"),
                         feature_names=list(features.shapelet_ids))
    _write(out, model.to_json(metadata))
    click.echo(f"trained {len(model.trees_)} trees on {features.shape[0]} rows -> {out}")


def _predict(input_path, shapelets_path, model_path, threads, header):
    shapelets = load_shapelets(Path(shapelets_path))
    model = load_model(Path(model_path))
    _check_pair(model, shapelets)
    data = _read_dataset(Path(input_path), header)
    features = shapelet_transform(list(data.series), shapelets, n_jobs=threads)
    if features.shape[1] != model.n_features_in_:
        raise Refusal(f"model expects {model.n_features_in_} features, shapelets give "
                      f"{features.shape[1]}")
    if features.shape[0] == 0:
        proba = np.empty((0, len(model.classes_)))
    else:
        proba = model.predict_proba(features.values)
    return data, model, proba


@main.command("predict")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--shapelets", "shapelets_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@threads_option
@header_option
@handle_errors
def predict_cmd(input_path, output_path, shapelets_path, model_path, threads, header):
    """Label every series with its class probabilities."""
    data, model, proba = _predict(input_path, shapelets_path, model_path, threads, header)
    classes = [str(c) for c in model.classes_]
    lines = [",".join(["id", "label", *(f"prob({c})" for c in classes)])]
    for s, p in zip(data.series, proba):
        lines.append(",".join([s.id, classes[int(np.argmax(p))], *(fileio.fmt(v) for v in p)]))
    _write(Path(output_path), "\n".join(lines) + "\n")
    click.echo(f"wrote {len(data)} predictions to {output_path}")


@main.command("evaluate")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--shapelets", "shapelets_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@threads_option
@header_option
@handle_errors
def evaluate_cmd(input_path, output_path, shapelets_path, model_path, threads, header):
    """Score predictions against the labels of a dataset CSV."""
    data, model, proba = _predict(input_path, shapelets_path, model_path, threads, header)
    classes = [str(c) for c in model.classes_]
    unknown = sorted(set(data.labels) - set(classes))
    if unknown:
        raise InvalidInput(f"labels not known to the model: {unknown}")
    pred = [classes[int(i)] for i in np.argmax(proba, axis=1)] if len(data) else []
    metrics = evaluate_metrics(data.labels, pred, labels=classes)
    top = proba.max(axis=1) if len(data) else np.empty(0)
    correct = np.array([t == p for t, p in zip(data.labels, pred)], dtype=bool)
    bands = {}
    for i, c in enumerate(classes):
        hits = correct & (np.array(pred) == c) if len(data) else correct
        bands[c] = {"bands": probability_bands(top[hits]),
                    "correct": int(hits.sum()),
                    "fraction_at_least_0.90": (float(np.mean(top[hits] >= HIGH_CONFIDENCE))
                                               if hits.any() else None)}
    metrics["probability_bands"] = bands
    metrics["producer"] = {"model_config_hash": model.metadata_.get("config_hash"),
                           "shapelet_fingerprint": model.metadata_.get("shapelet_fingerprint")}
    _write(Path(output_path), json.dumps(_num(metrics), indent=1, sort_keys=True) + "\n")
    acc = metrics["accuracy"]
    click.echo(f"accuracy {'n/a' if acc is None else fileio.fmt(acc)} on {metrics['n']} series")
    for c, m in metrics["per_class"].items():
        prec = "n/a" if m["precision"] is None else fileio.fmt(m["precision"])
        rec = "n/a" if m["recall"] is None else fileio.fmt(m["recall"])
        click.echo(f"  {c}: precision {prec}, recall {rec}")


if __name__ == "__main__":
    main()
