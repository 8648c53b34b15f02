"""Command-line entry point.

Subcommands cover the whole pipeline: fetch -> label -> sample ->
prep -> train/baseline -> mccv/sweep/cross -> report. Exit codes:
0 success, 1 usage error, 2 data/precondition error, 3 environment
error; failures print one machine-parsable line on stderr in the form
`brownjobs: <kind>: <message>`.

Values may come from a TOML config (`--config`), one table per
subcommand (`[mccv]`, `[baseline.train]`, ...); explicit command-line
flags win over config values, and unknown config keys are rejected.
Stochastic subcommands require `--seed` unless `--nondeterministic`
is passed.
"""

from __future__ import annotations

import json
import os
import secrets
import sys
from pathlib import Path

import click
from click.core import ParameterSource

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import dataio, labeling
from .baseline.jobmetrics import compute_all_metrics
from .baseline.voting import BaselineConfig, load_baseline, save_baseline, train_sota
from .errors import BrownjobsError, DataError, EnvironmentFailure
from .evaluation.cross import cross_project
from .evaluation.mccv import BaselineTrainer, EvalReport, FewShotTrainer, MccvConfig
from .evaluation.mccv import mccv as run_mccv
from .evaluation.report import cross_markdown, mccv_markdown, sweep_markdown
from .evaluation.splits import sample_shots
from .evaluation.sweep import shots_sweep
from .fewshot.bundle import ModelBundle, load_bundle, save_bundle
from .fewshot.classifier import FewShotLogClassifier
from .fewshot.hyperparams import FewShotHyperParams
from .fewshot.providers import get_provider
from .ingest.client import CiClient
from .ingest.fetch import fetch_jobs
from .ingest.store import ProjectStore
from .logprep import PrepConfig, preprocess, reduction_stats
from .seeding import derive_seed

TOKEN_ENV_VAR = "CI_INGEST_TOKEN"
PROVIDER_CHOICES = ("test", "pretrained")


# config plumbing

def _load_config(path):
    if path is None:
        return {}
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise click.UsageError(f"config {path}: {exc}")


def _command_params(command) -> dict:
    return {p.name: p for p in command.params}


def _validate_config(config: dict, root: click.Group) -> None:
    """Every table must name a subcommand; every key must be one of its flags."""
    for section, values in config.items():
        cmd = root.commands.get(section)
        if cmd is None:
            raise click.UsageError(f"config: unknown section [{section}]")
        if isinstance(cmd, click.Group):
            for sub, subvalues in values.items():
                subcmd = cmd.commands.get(sub)
                if subcmd is None:
                    raise click.UsageError(f"config: unknown section [{section}.{sub}]")
                _validate_keys(subvalues, subcmd, f"{section}.{sub}")
        else:
            _validate_keys(values, cmd, section)


def _validate_keys(values, command, section: str) -> None:
    if not isinstance(values, dict):
        raise click.UsageError(f"config: [{section}] must be a table")
    params = _command_params(command)
    for key in values:
        if key not in params:
            raise click.UsageError(f"config: unknown key {key!r} in [{section}]")


def _merge_config(ctx: click.Context, section: str, values: dict) -> dict:
    """Overlay config values onto params the user left at their defaults."""
    config = ctx.find_root().obj or {}
    table = config
    for part in section.split("."):
        table = table.get(part, {}) if isinstance(table, dict) else {}
    if not table:
        return values
    params = _command_params(ctx.command)
    merged = dict(values)
    for key, raw in table.items():
        if ctx.get_parameter_source(key) == ParameterSource.DEFAULT:
            param = params[key]
            if param.multiple and isinstance(raw, list):
                merged[key] = tuple(param.type.convert(v, param, ctx) for v in raw)
            else:
                merged[key] = param.type.convert(raw, param, ctx)
    return merged


def _resolve_seed(seed, nondeterministic: bool):
    if seed is not None:
        return int(seed)
    if not nondeterministic:
        raise click.UsageError(
            "--seed is required for stochastic commands "
            "(pass --nondeterministic to draw one)"
        )
    return secrets.randbits(32)


def _emit(payload: dict, as_json: bool, human_lines) -> None:
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in human_lines:
            click.echo(line)


def _write_text(path, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def _prep_config_from_flags(keep_ansi: bool, disable_rule) -> PrepConfig:
    cfg = PrepConfig(ansi_strip=not keep_ansi)
    for n in disable_rule or ():
        cfg = cfg.disable_rule(int(n))
    return cfg


def _provider_factory(provider: str):
    return lambda: get_provider(provider)


def _load_labeled(samples_path, prep_dir):
    samples = dataio.read_samples_jsonl(samples_path, prep_dir=prep_dir)
    if not samples:
        raise DataError(f"no samples in {samples_path}")
    return samples


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="TOML config; one table per subcommand.")
@click.pass_context
def cli(ctx, config_path):
    """Detect intermittent CI job failures from logs with few-shot learning."""
    config = _load_config(config_path)
    _validate_config(config, ctx.command)
    ctx.obj = config


# fetch

@cli.command()
@click.option("--base-url", required=True, help="CI API root, e.g. https://gitlab.com/api/v4")
@click.option("--project", "project_id", required=True)
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
@click.option("--page-size", default=100, show_default=True, type=click.IntRange(1, 100))
@click.option("--refresh", is_flag=True, help="re-walk the remote and pick up updated jobs")
@click.option("--jobs", default=4, show_default=True, type=click.IntRange(min=1),
              help="parallel log downloads")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def fetch(ctx, **kw):
    """Download completed job records and failure logs into a store."""
    p = _merge_config(ctx, "fetch", kw)
    client = CiClient(p["base_url"], token=os.environ.get(TOKEN_ENV_VAR, ""))
    store = ProjectStore(p["store_dir"])
    outcome = fetch_jobs(
        client,
        p["project_id"],
        store,
        page_size=p["page_size"],
        refresh=p["refresh"],
        workers=p["jobs"],
    )
    payload = {
        "project": p["project_id"],
        "store": str(p["store_dir"]),
        "new_records": outcome.new_records,
        "updated_records": outcome.updated_records,
        "logs_fetched": outcome.logs_fetched,
        "excluded": outcome.excluded,
        "decode_anomalies": outcome.decode_anomalies,
        "pages": outcome.pages,
        "warnings": outcome.warnings,
    }
    _emit(payload, p["as_json"], [
        f"fetched {outcome.new_records} new records "
        f"({outcome.logs_fetched} logs, {outcome.excluded} excluded, "
        f"{outcome.updated_records} updated) over {outcome.pages} pages",
        *(f"warning: {w}" for w in outcome.warnings),
    ])


# label

@cli.command()
@click.option("--store", "store_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="write labeled samples as JSONL")
@click.option("--overlay", "overlay_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="manual label overlay CSV")
@click.option("--stats", "show_stats", is_flag=True, help="print labeling statistics")
@click.option("--confidence", default=0.95, show_default=True)
@click.option("--margin", default=0.05, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def label(ctx, **kw):
    """Auto-label failures by the rerun heuristic; optionally merge manual labels."""
    p = _merge_config(ctx, "label", kw)
    store = ProjectStore(p["store_dir"])
    records = store.read_records()
    if not records:
        raise DataError(f"store {p['store_dir']} has no job records")
    samples, omitted = labeling.auto_label(records)
    metrics = compute_all_metrics(records, {s.job_id: s.auto_label for s in samples})
    for s in samples:
        s.metrics = metrics[s.job_id].to_dict()
    if p["overlay_path"]:
        rows = labeling.read_overlay_csv(p["overlay_path"])
        samples = labeling.apply_manual_overlay(samples, rows)
    if p["out_path"]:
        dataio.write_samples_jsonl(samples, p["out_path"])

    stats = labeling.project_stats(
        records[0].project_id, samples,
        confidence=p["confidence"], margin=p["margin"],
    )
    payload = {
        "project": stats.project_id,
        "n_failed": stats.n_failed,
        "n_brown": stats.n_brown,
        "bfr": stats.bfr,
        "sample_size": stats.sample_size,
        "error_rate": stats.error_rate,
        "omitted": omitted,
        "out": str(p["out_path"]) if p["out_path"] else None,
    }
    lines = []
    if p["show_stats"] or not p["out_path"]:
        lines.append(f"n_failed {stats.n_failed}")
        lines.append(f"n_brown {stats.n_brown}")
        lines.append(f"bfr {round(stats.bfr, 4):g}")
        lines.append(f"sample_size {stats.sample_size}")
        if stats.error_rate is not None:
            lines.append(f"error_rate {round(stats.error_rate, 4):g}")
    if p["out_path"]:
        lines.append(f"wrote {len(samples)} samples to {p['out_path']}")
    _emit(payload, p["as_json"], lines)


# sample

@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--size", required=True, type=click.IntRange(min=1))
@click.option("--seed", type=int, default=None)
@click.option("--nondeterministic", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def sample(ctx, **kw):
    """Draw a BFR-preserving stratified subset of labeled samples."""
    p = _merge_config(ctx, "sample", kw)
    seed = _resolve_seed(p["seed"], p["nondeterministic"])
    samples = _load_labeled(p["in_path"], None)
    subset = labeling.stratified_sample(samples, p["size"], seed)
    dataio.write_samples_jsonl(subset, p["out_path"])
    n_int = sum(1 for s in subset if s.auto_label == 1)
    payload = {
        "in": str(p["in_path"]),
        "out": str(p["out_path"]),
        "size": len(subset),
        "n_intermittent": n_int,
        "n_regular": len(subset) - n_int,
        "seed": seed,
    }
    _emit(payload, p["as_json"],
          [f"wrote {len(subset)} samples ({n_int} intermittent) to {p['out_path']}"])


# prep

@cli.command()
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--keep-ansi", is_flag=True, help="skip ANSI/transport-noise stripping")
@click.option("--disable-rule", multiple=True, type=click.IntRange(1, 7),
              help="turn off one numbered rule (repeatable)")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def prep(ctx, **kw):
    """Pre-process every .log file in a directory; stats print as JSON."""
    p = _merge_config(ctx, "prep", kw)
    cfg = _prep_config_from_flags(p["keep_ansi"], p["disable_rule"])
    in_dir, out_dir = Path(p["in_dir"]), Path(p["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    processed = []
    for log_file in sorted(in_dir.glob("*.log")):
        result = preprocess(log_file.read_text(encoding="utf-8"), cfg)
        (out_dir / f"{log_file.stem}.prep.txt").write_text(
            result.text, encoding="utf-8"
        )
        processed.append(result)
    if not processed:
        raise DataError(f"no .log files under {in_dir}")
    stats = reduction_stats(processed)
    payload = {
        "n_logs": len(processed),
        "out": str(out_dir),
        "reduction": stats,
    }
    # the stats contract is JSON either way
    click.echo(json.dumps(payload, sort_keys=True, indent=2))


# train

@cli.command()
@click.option("--samples", "samples_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--prep-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="directory of <job_id>.prep.txt to join in")
@click.option("--shots", required=True, type=click.IntRange(min=1),
              help="labeled examples per class")
@click.option("--seed", type=int, default=None)
@click.option("--nondeterministic", is_flag=True)
@click.option("--provider", type=click.Choice(PROVIDER_CHOICES), default="test",
              show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--fine-tune/--no-fine-tune", default=True, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def train(ctx, **kw):
    """Train the few-shot classifier and save it as a model bundle."""
    p = _merge_config(ctx, "train", kw)
    seed = _resolve_seed(p["seed"], p["nondeterministic"])
    samples = _load_labeled(p["samples_path"], p["prep_dir"])
    labels = [s.effective_label for s in samples]
    shots_idx = sample_shots(
        labels, list(range(len(samples))), p["shots"], derive_seed(seed, "train_shots")
    )
    texts = [samples[i].processed_log for i in shots_idx]
    if any(t is None for t in texts):
        raise DataError("samples lack processed logs; run prep or pass --prep-dir")
    clf = FewShotLogClassifier(
        provider=get_provider(p["provider"]),
        hyperparams=FewShotHyperParams(seed=derive_seed(seed, "train")),
        fine_tune=p["fine_tune"],
    )
    clf.fit(texts, [labels[i] for i in shots_idx])
    bundle = ModelBundle.from_classifier(
        clf,
        training_metadata={
            "shots": p["shots"],
            "seed": seed,
            "provider": p["provider"],
            "n_candidates": len(samples),
        },
    )
    save_bundle(bundle, p["out_dir"])
    payload = {
        "bundle": str(p["out_dir"]),
        "shots": p["shots"],
        "provider": p["provider"],
        "seed": seed,
        "n_train": 2 * p["shots"],
    }
    _emit(payload, p["as_json"],
          [f"trained on {2 * p['shots']} shots, bundle saved to {p['out_dir']}"])


# predict

@cli.command()
@click.option("--bundle", "bundle_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--log", "log_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def predict(ctx, **kw):
    """Classify one raw log file with a saved bundle."""
    p = _merge_config(ctx, "predict", kw)
    bundle = load_bundle(p["bundle_dir"])
    raw = Path(p["log_path"]).read_text(encoding="utf-8")
    result = bundle.predict_one(raw)
    payload = {
        "log": str(p["log_path"]),
        "label": result["label"],
        "probability": result["probability"],
    }
    name = "intermittent" if result["label"] == 1 else "regular"
    _emit(payload, p["as_json"],
          [f"{name} (probability {result['probability']:.4f})"])


# baseline

@cli.group()
def baseline():
    """Train or apply the TF-IDF vote comparator."""


def _store_samples(store_dir, prep_cfg: PrepConfig):
    store = ProjectStore(store_dir)
    records = store.read_records()
    if not records:
        raise DataError(f"store {store_dir} has no job records")
    samples, _ = labeling.auto_label(records)
    metrics = compute_all_metrics(records, {s.job_id: s.auto_label for s in samples})
    for s in samples:
        s.metrics = metrics[s.job_id].to_dict()
        s.processed_log = preprocess(store.read_log(s.job_id), prep_cfg).text
    return store, records, samples


def _read_id_file(path) -> set:
    ids = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            ids.add(int(line))
        except ValueError:
            raise DataError(f"{path}:{lineno}: job ids must be integers, got {line!r}")
    return ids


@baseline.command("train")
@click.option("--project", "store_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="project store directory")
@click.option("--exclude", "exclude_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="file of held-out job ids, one per line")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--nondeterministic", is_flag=True)
@click.option("--k-features", default=1000, show_default=True, type=click.IntRange(min=1))
@click.option("--hpo/--no-hpo", default=True, show_default=True,
              help="10-fold grid search for the ensembles")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def baseline_train(ctx, **kw):
    """Train the comparator on a store's auto-labeled failures."""
    p = _merge_config(ctx, "baseline.train", kw)
    seed = _resolve_seed(p["seed"], p["nondeterministic"])
    _, _, samples = _store_samples(p["store_dir"], PrepConfig())
    excluded = _read_id_file(p["exclude_path"]) if p["exclude_path"] else set()
    train_set = [s for s in samples if s.job_id not in excluded]
    if not train_set:
        raise DataError("no training samples left after exclusions")
    config = BaselineConfig(k_features=p["k_features"], hpo=p["hpo"], seed=seed)
    clf = train_sota(train_set, config=config)
    save_baseline(clf, p["out_dir"])
    payload = {
        "model": str(p["out_dir"]),
        "n_train": len(train_set),
        "excluded": len(samples) - len(train_set),
        "seed": seed,
        "vote_weights": list(clf.weights_),
    }
    _emit(payload, p["as_json"], [
        f"trained on {len(train_set)} failures "
        f"({len(samples) - len(train_set)} excluded), model saved to {p['out_dir']}"
    ])


@baseline.command("predict")
@click.option("--model", "model_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--project", "store_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--job", "job_ids", multiple=True, type=int, required=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def baseline_predict(ctx, **kw):
    """Score stored failed jobs with a saved comparator model."""
    p = _merge_config(ctx, "baseline.predict", kw)
    clf = load_baseline(p["model_dir"])
    _, _, samples = _store_samples(p["store_dir"], PrepConfig())
    by_id = {s.job_id: s for s in samples}
    missing = [j for j in p["job_ids"] if j not in by_id]
    if missing:
        raise DataError(f"not failed jobs in this store: {sorted(missing)}")
    chosen = [by_id[j] for j in p["job_ids"]]
    scores = clf.predict_scores(
        [s.processed_log for s in chosen], metrics=[s.metrics for s in chosen]
    )["score"]
    results = [
        {"job_id": s.job_id, "label": int(score >= 0.5), "score": float(score)}
        for s, score in zip(chosen, scores)
    ]
    payload = {"model": str(p["model_dir"]), "results": results}
    _emit(payload, p["as_json"], [
        f"job {r['job_id']}: {'intermittent' if r['label'] else 'regular'} "
        f"(score {r['score']:.4f})"
        for r in results
    ])


# harness commands

def _trainer_from_flags(trainer: str, provider: str, baseline_hpo: bool):
    if trainer == "fewshot":
        return FewShotTrainer(provider_factory=_provider_factory(provider))
    return BaselineTrainer(config=BaselineConfig(hpo=baseline_hpo))


def _mccv_config(p, seed) -> MccvConfig:
    return MccvConfig(
        repeats=p["repeats"],
        trials=p["trials"],
        shots=p["shots"],
        master_seed=seed,
        pair_multiplier=p["pair_multiplier"],
        jobs=p["jobs"],
    )


def _harness_options(fn):
    for deco in reversed([
        click.option("--samples", "samples_path", required=True,
                     type=click.Path(exists=True, dir_okay=False)),
        click.option("--prep-dir", type=click.Path(exists=True, file_okay=False),
                     default=None),
        click.option("--seed", type=int, default=None),
        click.option("--nondeterministic", is_flag=True),
        click.option("--provider", type=click.Choice(PROVIDER_CHOICES), default="test",
                     show_default=True),
        click.option("--trainer", type=click.Choice(("fewshot", "baseline")),
                     default="fewshot", show_default=True),
        click.option("--baseline-hpo/--no-baseline-hpo", default=True,
                     help="grid-search the comparator inside each repeat"),
        click.option("--repeats", default=100, show_default=True,
                     type=click.IntRange(min=1)),
        click.option("--trials", default=5, show_default=True,
                     type=click.IntRange(min=1)),
        click.option("--pair-multiplier", default=20, show_default=True,
                     type=click.IntRange(min=1)),
        click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1)),
        click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None),
        click.option("--json", "as_json", is_flag=True),
    ]):
        fn = deco(fn)
    return fn


@cli.command()
@_harness_options
@click.option("--shots", default=12, show_default=True, type=click.IntRange(min=1))
@click.pass_context
def mccv(ctx, **kw):
    """Monte Carlo cross-validation with nested hyperparameter search."""
    p = _merge_config(ctx, "mccv", kw)
    seed = _resolve_seed(p["seed"], p["nondeterministic"])
    samples = _load_labeled(p["samples_path"], p["prep_dir"])
    trainer = _trainer_from_flags(p["trainer"], p["provider"], p["baseline_hpo"])
    report = run_mccv(samples, _mccv_config(p, seed), trainer)
    text = report.to_json()
    if p["out_path"]:
        _write_text(p["out_path"], text)
    if p["as_json"]:
        click.echo(text, nl=False)
    else:
        click.echo(
            f"{p['trainer']} over {p['repeats']} repeats: "
            f"F1 {report.mean_f1:.4f} +/- {report.std_f1:.4f}"
            + (f", report written to {p['out_path']}" if p["out_path"] else "")
        )


@cli.command()
@_harness_options
@click.option("--shot-counts", default="1-15", show_default=True,
              help="comma list and/or ranges, e.g. 1,2,5-8")
@click.pass_context
def sweep(ctx, **kw):
    """Run the harness across shot budgets and rank-sum test each against the largest."""
    p = _merge_config(ctx, "sweep", kw)
    seed = _resolve_seed(p["seed"], p["nondeterministic"])
    samples = _load_labeled(p["samples_path"], p["prep_dir"])
    trainer = _trainer_from_flags(p["trainer"], p["provider"], p["baseline_hpo"])
    counts = _parse_counts(p["shot_counts"])
    config = _mccv_config({**p, "shots": counts[-1]}, seed)
    result = shots_sweep(samples, config, trainer, shot_counts=counts)
    text = result.to_json()
    if p["out_path"]:
        _write_text(p["out_path"], text)
    if p["as_json"]:
        click.echo(text, nl=False)
    else:
        for n in sorted(result.per_n):
            r = result.per_n[n]
            suffix = (
                "reference" if n == result.reference_n
                else f"p={result.p_values[n]:.3f}"
            )
            click.echo(f"shots {n:>2}: F1 {r.mean_f1:.4f} +/- {r.std_f1:.4f}  {suffix}")


def _parse_counts(spec: str):
    counts = set()
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "-" in chunk:
            lo, _, hi = chunk.partition("-")
            try:
                lo, hi = int(lo), int(hi)
            except ValueError:
                raise click.UsageError(f"bad shot count range: {chunk!r}")
            if lo > hi:
                raise click.UsageError(f"bad shot count range: {chunk!r}")
            counts.update(range(lo, hi + 1))
        else:
            try:
                counts.add(int(chunk))
            except ValueError:
                raise click.UsageError(f"bad shot count: {chunk!r}")
    if not counts or min(counts) < 1:
        raise click.UsageError(f"no usable shot counts in {spec!r}")
    return sorted(counts)


@cli.command()
@_harness_options
@click.option("--shots", default=12, show_default=True, type=click.IntRange(min=1))
@click.option("--dataset", "datasets", multiple=True, required=True,
              help="name=path of a labeled samples JSONL (repeatable)")
@click.pass_context
def cross(ctx, **kw):
    """One-to-one cross-project evaluation matrix."""
    p = _merge_config(ctx, "cross", kw)
    seed = _resolve_seed(p["seed"], p["nondeterministic"])
    if p["trainer"] != "fewshot":
        raise click.UsageError("cross-project transfer needs the fewshot trainer")
    named = {}
    for item in p["datasets"]:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise click.UsageError(f"--dataset wants name=path, got {item!r}")
        named[name] = dataio.read_samples_jsonl(path, prep_dir=p["prep_dir"])
    trainer = _trainer_from_flags(p["trainer"], p["provider"], p["baseline_hpo"])
    result = cross_project(named, _mccv_config(p, seed), trainer)
    text = result.to_json()
    if p["out_path"]:
        _write_text(p["out_path"], text)
    if p["as_json"]:
        click.echo(text, nl=False)
    else:
        click.echo(cross_markdown(result))


# report

@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(("markdown", "json")),
              default="markdown", show_default=True)
@click.option("--name", default="dataset", show_default=True,
              help="dataset label used in markdown headings")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def report(ctx, **kw):
    """Render a saved harness result as markdown or canonical JSON."""
    p = _merge_config(ctx, "report", kw)
    raw = Path(p["in_path"]).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DataError(f"{p['in_path']}: not JSON: {exc}")

    if "per_repeat" in data:
        loaded = EvalReport.from_json(raw)
        rendered = mccv_markdown(loaded, p["name"])
        canonical = loaded.to_json()
    elif "per_n" in data:
        from .evaluation.sweep import ShotsSweepResult

        loaded = ShotsSweepResult.from_json(raw)
        rendered = sweep_markdown(loaded, p["name"])
        canonical = loaded.to_json()
    elif "matrix" in data:
        from .evaluation.cross import CrossProjectResult

        loaded = CrossProjectResult.from_json(raw)
        rendered = cross_markdown(loaded)
        canonical = loaded.to_json()
    else:
        raise DataError(
            f"{p['in_path']}: unrecognized result shape "
            "(expected an mccv, sweep, or cross output)"
        )
    text = rendered if p["fmt"] == "markdown" else canonical
    if p["out_path"]:
        _write_text(p["out_path"], text)
        click.echo(f"wrote {p['fmt']} report to {p['out_path']}")
    else:
        click.echo(text, nl=False)


def main(argv=None) -> int:
    try:
        cli(args=argv, standalone_mode=False, prog_name="brownjobs")
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"brownjobs: usage: {_one_line(exc.format_message())}", err=True)
        return 1
    except click.Abort:
        click.echo("brownjobs: usage: aborted", err=True)
        return 1
    except EnvironmentFailure as exc:
        click.echo(f"brownjobs: environment: {_one_line(str(exc))}", err=True)
        return 3
    except BrownjobsError as exc:
        click.echo(f"brownjobs: data: {_one_line(str(exc))}", err=True)
        return 2


def _one_line(message: str) -> str:
    return " ".join(str(message).split())


if __name__ == "__main__":
    sys.exit(main())
