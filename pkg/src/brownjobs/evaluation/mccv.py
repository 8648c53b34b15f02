"""Monte Carlo cross-validation with nested random hyperparameter search.

Every repeat i: stratify the dataset into learn/validation/test,
sample N shots per class from the learn split, train one candidate
per trial j with randomly drawn hyperparameters, keep the candidate
with the best validation F1 (strict improvement, so the earliest
maximum wins), and score it once on the test split. The headline
number is the mean intermittent-class F1 over repeats.

Seeds for repeat i and trial j derive from (master_seed, i, j) by a
stable hash, never from a shared RNG stream, so repeats are
order-independent: running them in any order, or in parallel threads,
produces the identical report.

Two trainers plug in. The few-shot trainer trains on the sampled
shots with their effective (manually audited when present) labels.
The comparator trainer ignores shots and trains on the full
learn+validation pool with its automatic labels; that pool never
touches the test split, and the difference in label quality between
the two training routes is the point of the comparison.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..baseline.voting import BaselineConfig, TfidfVoteClassifier
from ..errors import DataError, MccvRepeatError, MissingMetricsError
from ..fewshot.classifier import FewShotLogClassifier
from ..fewshot.hyperparams import FewShotHyperParams
from ..fewshot.providers import HashingEmbeddingModel
from ..logprep import PrepConfig
from ..records import LabeledSample
from ..seeding import derive_seed
from .hpsearch import random_hp
from .metrics import binary_class_metrics
from .splits import DatasetSplits, SplitRatios, sample_shots, stratified_split

TRAIN_ON_SHOTS = "shots"
TRAIN_ON_LEARN_VAL = "learn_val"


@dataclass(frozen=True)
class MccvConfig:
    repeats: int = 100
    trials: int = 5
    shots: int = 12
    ratios: SplitRatios = field(default_factory=SplitRatios)
    master_seed: int = 0
    pair_multiplier: int = 20
    jobs: int = 1  # execution detail: deliberately absent from the report echo

    def validate(self) -> "MccvConfig":
        if self.repeats < 1 or self.trials < 1 or self.shots < 1:
            raise ValueError("repeats, trials, and shots must all be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        return self

    def echo(self, trainer_name: str) -> dict:
        return {
            "repeats": self.repeats,
            "trials": self.trials,
            "shots": self.shots,
            "ratios": self.ratios.to_dict(),
            "master_seed": self.master_seed,
            "pair_multiplier": self.pair_multiplier,
            "trainer": trainer_name,
        }


@dataclass
class EvalReport:
    """Per-repeat scores plus the aggregate, JSON-stable."""

    config: dict
    per_repeat: List[dict]
    mean_f1: float
    std_f1: float

    @property
    def f1_values(self) -> List[float]:
        return [r["f1"] for r in self.per_repeat]

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "per_repeat": self.per_repeat,
            "mean_f1": self.mean_f1,
            "std_f1": self.std_f1,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        d = json.loads(text)
        return cls(
            config=d["config"],
            per_repeat=d["per_repeat"],
            mean_f1=d["mean_f1"],
            std_f1=d["std_f1"],
        )


class FewShotTrainer:
    """Trains the few-shot pipeline on the sampled shots."""

    name = "fewshot"
    uses_hp_search = True
    training_scope = TRAIN_ON_SHOTS

    def __init__(
        self,
        provider_factory: Optional[Callable[[], object]] = None,
        prep_config: Optional[PrepConfig] = None,
        fine_tune: bool = True,
    ):
        self.provider_factory = provider_factory or HashingEmbeddingModel
        self.prep_config = prep_config
        self.fine_tune = fine_tune

    def fit(self, texts, labels, metrics, hp: Optional[FewShotHyperParams], seed: int):
        clf = FewShotLogClassifier(
            provider=self.provider_factory(),
            hyperparams=hp or FewShotHyperParams(seed=seed),
            prep_config=self.prep_config,
            fine_tune=self.fine_tune,
        )
        return clf.fit(texts, labels)

    def predict(self, model, texts, metrics) -> np.ndarray:
        return model.predict(texts)


class BaselineTrainer:
    """Trains the TF-IDF vote comparator on learn+validation auto labels."""

    name = "baseline"
    uses_hp_search = False
    training_scope = TRAIN_ON_LEARN_VAL

    def __init__(
        self,
        config: Optional[BaselineConfig] = None,
        prep_config: Optional[PrepConfig] = None,
    ):
        self.config = config or BaselineConfig()
        self.prep_config = prep_config

    def fit(self, texts, labels, metrics, hp, seed: int):
        if metrics is None:
            raise MissingMetricsError(
                "the comparator needs job metrics for its training pool"
            )
        clf = TfidfVoteClassifier(
            config=replace(self.config, seed=seed), prep_config=self.prep_config
        )
        return clf.fit(texts, labels, metrics=metrics)

    def predict(self, model, texts, metrics) -> np.ndarray:
        return model.predict(texts, metrics=metrics)


@dataclass
class _Arrays:
    texts: List[str]
    auto_labels: List[int]
    true_labels: List[int]
    job_ids: List[int]
    metrics: Optional[List[dict]]


def _arrays_from_samples(samples: Sequence[LabeledSample]) -> _Arrays:
    missing = [s.job_id for s in samples if not s.processed_log]
    if missing:
        raise DataError(f"samples without processed logs: {missing[:10]}")
    metrics = [s.metrics for s in samples]
    return _Arrays(
        texts=[s.processed_log for s in samples],
        auto_labels=[s.auto_label for s in samples],
        true_labels=[s.effective_label for s in samples],
        job_ids=[s.job_id for s in samples],
        metrics=metrics if all(m is not None for m in metrics) else None,
    )


def _take(values, indices):
    return [values[i] for i in indices] if values is not None else None


def _run_repeat(
    i: int,
    data: _Arrays,
    shots_data: _Arrays,
    config: MccvConfig,
    trainer,
) -> dict:
    split_seed = derive_seed(config.master_seed, "split", i)
    splits = stratified_split(data.true_labels, config.ratios, split_seed)
    shots_splits = splits
    if shots_data is not data:
        # cross-project: the shot pool comes from the training project,
        # cut with the same derived seed
        shots_splits = stratified_split(
            shots_data.true_labels, config.ratios, split_seed
        )
    shots_idx = sample_shots(
        shots_data.true_labels,
        shots_splits.learn_idx,
        config.shots,
        derive_seed(config.master_seed, "shots", i),
    )
    splits.shots_idx = shots_idx

    if trainer.training_scope == TRAIN_ON_SHOTS:
        train_texts = _take(shots_data.texts, shots_idx)
        train_labels = _take(shots_data.true_labels, shots_idx)
        train_metrics = _take(shots_data.metrics, shots_idx)
    elif shots_data is not data:
        raise DataError(
            f"trainer {trainer.name!r} cannot run cross-project: it trains on "
            "the target pool, not transferable shots"
        )
    else:
        pool = splits.learn_idx + splits.val_idx
        train_texts = _take(data.texts, pool)
        train_labels = _take(data.auto_labels, pool)
        train_metrics = _take(data.metrics, pool)

    val_truth = _take(data.true_labels, splits.val_idx)
    repeat_seed = derive_seed(config.master_seed, "repeat", i)

    if trainer.uses_hp_search:
        best = None
        for j in range(config.trials):
            hp = random_hp(
                config.master_seed, i, j, pair_multiplier=config.pair_multiplier
            )
            model = trainer.fit(train_texts, train_labels, train_metrics, hp, repeat_seed)
            val_pred = trainer.predict(
                model, _take(data.texts, splits.val_idx), _take(data.metrics, splits.val_idx)
            )
            val_f1 = binary_class_metrics(val_pred, val_truth)["f1"]
            if best is None or val_f1 > best[0]:
                best = (val_f1, model, hp)
        _, model, chosen_hp = best
        hp_echo = chosen_hp.to_dict()
    else:
        model = trainer.fit(train_texts, train_labels, train_metrics, None, repeat_seed)
        hp_echo = None

    test_pred = trainer.predict(
        model, _take(data.texts, splits.test_idx), _take(data.metrics, splits.test_idx)
    )
    scored = binary_class_metrics(test_pred, _take(data.true_labels, splits.test_idx))
    return {
        "seed": repeat_seed,
        "hp": hp_echo,
        "f1": scored["f1"],
        "precision_intermittent": scored["precision_intermittent"],
        "recall_intermittent": scored["recall_intermittent"],
        "precision_regular": scored["precision_regular"],
        "recall_regular": scored["recall_regular"],
        "confusion": scored["confusion"],
    }


def mccv(
    samples: Sequence[LabeledSample],
    config: MccvConfig,
    trainer,
    shots_from: Optional[Sequence[LabeledSample]] = None,
) -> EvalReport:
    """Run the full harness and aggregate.

    shots_from switches to cross-project mode: splits and scoring come
    from `samples` (the target project) while the shots are drawn from
    the other project's learn split.

    Any repeat that fails its preconditions fails the whole run with
    the complete list of offending repeats; nothing is skipped quietly.
    """
    config = config.validate()
    data = _arrays_from_samples(samples)
    shots_data = data if shots_from is None else _arrays_from_samples(shots_from)

    results: List[Optional[dict]] = [None] * config.repeats
    failures: List[tuple] = []

    def run(i: int):
        return _run_repeat(i, data, shots_data, config, trainer)

    if config.jobs == 1:
        for i in range(config.repeats):
            try:
                results[i] = run(i)
            except DataError as exc:
                failures.append((i, exc))
    else:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            futures = {i: pool.submit(run, i) for i in range(config.repeats)}
            for i, fut in futures.items():
                try:
                    results[i] = fut.result()
                except DataError as exc:
                    failures.append((i, exc))

    if failures:
        indices = sorted(i for i, _ in failures)
        first = failures[0][1]
        raise MccvRepeatError(
            f"{len(failures)} repeat(s) failed, first: {first}",
            repeat_indices=indices,
        )

    f1s = np.array([r["f1"] for r in results], dtype=np.float64)
    return EvalReport(
        config=config.echo(trainer.name),
        per_repeat=list(results),
        mean_f1=float(f1s.mean()),
        std_f1=float(f1s.std()),  # population std over the repeat scores
    )
