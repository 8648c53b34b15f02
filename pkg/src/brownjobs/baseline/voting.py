"""The two-model weighted-vote comparator.

model1: gradient-boosted trees over chi-squared-selected TF-IDF
features of the processed log. model2: gradient-boosted trees over
the job's history metrics concatenated with model1's per-feature
attributions for that log. Final score = w1*p1 + w2*p2 with w1+w2=1,
weights picked on a held-out fold to maximize intermittent-class F1.

Unlike the few-shot path, this model cannot predict without job
metrics; that asymmetry is intentional and enforced.
"""

from __future__ import annotations

import json
import os
import pickle
from dataclasses import dataclass, field, asdict
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.ensemble import GradientBoostingClassifier

from ..errors import DataError, MissingMetricsError, StarvingSplitError
from ..evaluation.metrics import binary_class_metrics
from ..logprep import PrepConfig, preprocess
from ..records import LABEL_INTERMITTENT, LABEL_REGULAR, LabeledSample
from ..seeding import derive_seed, rng_for
from .attribution import tree_path_contributions
from .jobmetrics import JobMetrics
from .selection import select_k_best
from .tfidf import TfidfModel

ATTRIBUTION_METHOD = "tree_path_additive"

VOTE_WEIGHT_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))  # 0.1 .. 0.9


@dataclass(frozen=True)
class BaselineConfig:
    """Everything tunable about the comparator.

    With hpo on, tree settings come from a grid searched by k-fold
    cross-validation on model1's intermittent F1; otherwise the
    defaults below are used directly. k_features is capped at the
    actual vocabulary size at fit time.
    """

    k_features: int = 1000
    k_choices: Tuple[int, ...] = (200, 500, 1000, 2000)
    search_k: bool = False
    hpo: bool = True
    hpo_folds: int = 10
    depths: Tuple[int, ...] = (3, 6)
    estimator_counts: Tuple[int, ...] = (100, 300)
    learning_rates: Tuple[float, ...] = (0.05, 0.1)
    max_depth: int = 3
    n_estimators: int = 100
    learning_rate: float = 0.1
    vote_holdout_fraction: float = 0.25
    refold_attempts: int = 3
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BaselineConfig":
        d = dict(d)
        for key in ("k_choices", "depths", "estimator_counts", "learning_rates"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def _coerce_metrics(metrics, n: int) -> np.ndarray:
    if metrics is None:
        raise MissingMetricsError(
            "the vote baseline needs job metrics (prior reruns, commits since "
            "last intermittent) for every sample"
        )
    rows = []
    for m in metrics:
        if isinstance(m, JobMetrics):
            rows.append(m.as_vector())
        elif isinstance(m, dict):
            rows.append(JobMetrics.from_dict(m).as_vector())
        else:
            arr = np.asarray(m, dtype=np.float64).ravel()
            if arr.shape != (2,):
                raise MissingMetricsError(f"metrics row has shape {arr.shape}, want (2,)")
            rows.append(arr)
    out = np.stack(rows) if rows else np.zeros((0, 2))
    if out.shape[0] != n:
        raise MissingMetricsError(f"{out.shape[0]} metric rows for {n} samples")
    return out


def _stratified_indices(labels: np.ndarray, fraction: float, seed: int, *ctx):
    """(train_idx, holdout_idx); holdout gets ~fraction per class."""
    rng = rng_for(seed, "vote_holdout", *ctx)
    hold: List[int] = []
    train: List[int] = []
    for cls in (LABEL_INTERMITTENT, LABEL_REGULAR):
        pool = np.flatnonzero(labels == cls)
        pool = pool[rng.permutation(len(pool))]
        n_hold = max(1, int(round(fraction * len(pool))))
        hold.extend(pool[:n_hold].tolist())
        train.extend(pool[n_hold:].tolist())
    return sorted(train), sorted(hold)


def _kfold_indices(labels: np.ndarray, folds: int, seed: int, attempts: int):
    """Stratified-ish k folds where every train part keeps both classes.

    Refolds with a fresh derived seed when a fold degenerates; gives
    up after the configured number of attempts.
    """
    n = len(labels)
    folds = min(folds, n)
    for attempt in range(attempts):
        rng = rng_for(seed, "kfold", attempt)
        order = rng.permutation(n)
        fold_of = np.zeros(n, dtype=np.int64)
        # deal each class round-robin so folds stay stratified
        counter = 0
        for cls in (LABEL_INTERMITTENT, LABEL_REGULAR):
            for i in order:
                if labels[i] == cls:
                    fold_of[i] = counter % folds
                    counter += 1
        ok = True
        splits = []
        for f in range(folds):
            test_mask = fold_of == f
            train_mask = ~test_mask
            if len(set(labels[train_mask].tolist())) < 2 or not test_mask.any():
                ok = False
                break
            splits.append((np.flatnonzero(train_mask), np.flatnonzero(test_mask)))
        if ok:
            return splits
    raise StarvingSplitError(
        "cv_fold", f"could not build {folds} two-class folds after {attempts} attempts"
    )


class TfidfVoteClassifier(BaseEstimator, ClassifierMixin):
    """sklearn-style estimator for the weighted-vote comparator.

    fit(X, y, metrics=...) takes log texts (raw or already processed;
    the pre-processing chain is idempotent), binary labels, and one
    metrics row per sample. predict/predict_proba need metrics too.
    """

    def __init__(self, config: Optional[BaselineConfig] = None, prep_config: Optional[PrepConfig] = None):
        self.config = config
        self.prep_config = prep_config

    def _cfg(self) -> BaselineConfig:
        return self.config or BaselineConfig()

    def _prep(self, texts: Sequence[str]) -> List[str]:
        cfg = self.prep_config or PrepConfig()
        return [preprocess(t, cfg).text for t in texts]

    def _gb(self, depth: int, n_estimators: int, lr: float, role: str) -> GradientBoostingClassifier:
        cfg = self._cfg()
        return GradientBoostingClassifier(
            max_depth=depth,
            n_estimators=n_estimators,
            learning_rate=lr,
            random_state=derive_seed(cfg.seed, "gb", role) % (2**32),
        )

    def _model2_features(self, model1, X1: np.ndarray, metrics: np.ndarray) -> np.ndarray:
        return np.hstack([metrics, tree_path_contributions(model1, X1)])

    def _hpo(self, X1: np.ndarray, y: np.ndarray) -> Tuple[int, int, float]:
        cfg = self._cfg()
        if not cfg.hpo:
            return cfg.max_depth, cfg.n_estimators, cfg.learning_rate
        splits = _kfold_indices(y, cfg.hpo_folds, cfg.seed, cfg.refold_attempts)
        best = None
        for depth in cfg.depths:
            for n_est in cfg.estimator_counts:
                for lr in cfg.learning_rates:
                    scores = []
                    for train_idx, test_idx in splits:
                        model = self._gb(depth, n_est, lr, "hpo")
                        model.fit(X1[train_idx], y[train_idx])
                        pred = model.predict(X1[test_idx])
                        truth = y[test_idx]
                        if len(set(truth.tolist())) < 2:
                            continue
                        scores.append(
                            binary_class_metrics(pred, truth)["f1_intermittent"]
                        )
                    mean_f1 = float(np.mean(scores)) if scores else 0.0
                    key = (depth, n_est, lr)
                    if best is None or mean_f1 > best[0]:
                        best = (mean_f1, key)
        return best[1]

    def fit(self, X: Sequence[str], y: Sequence[int], metrics=None) -> "TfidfVoteClassifier":
        cfg = self._cfg()
        texts = self._prep(list(X))
        labels = np.asarray([int(v) for v in y], dtype=np.int64)
        if len(texts) != len(labels):
            raise DataError("X and y length mismatch")
        if set(labels.tolist()) != {LABEL_REGULAR, LABEL_INTERMITTENT}:
            raise DataError("baseline training needs both classes present")
        metric_rows = _coerce_metrics(metrics, len(texts))

        self.tfidf_ = TfidfModel.fit(texts)
        full = self.tfidf_.transform(texts)
        k = min(cfg.k_features, full.shape[1])
        self.selected_ = select_k_best(full, labels, k)
        self.tfidf_.k_selected = list(self.selected_)
        X1 = np.asarray(full[:, self.selected_].todense())

        depth, n_est, lr = self._hpo(X1, labels)
        self.gb_params_ = {"max_depth": depth, "n_estimators": n_est, "learning_rate": lr}

        # vote weights from a held-out fold, then refit on everything
        w1 = self._search_vote_weight(X1, labels, metric_rows, depth, n_est, lr)
        self.weights_ = (w1, round(1.0 - w1, 10))

        self.model1_ = self._gb(depth, n_est, lr, "model1").fit(X1, labels)
        F2 = self._model2_features(self.model1_, X1, metric_rows)
        self.model2_ = self._gb(depth, n_est, lr, "model2").fit(F2, labels)
        self.classes_ = np.array([LABEL_REGULAR, LABEL_INTERMITTENT])
        self.attribution_method_ = ATTRIBUTION_METHOD
        return self

    def _search_vote_weight(
        self, X1: np.ndarray, labels: np.ndarray, metric_rows: np.ndarray,
        depth: int, n_est: int, lr: float,
    ) -> float:
        cfg = self._cfg()
        last_error: Optional[Exception] = None
        for attempt in range(cfg.refold_attempts):
            train_idx, hold_idx = _stratified_indices(
                labels, cfg.vote_holdout_fraction, cfg.seed, attempt
            )
            hold_truth = labels[hold_idx]
            if len(set(labels[train_idx].tolist())) < 2 or len(set(hold_truth.tolist())) < 2:
                last_error = StarvingSplitError(
                    "vote_holdout", f"degenerate holdout on attempt {attempt}"
                )
                continue
            m1 = self._gb(depth, n_est, lr, "m1_sub").fit(X1[train_idx], labels[train_idx])
            F2_train = self._model2_features(m1, X1[train_idx], metric_rows[train_idx])
            m2 = self._gb(depth, n_est, lr, "m2_sub").fit(F2_train, labels[train_idx])
            p1 = m1.predict_proba(X1[hold_idx])[:, 1]
            F2_hold = self._model2_features(m1, X1[hold_idx], metric_rows[hold_idx])
            p2 = m2.predict_proba(F2_hold)[:, 1]
            best_w1, best_f1 = VOTE_WEIGHT_GRID[0], -1.0
            for w1 in VOTE_WEIGHT_GRID:
                pred = ((w1 * p1 + (1.0 - w1) * p2) >= 0.5).astype(np.int64)
                f1 = binary_class_metrics(pred, hold_truth)["f1_intermittent"]
                if f1 > best_f1:
                    best_f1, best_w1 = f1, w1
            return best_w1
        raise last_error or StarvingSplitError("vote_holdout", "weight search failed")

    def _check_fitted(self):
        if not hasattr(self, "model1_"):
            raise DataError("baseline model is not fitted")

    def predict_scores(self, X: Sequence[str], metrics=None) -> dict:
        """p1, p2, and the vote score per sample."""
        self._check_fitted()
        texts = self._prep(list(X))
        metric_rows = _coerce_metrics(metrics, len(texts))
        X1 = np.asarray(self.tfidf_.transform(texts)[:, self.selected_].todense())
        p1 = self.model1_.predict_proba(X1)[:, 1]
        F2 = self._model2_features(self.model1_, X1, metric_rows)
        p2 = self.model2_.predict_proba(F2)[:, 1]
        w1, w2 = self.weights_
        return {"p1": p1, "p2": p2, "score": w1 * p1 + w2 * p2}

    def predict_proba(self, X: Sequence[str], metrics=None) -> np.ndarray:
        score = self.predict_scores(X, metrics)["score"]
        return np.column_stack([1.0 - score, score])

    def predict(self, X: Sequence[str], metrics=None) -> np.ndarray:
        score = self.predict_scores(X, metrics)["score"]
        # ties at exactly 0.5 go to intermittent, as everywhere else
        return (score >= 0.5).astype(np.int64)


def train_sota(
    samples: Sequence[LabeledSample],
    config: Optional[BaselineConfig] = None,
    prep_config: Optional[PrepConfig] = None,
) -> TfidfVoteClassifier:
    """Fit the comparator from labeled samples.

    Trains on the automatic labels (the heuristic's output is all this
    approach ever has at scale); samples must carry processed logs and
    metrics.
    """
    missing_text = [s.job_id for s in samples if not s.processed_log]
    if missing_text:
        raise DataError(f"samples without processed logs: {missing_text[:10]}")
    missing_metrics = [s.job_id for s in samples if s.metrics is None]
    if missing_metrics:
        raise MissingMetricsError(
            f"samples without job metrics: {missing_metrics[:10]}"
        )
    clf = TfidfVoteClassifier(config=config, prep_config=prep_config)
    clf.fit(
        [s.processed_log for s in samples],
        [s.auto_label for s in samples],
        metrics=[s.metrics for s in samples],
    )
    return clf


def save_baseline(clf: TfidfVoteClassifier, directory: str) -> None:
    """Persist as a directory: vocabulary JSON, indices, blobs, weights."""
    clf._check_fitted()
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "tfidf.json"), "w", encoding="utf-8") as fh:
        json.dump(clf.tfidf_.to_dict(), fh)
    meta = {
        "selected": list(map(int, clf.selected_)),
        "weights": list(clf.weights_),
        "gb_params": clf.gb_params_,
        "attribution": clf.attribution_method_,
        "config": clf._cfg().to_dict(),
    }
    with open(os.path.join(directory, "vote.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    with open(os.path.join(directory, "model1.pkl"), "wb") as fh:
        pickle.dump(clf.model1_, fh)
    with open(os.path.join(directory, "model2.pkl"), "wb") as fh:
        pickle.dump(clf.model2_, fh)


def load_baseline(directory: str) -> TfidfVoteClassifier:
    try:
        with open(os.path.join(directory, "tfidf.json"), encoding="utf-8") as fh:
            tfidf_dict = json.load(fh)
        with open(os.path.join(directory, "vote.json"), encoding="utf-8") as fh:
            meta = json.load(fh)
        with open(os.path.join(directory, "model1.pkl"), "rb") as fh:
            model1 = pickle.load(fh)
        with open(os.path.join(directory, "model2.pkl"), "rb") as fh:
            model2 = pickle.load(fh)
    except (OSError, json.JSONDecodeError, pickle.UnpicklingError) as exc:
        raise DataError(f"unreadable baseline model directory: {exc}") from exc
    clf = TfidfVoteClassifier(config=BaselineConfig.from_dict(meta["config"]))
    clf.tfidf_ = TfidfModel.from_dict(tfidf_dict)
    clf.selected_ = list(map(int, meta["selected"]))
    clf.weights_ = tuple(meta["weights"])
    clf.gb_params_ = meta["gb_params"]
    clf.model1_ = model1
    clf.model2_ = model2
    clf.attribution_method_ = meta.get("attribution", ATTRIBUTION_METHOD)
    clf.classes_ = np.array([LABEL_REGULAR, LABEL_INTERMITTENT])
    return clf
