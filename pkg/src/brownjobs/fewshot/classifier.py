"""The few-shot estimator: pre-process, embed, classify.

FewShotLogClassifier is the trainable pipeline. fit() takes raw (or
already pre-processed; the chain is idempotent) log texts with binary
labels, generates contrastive pairs, fine-tunes the embedding
provider, and fits a logistic head on the tuned embeddings.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.linear_model import LogisticRegression

from ..errors import DataError, ShotCountError
from ..logprep import PrepConfig, preprocess
from ..records import LABEL_INTERMITTENT, LABEL_REGULAR
from .hyperparams import FewShotHyperParams
from .pairs import generate_pairs
from .providers import HashingEmbeddingModel, truncate_to_limit

HEAD_REGULARIZATION = {"kind": "l2", "strength": 1.0}


class LogisticHead:
    """Binary logistic model over embeddings.

    Fitting delegates to the lbfgs solver; inference uses the stored
    weights directly so a reloaded head predicts bit-identically.
    """

    def __init__(
        self,
        weights: Optional[np.ndarray] = None,
        bias: float = 0.0,
        max_iter: int = 100,
    ):
        self.weights = None if weights is None else np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        self.max_iter = int(max_iter)

    @property
    def width(self) -> Optional[int]:
        return None if self.weights is None else int(self.weights.shape[0])

    def fit(self, embeddings: np.ndarray, labels: Sequence[int]) -> "LogisticHead":
        X = np.asarray(embeddings, dtype=np.float64)
        y = np.asarray(labels, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DataError("embeddings and labels shape mismatch")
        present = set(y.tolist())
        if present != {LABEL_REGULAR, LABEL_INTERMITTENT}:
            raise DataError(f"head needs both classes, got labels {sorted(present)}")
        model = LogisticRegression(
            C=HEAD_REGULARIZATION["strength"],
            penalty="l2",
            solver="lbfgs",
            max_iter=self.max_iter,
        )
        model.fit(X, y)
        self.weights = model.coef_[0].astype(np.float64)
        self.bias = float(model.intercept_[0])
        return self

    def _scores(self, embeddings: np.ndarray) -> np.ndarray:
        if self.weights is None:
            raise DataError("head is not fitted")
        X = np.asarray(embeddings, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.weights.shape[0]:
            raise DataError(
                f"embedding width {X.shape[1] if X.ndim == 2 else '?'} "
                f"!= head width {self.weights.shape[0]}"
            )
        return X @ self.weights + self.bias

    def predict_proba(self, embeddings: np.ndarray) -> np.ndarray:
        """P(intermittent) per row, via the stored weights only."""
        z = self._scores(embeddings)
        return 1.0 / (1.0 + np.exp(-z))

    def predict(self, embeddings: np.ndarray) -> np.ndarray:
        # ties at exactly 0.5 go to intermittent: the costly miss is an
        # unflagged intermittent failure
        return (self.predict_proba(embeddings) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        if self.weights is None:
            raise DataError("cannot serialize an unfitted head")
        return {
            "weights": [float(w) for w in self.weights],
            "bias": self.bias,
            "width": self.width,
            "max_iter": self.max_iter,
            "regularization": dict(HEAD_REGULARIZATION),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticHead":
        head = cls(
            weights=np.array(d["weights"], dtype=np.float64),
            bias=float(d["bias"]),
            max_iter=int(d.get("max_iter", 100)),
        )
        if head.width != int(d["width"]):
            raise DataError(f"stored width {d['width']} != weight count {head.width}")
        return head


def _check_raw_logs(texts: Sequence[str]) -> List[str]:
    out = []
    for i, text in enumerate(texts):
        if not isinstance(text, str) or not text.strip():
            raise DataError(f"log at index {i} is empty; cannot classify silence")
        out.append(text)
    return out


class FewShotLogClassifier(BaseEstimator, ClassifierMixin):
    """sklearn-style estimator for the full few-shot pipeline.

    Parameters
    ----------
    provider : embedding provider, defaults to the offline test
        provider so training never needs network access.
    hyperparams : FewShotHyperParams, defaults to the space's defaults.
    prep_config : pre-processing toggles.
    fine_tune : skip provider fine-tuning when False (embeddings of
        the raw provider feed the head directly).
    """

    def __init__(
        self,
        provider=None,
        hyperparams: Optional[FewShotHyperParams] = None,
        prep_config: Optional[PrepConfig] = None,
        fine_tune: bool = True,
    ):
        self.provider = provider
        self.hyperparams = hyperparams
        self.prep_config = prep_config
        self.fine_tune = fine_tune

    def _hp(self) -> FewShotHyperParams:
        return self.hyperparams or FewShotHyperParams()

    def _base_provider(self):
        return self.provider if self.provider is not None else HashingEmbeddingModel()

    def _prepare(self, texts: Sequence[str], provider) -> List[str]:
        cfg = self.prep_config or PrepConfig()
        limit = getattr(provider, "input_token_limit", None)
        return [truncate_to_limit(preprocess(t, cfg).text, limit) for t in texts]

    def fit(self, X: Sequence[str], y: Sequence[int]) -> "FewShotLogClassifier":
        texts = _check_raw_logs(X)
        labels = [int(v) for v in y]
        if len(texts) != len(labels):
            raise DataError("X and y length mismatch")
        n_int = sum(1 for v in labels if v == LABEL_INTERMITTENT)
        n_reg = len(labels) - n_int
        if n_int < 2 or n_reg < 2:
            raise ShotCountError(
                f"need at least 2 shots per class, got {n_int} intermittent / {n_reg} regular"
            )
        hp = self._hp()
        base = self._base_provider()
        processed = self._prepare(texts, base)

        if self.fine_tune and getattr(base, "fine_tunable", False):
            pairs = generate_pairs(processed, labels, hp.pair_multiplier, hp.seed)
            self.provider_ = base.fine_tune(pairs, hp)
        else:
            self.provider_ = base

        embeddings = self.provider_.embed(processed)
        self.head_ = LogisticHead(max_iter=hp.max_iter).fit(embeddings, labels)
        self.classes_ = np.array([LABEL_REGULAR, LABEL_INTERMITTENT])
        self.shots_per_class_ = {"intermittent": n_int, "regular": n_reg}
        self.n_features_in_ = embeddings.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "head_"):
            raise DataError("classifier is not fitted")

    def embed(self, X: Sequence[str]) -> np.ndarray:
        """Tuned embeddings of (raw or processed) logs."""
        self._check_fitted()
        return self.provider_.embed(self._prepare(_check_raw_logs(X), self.provider_))

    def predict_proba(self, X: Sequence[str]) -> np.ndarray:
        self._check_fitted()
        p_int = self.head_.predict_proba(self.embed(X))
        return np.column_stack([1.0 - p_int, p_int])

    def predict(self, X: Sequence[str]) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(np.int64)
