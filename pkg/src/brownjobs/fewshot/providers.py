"""Embedding providers: the pluggable ST stage of the pipeline.

Two implementations ship:

- HashingEmbeddingModel: fully offline. Token counts hashed into a
  fixed number of buckets, L2-normalized, projected to the output
  dimension through a trainable linear map. Fine-tuning runs plain
  gradient descent on a squared cosine-similarity loss over the
  contrastive pairs. Deterministic everywhere, so the whole test
  suite runs without network access or model weights.

- PretrainedEmbeddingModel: wraps a sentence-transformers checkpoint
  by model id, loaded lazily. Fine-tuning uses the library's cosine
  similarity loss. Absent package or weights surfaces as an
  environment failure, never an import error at module load.

Both honor the same non-degradation contract: the state returned by
fine_tune scores a positive-minus-negative cosine margin on the
training pairs at least as large as the input state's.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ModelWeightsUnavailableError, TrainingDivergedError
from ..seeding import rng_for
from .hyperparams import FewShotHyperParams
from .pairs import ContrastivePair

DEFAULT_PRETRAINED_MODEL_ID = "BAAI/bge-small-en-v1.5"

# gradient-descent scale for the hashing provider: maps the shared
# learning-rate domain [1e-6, 1e-3] onto steps that move a unit-scale
# linear model
_HASHING_LR_SCALE = 1000.0


def truncate_to_limit(text: str, limit: Optional[int]) -> str:
    """Clamp a processed log to a provider's input-token limit.

    Failures conclude logs, so truncation drops the middle: the head
    fills three quarters of the budget and the log's final tokens the
    rest.
    """
    if limit is None or limit <= 0:
        return text
    tokens = text.split()
    if len(tokens) <= limit:
        return text
    tail_n = limit // 4
    head_n = limit - tail_n
    kept = tokens[:head_n] + tokens[len(tokens) - tail_n :]
    return " ".join(kept)


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return matrix / norms


def _pair_margin(emb_a: np.ndarray, emb_b: np.ndarray, labels: np.ndarray) -> float:
    """Mean positive cosine minus mean negative cosine."""
    cos = np.sum(_unit_rows(emb_a) * _unit_rows(emb_b), axis=1)
    pos = cos[labels == 1]
    neg = cos[labels == 0]
    pos_mean = float(pos.mean()) if pos.size else 0.0
    neg_mean = float(neg.mean()) if neg.size else 0.0
    return pos_mean - neg_mean


class HashingEmbeddingModel:
    """Offline deterministic provider: hashed token counts through a
    trainable linear projection."""

    model_id = "hashing-token-projection"
    fine_tunable = True

    def __init__(
        self,
        n_buckets: int = 512,
        dimension: int = 64,
        input_token_limit: int = 2048,
        weights: Optional[np.ndarray] = None,
    ):
        self.n_buckets = int(n_buckets)
        self.dimension = int(dimension)
        self.input_token_limit = int(input_token_limit)
        if weights is None:
            # fixed init independent of user seeds: embeddings of an
            # untrained provider are identical across processes
            rng = rng_for(0, "hashing-init", self.n_buckets, self.dimension)
            weights = rng.standard_normal((self.n_buckets, self.dimension)) / np.sqrt(
                self.n_buckets
            )
        self.weights = np.asarray(weights, dtype=np.float64)
        if self.weights.shape != (self.n_buckets, self.dimension):
            raise ValueError(
                f"weights shape {self.weights.shape} != ({self.n_buckets}, {self.dimension})"
            )

    def _bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.n_buckets

    def featurize(self, text: str) -> np.ndarray:
        """L2-normalized hashed token counts."""
        counts = np.zeros(self.n_buckets, dtype=np.float64)
        for token in truncate_to_limit(text, self.input_token_limit).split():
            counts[self._bucket(token)] += 1.0
        norm = np.linalg.norm(counts)
        return counts / norm if norm > 0 else counts

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        feats = np.stack([self.featurize(t) for t in texts]) if texts else np.zeros(
            (0, self.n_buckets)
        )
        return _unit_rows(feats @ self.weights)

    def fine_tune(
        self, pairs: Sequence[ContrastivePair], hp: FewShotHyperParams
    ) -> "HashingEmbeddingModel":
        """Gradient descent on (cos(Wa, Wb) - label)^2 over the pairs.

        Keeps the best-margin state seen, including the initial one,
        so the returned model never scores a worse training margin
        than the input model.
        """
        if hp.num_epochs == 0:
            return HashingEmbeddingModel(
                self.n_buckets, self.dimension, self.input_token_limit, self.weights.copy()
            )
        if not pairs:
            raise TrainingDivergedError("no pairs to fine-tune on", hyperparams=hp)

        feats_a = np.stack([self.featurize(p.text_a) for p in pairs])
        feats_b = np.stack([self.featurize(p.text_b) for p in pairs])
        labels = np.array([p.similarity_label for p in pairs], dtype=np.float64)

        weights = self.weights.copy()
        lr = hp.body_learning_rate * _HASHING_LR_SCALE
        best_weights = weights.copy()
        best_margin = _pair_margin(feats_a @ weights, feats_b @ weights, labels)

        rng = rng_for(hp.seed, "finetune")
        n = len(pairs)
        # extreme learning rates overflow float64 on purpose in the
        # divergence tests; the isfinite checks below own that case
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(hp.num_epochs):
                order = rng.permutation(n)
                for start in range(0, n, hp.batch_size):
                    batch = order[start : start + hp.batch_size]
                    grad = np.zeros_like(weights)
                    for k in batch:
                        xa, xb, y = feats_a[k], feats_b[k], labels[k]
                        u = xa @ weights
                        v = xb @ weights
                        nu = np.linalg.norm(u)
                        nv = np.linalg.norm(v)
                        if nu == 0.0 or nv == 0.0:
                            continue
                        cos = float(u @ v) / (nu * nv)
                        err = 2.0 * (cos - y)
                        dcos_du = v / (nu * nv) - cos * u / (nu * nu)
                        dcos_dv = u / (nu * nv) - cos * v / (nv * nv)
                        grad += np.outer(xa, err * dcos_du) + np.outer(xb, err * dcos_dv)
                    weights -= lr * grad / len(batch)
                    if not np.isfinite(weights).all():
                        raise TrainingDivergedError(
                            "non-finite weights during fine-tuning", hyperparams=hp
                        )
                margin = _pair_margin(feats_a @ weights, feats_b @ weights, labels)
                if not np.isfinite(margin):
                    raise TrainingDivergedError(
                        "non-finite training margin", hyperparams=hp
                    )
                if margin > best_margin:
                    best_margin = margin
                    best_weights = weights.copy()

        return HashingEmbeddingModel(
            self.n_buckets, self.dimension, self.input_token_limit, best_weights
        )

    def save(self, directory: str) -> None:
        os.makedirs(directory, exist_ok=True)
        np.savez(
            os.path.join(directory, "provider.npz"),
            weights=self.weights,
            n_buckets=np.array(self.n_buckets),
            dimension=np.array(self.dimension),
            input_token_limit=np.array(self.input_token_limit),
        )

    @classmethod
    def load(cls, directory: str) -> "HashingEmbeddingModel":
        blob = np.load(os.path.join(directory, "provider.npz"))
        return cls(
            n_buckets=int(blob["n_buckets"]),
            dimension=int(blob["dimension"]),
            input_token_limit=int(blob["input_token_limit"]),
            weights=blob["weights"],
        )


class PretrainedEmbeddingModel:
    """sentence-transformers checkpoint behind the provider interface."""

    fine_tunable = True

    def __init__(self, model_id: str = DEFAULT_PRETRAINED_MODEL_ID, device: Optional[str] = None):
        self.model_id = model_id
        self.device = device
        self._model = None

    def _ensure_loaded(self):
        if self._model is not None:
            return self._model
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelWeightsUnavailableError(
                "sentence-transformers is not installed; "
                "install the 'pretrained' extra or use the test provider"
            ) from exc
        try:
            self._model = SentenceTransformer(self.model_id, device=self.device)
        except Exception as exc:  # weights download/load can fail many ways
            raise ModelWeightsUnavailableError(
                f"could not load model {self.model_id!r}: {exc}"
            ) from exc
        return self._model

    @property
    def dimension(self) -> int:
        return int(self._ensure_loaded().get_sentence_embedding_dimension())

    @property
    def input_token_limit(self) -> Optional[int]:
        return int(getattr(self._ensure_loaded(), "max_seq_length", 0)) or None

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        model = self._ensure_loaded()
        if not texts:
            return np.zeros((0, self.dimension))
        out = model.encode(
            list(texts), convert_to_numpy=True, show_progress_bar=False, batch_size=16
        )
        return np.asarray(out, dtype=np.float64)

    def fine_tune(
        self, pairs: Sequence[ContrastivePair], hp: FewShotHyperParams
    ) -> "PretrainedEmbeddingModel":
        if hp.num_epochs == 0:
            return self
        model = self._ensure_loaded()
        try:
            import torch
            from torch.utils.data import DataLoader
            from sentence_transformers import InputExample, losses
        except ImportError as exc:
            raise ModelWeightsUnavailableError(
                "fine-tuning the pretrained provider requires torch"
            ) from exc

        texts = [p.text_a for p in pairs] + [p.text_b for p in pairs]
        labels = np.array([p.similarity_label for p in pairs], dtype=np.float64)
        before_a = self.embed([p.text_a for p in pairs])
        before_b = self.embed([p.text_b for p in pairs])
        margin_before = _pair_margin(before_a, before_b, labels)

        torch.manual_seed(hp.seed)
        examples = [
            InputExample(texts=[p.text_a, p.text_b], label=float(p.similarity_label))
            for p in pairs
        ]
        loader = DataLoader(examples, shuffle=True, batch_size=hp.batch_size)
        loss = losses.CosineSimilarityLoss(model)
        model.fit(
            train_objectives=[(loader, loss)],
            epochs=hp.num_epochs,
            optimizer_params={"lr": hp.body_learning_rate},
            show_progress_bar=False,
        )

        after_a = self.embed([p.text_a for p in pairs])
        after_b = self.embed([p.text_b for p in pairs])
        if not np.isfinite(after_a).all() or not np.isfinite(after_b).all():
            raise TrainingDivergedError(
                "non-finite embeddings after fine-tuning", hyperparams=hp
            )
        margin_after = _pair_margin(after_a, after_b, labels)
        if margin_after < margin_before:
            # keep the contract: never hand back a worse state than the
            # one given. Reload the original weights.
            return PretrainedEmbeddingModel(self.model_id, self.device)
        return self

    def save(self, directory: str) -> None:
        target = os.path.join(directory, "provider_st")
        self._ensure_loaded().save(target)
        with open(os.path.join(directory, "provider_st", "origin.json"), "w") as fh:
            json.dump({"model_id": self.model_id}, fh)

    @classmethod
    def load(cls, directory: str) -> "PretrainedEmbeddingModel":
        target = os.path.join(directory, "provider_st")
        origin_path = os.path.join(target, "origin.json")
        model_id = DEFAULT_PRETRAINED_MODEL_ID
        if os.path.exists(origin_path):
            with open(origin_path) as fh:
                model_id = json.load(fh).get("model_id", model_id)
        provider = cls(model_id=model_id)
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelWeightsUnavailableError(
                "sentence-transformers is not installed"
            ) from exc
        provider._model = SentenceTransformer(target)
        return provider


PROVIDER_KINDS = ("test", "pretrained")


def get_provider(kind: str, **kwargs):
    """Factory for the CLI's --provider flag."""
    if kind == "test":
        return HashingEmbeddingModel(**kwargs)
    if kind == "pretrained":
        return PretrainedEmbeddingModel(**kwargs)
    raise ValueError(f"unknown provider kind {kind!r} (choose from {PROVIDER_KINDS})")


def provider_kind(provider) -> str:
    if isinstance(provider, HashingEmbeddingModel):
        return "test"
    if isinstance(provider, PretrainedEmbeddingModel):
        return "pretrained"
    raise ValueError(f"unregistered provider type {type(provider).__name__}")
