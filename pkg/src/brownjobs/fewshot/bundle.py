"""Persistence of a trained few-shot pipeline.

A bundle is a directory:

    meta.json   schema version, provider kind/id/dimension,
                pre-processing config, training metadata
    head.json   logistic head weights, bias, width
    provider.npz or provider_st/   provider state blob

Loading re-checks the head-width-equals-embedding-dimension invariant
and yields bit-identical predictions: the head stores its own weights
and applies its own sigmoid, independent of library versions.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..errors import (
    BundleInvariantError,
    BundleVersionError,
    CorruptBundleError,
    DataError,
)
from ..logprep import PrepConfig, preprocess
from .classifier import FewShotLogClassifier, LogisticHead, _check_raw_logs
from .providers import (
    HashingEmbeddingModel,
    PretrainedEmbeddingModel,
    provider_kind,
    truncate_to_limit,
)

SCHEMA_VERSION = 1

_PROVIDER_LOADERS = {
    "test": HashingEmbeddingModel,
    "pretrained": PretrainedEmbeddingModel,
}


@dataclass
class ModelBundle:
    """A trained pipeline plus how it was trained."""

    prep_config: PrepConfig
    provider: object
    head: LogisticHead
    training_metadata: dict = field(default_factory=dict)

    def _prepare(self, raw_log: str) -> str:
        limit = getattr(self.provider, "input_token_limit", None)
        return truncate_to_limit(preprocess(raw_log, self.prep_config).text, limit)

    def predict_many(self, raw_logs: Sequence[str]) -> List[dict]:
        """Predictions in input order: {label, probability} per log."""
        texts = _check_raw_logs(raw_logs)
        embeddings = self.provider.embed([self._prepare(t) for t in texts])
        probs = self.head.predict_proba(embeddings)
        return [
            {"label": int(p >= 0.5), "probability": float(p)} for p in probs
        ]

    def predict_one(self, raw_log: str) -> dict:
        return self.predict_many([raw_log])[0]

    @classmethod
    def from_classifier(cls, clf: FewShotLogClassifier, **metadata) -> "ModelBundle":
        clf._check_fitted()
        meta = {
            "shots_per_class": clf.shots_per_class_,
            "hyperparams": clf._hp().to_dict(),
        }
        meta.update(metadata)
        return cls(
            prep_config=clf.prep_config or PrepConfig(),
            provider=clf.provider_,
            head=clf.head_,
            training_metadata=meta,
        )


def save_bundle(bundle: ModelBundle, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    kind = provider_kind(bundle.provider)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "provider_kind": kind,
        "provider_model_id": bundle.provider.model_id,
        "provider_dimension": int(bundle.provider.dimension),
        "prep_config": bundle.prep_config.to_dict(),
        "training_metadata": bundle.training_metadata,
    }
    with open(os.path.join(directory, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    with open(os.path.join(directory, "head.json"), "w", encoding="utf-8") as fh:
        json.dump(bundle.head.to_dict(), fh)
    bundle.provider.save(directory)


def load_bundle(directory: str) -> ModelBundle:
    meta_path = os.path.join(directory, "meta.json")
    head_path = os.path.join(directory, "head.json")
    for path in (meta_path, head_path):
        if not os.path.exists(path):
            raise CorruptBundleError(f"bundle is missing {os.path.basename(path)}")
    try:
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
        with open(head_path, encoding="utf-8") as fh:
            head_dict = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptBundleError(f"unreadable bundle file: {exc}") from exc

    version = meta.get("schema_version")
    if version != SCHEMA_VERSION:
        raise BundleVersionError(
            f"bundle schema_version {version!r} != supported {SCHEMA_VERSION}"
        )
    kind = meta.get("provider_kind")
    loader = _PROVIDER_LOADERS.get(kind)
    if loader is None:
        raise CorruptBundleError(f"unknown provider kind {kind!r}")
    try:
        provider = loader.load(directory)
        head = LogisticHead.from_dict(head_dict)
    except (OSError, ValueError, KeyError, DataError) as exc:
        raise CorruptBundleError(f"bundle state unreadable: {exc}") from exc

    if head.width != int(provider.dimension):
        raise BundleInvariantError(
            f"head width {head.width} != provider dimension {provider.dimension}"
        )
    return ModelBundle(
        prep_config=PrepConfig.from_dict(meta.get("prep_config", {})),
        provider=provider,
        head=head,
        training_metadata=meta.get("training_metadata", {}),
    )
