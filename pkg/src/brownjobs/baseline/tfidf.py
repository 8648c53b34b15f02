"""TF-IDF features over processed logs.

Tokens are whitespace-delimited and case-preserving (placeholder
tokens like <URL> must survive intact). Term frequency is the raw
count; idf = ln((1 + n_docs) / (1 + df)) + 1; rows are L2-normalized.
An empty document maps to the zero vector, which is valid.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.feature_extraction.text import TfidfVectorizer

from ..errors import DataError


class TfidfModel:
    """Fitted vocabulary + idf weights with sparse transform."""

    def __init__(self, vectorizer: TfidfVectorizer, k_selected: Optional[List[int]] = None):
        self._vectorizer = vectorizer
        self.k_selected = k_selected

    @property
    def vocabulary(self) -> Dict[str, int]:
        return {t: int(i) for t, i in self._vectorizer.vocabulary_.items()}

    @property
    def idf(self) -> np.ndarray:
        return self._vectorizer.idf_

    @property
    def n_features(self) -> int:
        return len(self._vectorizer.vocabulary_)

    @classmethod
    def fit(cls, processed_logs: Sequence[str]) -> "TfidfModel":
        docs = list(processed_logs)
        if len(docs) < 2:
            raise DataError("TF-IDF fit needs at least 2 documents")
        vectorizer = TfidfVectorizer(
            analyzer=str.split,  # whitespace tokens, no case folding
            lowercase=False,
            norm="l2",
            use_idf=True,
            smooth_idf=True,
            sublinear_tf=False,
        )
        try:
            vectorizer.fit(docs)
        except ValueError as exc:
            raise DataError(f"TF-IDF fit failed: {exc}") from exc
        return cls(vectorizer)

    def transform(self, processed_logs: Sequence[str]) -> sp.csr_matrix:
        """Sparse TF-IDF rows; unseen tokens contribute nothing."""
        return self._vectorizer.transform(list(processed_logs))

    def to_dict(self) -> dict:
        return {
            "vocabulary": self.vocabulary,
            "idf": [float(v) for v in self.idf],
            "k_selected": self.k_selected,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TfidfModel":
        vocab = {t: int(i) for t, i in d["vocabulary"].items()}
        vectorizer = TfidfVectorizer(
            analyzer=str.split,
            lowercase=False,
            norm="l2",
            use_idf=True,
            smooth_idf=True,
            sublinear_tf=False,
            vocabulary=vocab,
        )
        # rebuild the fitted state without re-reading a corpus
        idf = np.asarray(d["idf"], dtype=np.float64)
        if len(idf) != len(vocab):
            raise DataError("idf length does not match vocabulary size")
        vectorizer.vocabulary_ = vocab
        vectorizer.idf_ = idf
        return cls(vectorizer, k_selected=d.get("k_selected"))
