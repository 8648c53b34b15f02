"""Top-k feature selection by chi-squared score.

For non-negative count-like features and binary labels, the score per
column is the chi-squared statistic between the observed per-class
feature mass and the mass expected from class frequencies alone.
Columns with zero total mass carry no information and are never
selected. Ties break toward the lower column index so selection is
fully deterministic.
"""

from __future__ import annotations

from typing import List, Sequence, Union

import numpy as np
import scipy.sparse as sp

from ..errors import DataError

Matrix = Union[np.ndarray, sp.spmatrix]


def chi2_scores(matrix: Matrix, labels: Sequence[int]) -> np.ndarray:
    """Per-column chi-squared statistic; NaN for zero-mass columns."""
    y = np.asarray(labels, dtype=np.int64)
    if set(np.unique(y).tolist()) - {0, 1}:
        raise DataError("labels must be binary 0/1")
    X = matrix.tocsr() if sp.issparse(matrix) else np.asarray(matrix, dtype=np.float64)
    n = y.shape[0]
    if (X.shape[0] if hasattr(X, "shape") else 0) != n:
        raise DataError("matrix rows and labels length mismatch")
    if sp.issparse(X):
        if X.data.size and X.data.min() < 0:
            raise DataError("chi-squared needs non-negative features")
        observed_1 = np.asarray(X[y == 1].sum(axis=0)).ravel()
        totals = np.asarray(X.sum(axis=0)).ravel()
    else:
        if X.size and X.min() < 0:
            raise DataError("chi-squared needs non-negative features")
        observed_1 = X[y == 1].sum(axis=0)
        totals = X.sum(axis=0)
    observed_0 = totals - observed_1
    p1 = float((y == 1).sum()) / n
    p0 = 1.0 - p1
    expected_1 = totals * p1
    expected_0 = totals * p0

    with np.errstate(divide="ignore", invalid="ignore"):
        scores = (observed_1 - expected_1) ** 2 / expected_1 + (
            observed_0 - expected_0
        ) ** 2 / expected_0
    scores[totals == 0] = np.nan
    return scores


def select_k_best(matrix: Matrix, labels: Sequence[int], k: int) -> List[int]:
    """Indices of the k highest-scoring columns, ascending.

    NaN-scored (zero-mass) columns rank below every real score; ties
    break toward the lower index.
    """
    if k <= 0:
        raise DataError(f"k must be positive, got {k}")
    n_cols = matrix.shape[1]
    if k > n_cols:
        raise DataError(f"k={k} exceeds the {n_cols} available columns")
    scores = chi2_scores(matrix, labels)
    # order: score descending, NaN last, index ascending on ties
    keyed = [
        ((-scores[j] if np.isfinite(scores[j]) else np.inf), j) for j in range(n_cols)
    ]
    keyed.sort()
    return sorted(j for _, j in keyed[:k])
