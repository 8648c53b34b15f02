"""Binary classification metrics with explicit degenerate handling.

The headline score everywhere is the intermittent-class F1. Zero
denominators (no predicted positives, say) report the metric as 0 and
flag it by name, so degenerate repeats stay aggregable instead of
crashing a 100-repeat run.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

from ..errors import DataError
from ..records import LABEL_INTERMITTENT, LABEL_REGULAR


def _ratio(numerator: int, denominator: int, name: str, undefined: List[str]) -> float:
    if denominator == 0:
        undefined.append(name)
        return 0.0
    return numerator / denominator


def binary_class_metrics(predictions: Sequence[int], truth: Sequence[int]) -> Dict:
    """Per-class precision/recall/F1 and confusion counts.

    Truth must contain both classes (a single-class test set cannot
    score a detector); predictions may be anything binary.
    """
    pred = [int(p) for p in predictions]
    true = [int(t) for t in truth]
    if len(pred) != len(true):
        raise DataError(f"predictions ({len(pred)}) and truth ({len(true)}) differ in length")
    bad = {v for v in pred + true if v not in (LABEL_REGULAR, LABEL_INTERMITTENT)}
    if bad:
        raise DataError(f"labels must be binary 0/1, got {sorted(bad)}")
    if len(set(true)) < 2:
        raise DataError("truth contains a single class; metrics are meaningless")

    tp = sum(1 for p, t in zip(pred, true) if p == 1 and t == 1)
    fp = sum(1 for p, t in zip(pred, true) if p == 1 and t == 0)
    fn = sum(1 for p, t in zip(pred, true) if p == 0 and t == 1)
    tn = sum(1 for p, t in zip(pred, true) if p == 0 and t == 0)

    undefined: List[str] = []
    precision_int = _ratio(tp, tp + fp, "precision_intermittent", undefined)
    recall_int = _ratio(tp, tp + fn, "recall_intermittent", undefined)
    precision_reg = _ratio(tn, tn + fn, "precision_regular", undefined)
    recall_reg = _ratio(tn, tn + fp, "recall_regular", undefined)

    def f1(p: float, r: float, name: str) -> float:
        if p + r == 0.0:
            undefined.append(name)
            return 0.0
        return 2.0 * p * r / (p + r)

    f1_int = f1(precision_int, recall_int, "f1_intermittent")
    f1_reg = f1(precision_reg, recall_reg, "f1_regular")

    return {
        "f1": f1_int,  # headline: intermittent-class F1
        "f1_intermittent": f1_int,
        "f1_regular": f1_reg,
        "precision_intermittent": precision_int,
        "recall_intermittent": recall_int,
        "precision_regular": precision_reg,
        "recall_regular": recall_reg,
        "confusion": {"tp": tp, "fp": fp, "fn": fn, "tn": tn},
        "undefined": undefined,
    }
