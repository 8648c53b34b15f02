"""Stratified splitting and shot sampling for the MCCV harness.

One dataset is cut into learn / validation / test at 25/25/50 by
default. Rounding for odd sizes: the learn split takes the ceiling,
validation the floor, test the remainder. Class quotas round to
nearest with ties going up for the intermittent class, keeping every
split's class ratio within one sample of the dataset's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, floor
from typing import List, Optional, Sequence

from ..errors import ShotCountError, StarvingSplitError
from ..records import LABEL_INTERMITTENT, LABEL_REGULAR
from ..seeding import rng_for


@dataclass(frozen=True)
class SplitRatios:
    learn: float = 0.25
    validation: float = 0.25
    test: float = 0.50

    def __post_init__(self):
        total = self.learn + self.validation + self.test
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {total}")
        if min(self.learn, self.validation, self.test) <= 0.0:
            raise ValueError("every split ratio must be positive")

    def to_dict(self) -> dict:
        return {"learn": self.learn, "validation": self.validation, "test": self.test}


@dataclass
class DatasetSplits:
    """Disjoint index sets covering the dataset, plus sampled shots."""

    learn_idx: List[int]
    val_idx: List[int]
    test_idx: List[int]
    shots_idx: Optional[List[int]] = None


def _round_half_up(value: float) -> int:
    return floor(value + 0.5)


def stratified_split(
    labels: Sequence[int], ratios: SplitRatios, seed: int
) -> DatasetSplits:
    """Shuffle each class once, then deal indices into L/V/T by quota."""
    labels = [int(v) for v in labels]
    n = len(labels)
    int_pool = [i for i, v in enumerate(labels) if v == LABEL_INTERMITTENT]
    reg_pool = [i for i, v in enumerate(labels) if v == LABEL_REGULAR]
    if not int_pool or not reg_pool:
        raise StarvingSplitError(
            "dataset", "both classes must be present to stratify"
        )

    size_learn = ceil(ratios.learn * n)
    size_val = floor(ratios.validation * n)
    size_test = n - size_learn - size_val

    p_int = len(int_pool) / n
    int_learn = _round_half_up(size_learn * p_int)
    int_val = _round_half_up(size_val * p_int)
    int_test = len(int_pool) - int_learn - int_val

    quotas = {
        "learn": (int_learn, size_learn - int_learn),
        "validation": (int_val, size_val - int_val),
        "test": (int_test, size_test - int_test),
    }
    for name, (n_i, n_r) in quotas.items():
        if n_i < 1 or n_r < 1:
            raise StarvingSplitError(
                name,
                f"split {name!r} starves: quota intermittent={n_i}, "
                f"regular={n_r}; every split needs both classes",
            )

    rng = rng_for(seed, "stratified_split")
    int_shuffled = [int_pool[i] for i in rng.permutation(len(int_pool))]
    reg_shuffled = [reg_pool[i] for i in rng.permutation(len(reg_pool))]

    def deal(pool: List[int], counts: List[int]) -> List[List[int]]:
        out, start = [], 0
        for c in counts:
            out.append(pool[start : start + c])
            start += c
        return out

    int_parts = deal(int_shuffled, [int_learn, int_val, int_test])
    reg_parts = deal(
        reg_shuffled,
        [size_learn - int_learn, size_val - int_val, size_test - int_test],
    )
    return DatasetSplits(
        learn_idx=sorted(int_parts[0] + reg_parts[0]),
        val_idx=sorted(int_parts[1] + reg_parts[1]),
        test_idx=sorted(int_parts[2] + reg_parts[2]),
    )


def sample_shots(
    labels: Sequence[int], learn_idx: Sequence[int], n_shots: int, seed: int
) -> List[int]:
    """Exactly n_shots per class, drawn uniformly from the learn split."""
    if n_shots < 1:
        raise ShotCountError("shot count must be at least 1")
    rng = rng_for(seed, "shots")
    picked: List[int] = []
    for cls in (LABEL_INTERMITTENT, LABEL_REGULAR):
        pool = [i for i in learn_idx if labels[i] == cls]
        if len(pool) < n_shots:
            raise ShotCountError(
                f"class {cls} has {len(pool)} learn samples, fewer than N={n_shots}"
            )
        idx = rng.choice(len(pool), size=n_shots, replace=False)
        picked.extend(pool[i] for i in sorted(idx))
    return sorted(picked)
