"""Contrastive pair generation from labeled shots.

Fine-tuning pulls same-class log embeddings together and pushes
cross-class ones apart. Pairs are sampled with replacement across
pairs, never pairing a text with itself; positive (same-class) and
negative (cross-class) counts are always equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

from ..errors import PairGenerationError
from ..records import LABEL_INTERMITTENT, LABEL_REGULAR
from ..seeding import rng_for


@dataclass(frozen=True)
class ContrastivePair:
    text_a: str
    text_b: str
    similarity_label: int  # 1 = same class, 0 = different class


def generate_pairs(
    texts: Sequence[str],
    labels: Sequence[int],
    multiplier: int,
    seed: int,
) -> List[ContrastivePair]:
    """Build multiplier * len(texts) pairs, half positive half negative.

    Requires at least two samples in each class (a positive pair needs
    two distinct same-class texts).
    """
    if len(texts) != len(labels):
        raise PairGenerationError("texts and labels length mismatch")
    if multiplier < 1:
        raise PairGenerationError("multiplier must be a positive integer")
    by_class = {LABEL_REGULAR: [], LABEL_INTERMITTENT: []}
    for i, label in enumerate(labels):
        if label not in by_class:
            raise PairGenerationError(f"label {label!r} is not binary")
        by_class[label].append(i)
    starving = [c for c, idx in by_class.items() if len(idx) < 2]
    if starving:
        raise PairGenerationError(
            f"class(es) {starving} have fewer than 2 samples; positive pairs impossible"
        )

    rng = rng_for(seed, "pairs")
    total = multiplier * len(texts)
    n_each = total // 2
    pairs: List[ContrastivePair] = []
    classes = (LABEL_REGULAR, LABEL_INTERMITTENT)
    for _ in range(n_each):
        cls = classes[int(rng.integers(2))]
        pool = by_class[cls]
        a, b = rng.choice(len(pool), size=2, replace=False)
        pairs.append(ContrastivePair(texts[pool[a]], texts[pool[b]], 1))
    for _ in range(n_each):
        i = by_class[LABEL_INTERMITTENT][int(rng.integers(len(by_class[LABEL_INTERMITTENT])))]
        j = by_class[LABEL_REGULAR][int(rng.integers(len(by_class[LABEL_REGULAR])))]
        pairs.append(ContrastivePair(texts[i], texts[j], 0))
    return pairs
