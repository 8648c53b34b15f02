"""Hyperparameter space for few-shot training.

The search space: body learning rate log-uniform over [1e-6, 1e-3],
epochs in {1, 2}, contrastive batch size in {2, 4, 8}, head max_iter
in {50..300 step 50}. Pair multiplier is a fixed convention (20 pairs
per training sample), not searched.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from math import exp, log

from ..seeding import rng_for

BODY_LEARNING_RATE_RANGE = (1e-6, 1e-3)
NUM_EPOCHS_CHOICES = (1, 2)
BATCH_SIZE_CHOICES = (2, 4, 8)
MAX_ITER_CHOICES = (50, 100, 150, 200, 250, 300)
DEFAULT_PAIR_MULTIPLIER = 20


@dataclass(frozen=True)
class FewShotHyperParams:
    """One point in the few-shot training space.

    The constructor accepts out-of-domain values (tests exercise the
    divergence contract with extreme learning rates); validate()
    enforces the search-space domains and is applied to every
    searched candidate.
    """

    body_learning_rate: float = 2e-5
    num_epochs: int = 1
    batch_size: int = 8
    max_iter: int = 100
    pair_multiplier: int = DEFAULT_PAIR_MULTIPLIER
    seed: int = 0

    def validate(self) -> "FewShotHyperParams":
        lo, hi = BODY_LEARNING_RATE_RANGE
        if not (lo <= self.body_learning_rate <= hi):
            raise ValueError(
                f"body_learning_rate {self.body_learning_rate} outside [{lo}, {hi}]"
            )
        if self.num_epochs not in NUM_EPOCHS_CHOICES:
            raise ValueError(f"num_epochs {self.num_epochs} not in {NUM_EPOCHS_CHOICES}")
        if self.batch_size not in BATCH_SIZE_CHOICES:
            raise ValueError(f"batch_size {self.batch_size} not in {BATCH_SIZE_CHOICES}")
        if self.max_iter not in MAX_ITER_CHOICES:
            raise ValueError(f"max_iter {self.max_iter} not in {MAX_ITER_CHOICES}")
        if self.pair_multiplier < 1:
            raise ValueError("pair_multiplier must be a positive integer")
        return self

    def with_seed(self, seed: int) -> "FewShotHyperParams":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FewShotHyperParams":
        return cls(**d)


def random_hyperparams(
    seed: int, *context, pair_multiplier: int = DEFAULT_PAIR_MULTIPLIER
) -> FewShotHyperParams:
    """Draw one valid candidate: learning rate log-uniform, the rest
    uniform over their choice sets. Deterministic in (seed, context)."""
    rng = rng_for(seed, "hp_draw", *context)
    lo, hi = BODY_LEARNING_RATE_RANGE
    lr = exp(rng.uniform(log(lo), log(hi)))
    hp = FewShotHyperParams(
        body_learning_rate=float(lr),
        num_epochs=int(NUM_EPOCHS_CHOICES[rng.integers(len(NUM_EPOCHS_CHOICES))]),
        batch_size=int(BATCH_SIZE_CHOICES[rng.integers(len(BATCH_SIZE_CHOICES))]),
        max_iter=int(MAX_ITER_CHOICES[rng.integers(len(MAX_ITER_CHOICES))]),
        pair_multiplier=pair_multiplier,
        seed=seed,
    )
    return hp.validate()
