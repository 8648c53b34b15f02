"""Random hyperparameter draws for the nested search.

The draw itself lives next to the hyperparameter definitions; this
module gives the harness its own name for it and centralizes the
derivation convention: one draw per (master seed, repeat, trial).
"""

from __future__ import annotations

from ..fewshot.hyperparams import FewShotHyperParams, random_hyperparams
from ..seeding import derive_seed


def random_hp(
    master_seed: int, repeat: int, trial: int, pair_multiplier: int = 20
) -> FewShotHyperParams:
    """The trial's candidate, with its training seed pre-derived.

    Deterministic in (master_seed, repeat, trial) and independent of
    every other trial, so repeats can run in any order or in parallel.
    """
    hp = random_hyperparams(master_seed, repeat, trial, pair_multiplier=pair_multiplier)
    return hp.with_seed(derive_seed(master_seed, "trial", repeat, trial))
