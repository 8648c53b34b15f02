"""Deterministic seed derivation for parallel experiment streams.

Every repeat/trial of the evaluation harness gets its own seed derived
from the master seed plus a tag and indices, so work units can run in
any order or in parallel and still produce identical results. Python's
builtin hash() is salted per process and must not be used here.
"""

from __future__ import annotations

import hashlib

import numpy as np

_SEED_BYTES = 8


def derive_seed(master_seed: int, *parts: int | str) -> int:
    """Return a stable 64-bit seed for (master_seed, *parts)."""
    token = repr((int(master_seed),) + tuple(parts)).encode("utf-8")
    digest = hashlib.blake2b(token, digest_size=_SEED_BYTES).digest()
    return int.from_bytes(digest, "big")


def rng_for(master_seed: int, *parts: int | str) -> np.random.Generator:
    """Numpy Generator seeded by :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(master_seed, *parts))
