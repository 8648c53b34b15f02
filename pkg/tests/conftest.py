"""Shared fixtures.

Corpora are session-scoped: generation is deterministic, so sharing
them across test modules only saves time, never isolation.
"""

import pytest

from brownjobs.datagen import make_corpus


@pytest.fixture(scope="session")
def corpus200():
    """Balanced 200-sample synthetic corpus over all log families."""
    return make_corpus(200, seed=71)


@pytest.fixture(scope="session")
def corpus80():
    """Small corpus for harness tests that iterate many times."""
    return make_corpus(80, seed=23)


@pytest.fixture(scope="session")
def two_family_corpus():
    """One intermittent and one regular template family only."""
    return make_corpus(120, seed=31, families=["net_flake", "compile_error"])
