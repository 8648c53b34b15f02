"""Contrastive pair generation for fine-tuning."""

import pytest
from hypothesis import given, settings, strategies as st

from brownjobs.errors import PairGenerationError
from brownjobs.fewshot.pairs import generate_pairs


def shots(n_int, n_reg):
    texts = [f"intermittent shot {i}" for i in range(n_int)] + [
        f"regular shot {i}" for i in range(n_reg)
    ]
    labels = [1] * n_int + [0] * n_reg
    return texts, labels


def split_by_label(pairs):
    same = [p for p in pairs if p.similarity_label == 1]
    diff = [p for p in pairs if p.similarity_label == 0]
    return same, diff


class TestCounts:
    def test_two_per_class_multiplier_one(self):
        texts, labels = shots(2, 2)
        pairs = generate_pairs(texts, labels, multiplier=1, seed=0)
        same, diff = split_by_label(pairs)
        assert len(pairs) == 4
        assert len(same) == 2
        assert len(diff) == 2

    def test_twelve_shot_default_setting(self):
        texts, labels = shots(12, 12)
        pairs = generate_pairs(texts, labels, multiplier=20, seed=0)
        same, diff = split_by_label(pairs)
        assert len(pairs) == 480
        assert len(same) == 240
        assert len(diff) == 240

    def test_single_member_class_cannot_pair(self):
        texts, labels = shots(1, 5)
        with pytest.raises(PairGenerationError):
            generate_pairs(texts, labels, multiplier=1, seed=0)

    def test_bad_multiplier(self):
        texts, labels = shots(2, 2)
        with pytest.raises(PairGenerationError):
            generate_pairs(texts, labels, multiplier=0, seed=0)

    def test_length_mismatch(self):
        with pytest.raises(PairGenerationError):
            generate_pairs(["a"], [1, 0], multiplier=1, seed=0)

    def test_non_binary_label(self):
        with pytest.raises(PairGenerationError):
            generate_pairs(["a", "b"], [1, 2], multiplier=1, seed=0)


class TestContent:
    def test_similar_pairs_share_class_dissimilar_straddle(self):
        texts, labels = shots(4, 4)
        pairs = generate_pairs(texts, labels, multiplier=6, seed=3)
        for p in pairs:
            a_int = p.text_a.startswith("intermittent")
            b_int = p.text_b.startswith("intermittent")
            if p.similarity_label == 1:
                assert a_int == b_int
            else:
                assert a_int != b_int

    def test_no_self_pairs(self):
        texts, labels = shots(3, 3)
        pairs = generate_pairs(texts, labels, multiplier=10, seed=1)
        for p in pairs:
            if p.similarity_label == 1:
                assert p.text_a != p.text_b

    def test_deterministic(self):
        texts, labels = shots(5, 5)
        a = generate_pairs(texts, labels, multiplier=4, seed=9)
        b = generate_pairs(texts, labels, multiplier=4, seed=9)
        assert a == b

    def test_seed_changes_selection(self):
        texts, labels = shots(6, 6)
        a = generate_pairs(texts, labels, multiplier=4, seed=9)
        b = generate_pairs(texts, labels, multiplier=4, seed=10)
        assert a != b

    @given(
        n_int=st.integers(2, 8),
        n_reg=st.integers(2, 8),
        multiplier=st.integers(1, 6),
        seed=st.integers(0, 1000),
    )
    @settings(max_examples=80, deadline=None)
    def test_always_balanced(self, n_int, n_reg, multiplier, seed):
        texts, labels = shots(n_int, n_reg)
        pairs = generate_pairs(texts, labels, multiplier=multiplier, seed=seed)
        same, diff = split_by_label(pairs)
        total = multiplier * (n_int + n_reg)
        assert len(same) == len(diff)
        # Odd totals lose the unpairable remainder.
        assert len(pairs) == total - (total % 2)
