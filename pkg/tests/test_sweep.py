"""Shot-count sweep tests."""

import json

import pytest

from brownjobs.errors import DataError
from brownjobs.evaluation.mccv import TRAIN_ON_SHOTS, FewShotTrainer, MccvConfig
from brownjobs.evaluation.sweep import ShotsSweepResult, shots_sweep

from support import sample


class OracleTrainer:
    """Reads the label straight out of the text, so F1 is always 1.0."""

    name = "oracle"
    uses_hp_search = False
    training_scope = TRAIN_ON_SHOTS

    def fit(self, texts, labels, metrics, hp, seed):
        return None

    def predict(self, model, texts, metrics):
        return [1 if "class1" in t else 0 for t in texts]


def labeled_texts(n=80):
    return [
        sample(i, auto_label=i % 2, processed_log=f"class{i % 2} tok{i}")
        for i in range(n)
    ]


class TestSweepStructure:
    def test_reference_is_largest_count_and_excluded_from_p_values(self):
        result = shots_sweep(
            labeled_texts(),
            MccvConfig(repeats=3, trials=1),
            OracleTrainer(),
            shot_counts=[4, 2, 6],
        )
        assert result.reference_n == 6
        assert sorted(result.per_n) == [2, 4, 6]
        assert sorted(result.p_values) == [2, 4]

    def test_identical_distributions_give_p_one(self):
        result = shots_sweep(
            labeled_texts(),
            MccvConfig(repeats=4, trials=1),
            OracleTrainer(),
            shot_counts=[2, 4, 8],
        )
        for n, report in result.per_n.items():
            assert report.mean_f1 == 1.0, n
            assert report.config["shots"] == n
        assert result.p_values == {2: 1.0, 4: 1.0}

    def test_duplicate_counts_collapse(self):
        result = shots_sweep(
            labeled_texts(),
            MccvConfig(repeats=2, trials=1),
            OracleTrainer(),
            shot_counts=[3, 3, 5],
        )
        assert sorted(result.per_n) == [3, 5]

    def test_empty_counts_rejected(self):
        with pytest.raises(DataError, match="at least one"):
            shots_sweep(
                labeled_texts(), MccvConfig(repeats=2), OracleTrainer(), shot_counts=[]
            )

    def test_nonpositive_counts_rejected(self):
        with pytest.raises(DataError, match=">= 1"):
            shots_sweep(
                labeled_texts(),
                MccvConfig(repeats=2),
                OracleTrainer(),
                shot_counts=[0, 4],
            )

    def test_json_keys_are_strings_and_roundtrip(self):
        result = shots_sweep(
            labeled_texts(),
            MccvConfig(repeats=3, trials=1),
            OracleTrainer(),
            shot_counts=[2, 5],
        )
        text = result.to_json()
        raw = json.loads(text)
        assert set(raw["per_n"]) == {"2", "5"}
        assert set(raw["p_values"]) == {"2"}
        back = ShotsSweepResult.from_json(text)
        assert back.to_json() == text
        assert back.per_n[2].f1_values == result.per_n[2].f1_values


class TestSweepTrend:
    def test_more_shots_help_on_real_trainer(self, corpus200):
        result = shots_sweep(
            corpus200,
            MccvConfig(repeats=4, trials=1, master_seed=2),
            FewShotTrainer(),
            shot_counts=[2, 6, 12],
        )
        m = {n: r.mean_f1 for n, r in result.per_n.items()}
        assert m[12] > m[2]
        assert m[6] >= m[2] - 0.02
        assert m[12] >= 0.9
        assert set(result.p_values) == {2, 6}
        for p in result.p_values.values():
            assert 0.0 <= p <= 1.0
