"""Per-class precision/recall/F1 scoring."""

import numpy as np
import pytest
from sklearn.metrics import precision_recall_fscore_support

from brownjobs.errors import DataError
from brownjobs.evaluation.metrics import binary_class_metrics


def confusion_by_hand(pred, truth):
    tp = fp = fn = tn = 0
    for p, t in zip(pred, truth):
        if p == 1 and t == 1:
            tp += 1
        elif p == 1 and t == 0:
            fp += 1
        elif p == 0 and t == 1:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


class TestExamples:
    def test_perfect_prediction(self):
        out = binary_class_metrics([1, 0, 1, 0], [1, 0, 1, 0])
        assert out["f1"] == 1.0
        assert out["precision_intermittent"] == 1.0
        assert out["recall_regular"] == 1.0
        assert out["undefined"] == []

    def test_headline_is_intermittent_f1(self):
        out = binary_class_metrics([1, 1, 0, 0], [1, 0, 1, 0])
        assert out["f1"] == out["f1_intermittent"]

    def test_precision_point_eight_recall_point_six(self):
        # 20 true positives in truth; 15 predicted positive, 12 correct.
        truth = [1] * 20 + [0] * 20
        pred = [1] * 12 + [0] * 8 + [1] * 3 + [0] * 17
        out = binary_class_metrics(pred, truth)
        assert out["precision_intermittent"] == pytest.approx(0.8)
        assert out["recall_intermittent"] == pytest.approx(0.6)
        assert out["f1"] == pytest.approx(2 * 0.8 * 0.6 / 1.4)

    def test_constant_intermittent_on_twenty_percent(self):
        truth = [1, 1] + [0] * 8
        out = binary_class_metrics([1] * 10, truth)
        assert out["precision_intermittent"] == pytest.approx(0.2)
        assert out["recall_intermittent"] == 1.0
        assert out["f1"] == pytest.approx(1 / 3)


class TestZeroDenominators:
    def test_no_predicted_positives(self):
        out = binary_class_metrics([0, 0, 0, 0], [1, 0, 1, 0])
        assert out["precision_intermittent"] == 0.0
        assert "precision_intermittent" in out["undefined"]
        assert "f1_intermittent" in out["undefined"]
        assert out["f1"] == 0.0

    def test_no_predicted_regulars(self):
        out = binary_class_metrics([1, 1, 1, 1], [1, 0, 1, 0])
        assert "precision_regular" in out["undefined"]


class TestValidation:
    def test_length_mismatch(self):
        with pytest.raises(DataError):
            binary_class_metrics([1, 0], [1])

    def test_non_binary_label(self):
        with pytest.raises(DataError):
            binary_class_metrics([1, 2], [1, 0])

    def test_single_class_truth(self):
        with pytest.raises(DataError):
            binary_class_metrics([1, 0], [1, 1])


class TestRandomVectorOracle:
    def test_thousand_random_vectors(self):
        # Smaller sibling of the acceptance sweep: every score must
        # match a from-scratch confusion recomputation exactly.
        rng = np.random.default_rng(88)
        for trial in range(200):
            n = int(rng.integers(2, 40))
            truth = rng.integers(0, 2, size=n)
            if len(set(truth.tolist())) < 2:
                continue
            pred = rng.integers(0, 2, size=n)
            out = binary_class_metrics(pred.tolist(), truth.tolist())
            tp, fp, fn, tn = confusion_by_hand(pred, truth)
            assert out["confusion"] == {"tp": tp, "fp": fp, "fn": fn, "tn": tn}
            expect_p = tp / (tp + fp) if tp + fp else 0.0
            expect_r = tp / (tp + fn) if tp + fn else 0.0
            assert out["precision_intermittent"] == expect_p
            assert out["recall_intermittent"] == expect_r

    def test_agrees_with_sklearn(self):
        rng = np.random.default_rng(99)
        for trial in range(50):
            n = int(rng.integers(4, 60))
            truth = rng.integers(0, 2, size=n)
            if len(set(truth.tolist())) < 2:
                continue
            pred = rng.integers(0, 2, size=n)
            out = binary_class_metrics(pred.tolist(), truth.tolist())
            p, r, f1, _ = precision_recall_fscore_support(
                truth, pred, labels=[1, 0], zero_division=0.0
            )
            assert out["precision_intermittent"] == pytest.approx(p[0])
            assert out["recall_intermittent"] == pytest.approx(r[0])
            assert out["f1_intermittent"] == pytest.approx(f1[0])
            assert out["f1_regular"] == pytest.approx(f1[1])
