"""Evaluation harness: metrics, statistics, splits, MCCV, reports.

Only the dependency-light leaves are re-exported here; the harness
modules (mccv, sweep, cross, report) import trainers and are loaded
as explicit submodules to keep import edges one-directional.
"""

from .hpsearch import random_hp
from .metrics import binary_class_metrics
from .ranksum import rank_sum_test
from .splits import DatasetSplits, SplitRatios, sample_shots, stratified_split

__all__ = [
    "binary_class_metrics",
    "rank_sum_test",
    "random_hp",
    "DatasetSplits",
    "SplitRatios",
    "stratified_split",
    "sample_shots",
]
