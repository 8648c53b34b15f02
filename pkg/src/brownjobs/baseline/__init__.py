"""TF-IDF + gradient-boosting comparator pipeline.

The strongest prior approach this package measures against: TF-IDF
vectors of processed logs, chi-squared top-k selection, one boosted
model over the text features, a second over job-history metrics plus
the first model's per-feature attributions, combined by weighted vote.
"""

from .attribution import tree_path_contributions
from .jobmetrics import JobMetrics, compute_all_metrics, compute_job_metrics
from .selection import chi2_scores, select_k_best
from .tfidf import TfidfModel
from .voting import (
    BaselineConfig,
    TfidfVoteClassifier,
    load_baseline,
    save_baseline,
    train_sota,
)

__all__ = [
    "TfidfModel",
    "chi2_scores",
    "select_k_best",
    "JobMetrics",
    "compute_all_metrics",
    "compute_job_metrics",
    "tree_path_contributions",
    "BaselineConfig",
    "TfidfVoteClassifier",
    "train_sota",
    "save_baseline",
    "load_baseline",
]
