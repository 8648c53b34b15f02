"""History-derived numeric features for the comparator's second model.

Both features fall out of one pass over the project's jobs in
chronological (created_at, job_id) order:

- prior_reruns: how many earlier runs of the same (name, commit sha)
  exist. Reruns of flaky jobs inflate this.
- commits_since_last_intermittent: distinct commit shas seen strictly
  between the project's previous automatically-intermittent failure
  and this job. When no intermittent failure precedes, the count is
  every distinct commit seen so far (the maximal sentinel consistent
  with "commits since").
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from ..errors import DataError
from ..records import LABEL_INTERMITTENT, JobRecord

METRIC_NAMES = ("prior_reruns", "commits_since_last_intermittent")


@dataclass(frozen=True)
class JobMetrics:
    prior_reruns: int
    commits_since_last_intermittent: int

    def __post_init__(self):
        if self.prior_reruns < 0 or self.commits_since_last_intermittent < 0:
            raise DataError("job metrics must be non-negative")

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.prior_reruns, self.commits_since_last_intermittent], dtype=np.float64
        )

    def to_dict(self) -> dict:
        return {
            "prior_reruns": self.prior_reruns,
            "commits_since_last_intermittent": self.commits_since_last_intermittent,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "JobMetrics":
        return cls(
            prior_reruns=int(d["prior_reruns"]),
            commits_since_last_intermittent=int(d["commits_since_last_intermittent"]),
        )


def compute_all_metrics(
    jobs: Iterable[JobRecord], auto_labels: Mapping[int, int]
) -> Dict[int, JobMetrics]:
    """Metrics for every job, keyed by job id.

    auto_labels carries the rerun-heuristic label for failed jobs;
    jobs absent from it never reset the commit counter.
    """
    ordered = sorted(jobs, key=lambda j: (j.created_at, j.job_id))
    run_counts: Dict[Tuple[str, str], int] = {}
    commits_since: Set[str] = set()
    out: Dict[int, JobMetrics] = {}
    for job in ordered:
        key = (job.name, job.commit_sha)
        prior = run_counts.get(key, 0)
        out[job.job_id] = JobMetrics(
            prior_reruns=prior,
            commits_since_last_intermittent=len(commits_since),
        )
        run_counts[key] = prior + 1
        is_intermittent_failure = (
            job.status == "failed"
            and auto_labels.get(job.job_id) == LABEL_INTERMITTENT
        )
        if is_intermittent_failure:
            commits_since.clear()
        else:
            commits_since.add(job.commit_sha)
    return out


def compute_job_metrics(
    jobs: Iterable[JobRecord], auto_labels: Mapping[int, int], job_id: int
) -> JobMetrics:
    """Metrics for one job; the job must exist in the store."""
    table = compute_all_metrics(jobs, auto_labels)
    if job_id not in table:
        raise DataError(f"job {job_id} is not in the store")
    return table[job_id]
