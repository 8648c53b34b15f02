"""Builders and oracles shared by test modules."""

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from brownjobs.records import JobRecord, LabeledSample


def job(
    job_id: int,
    name: str = "build",
    commit_sha: str = "c1",
    status: str = "failed",
    project_id: str = "proj",
    created_at: str = "2024-01-01T00:00:00+00:00",
    finished_at: str = "2024-01-01T00:10:00+00:00",
    log_path: Optional[str] = None,
    ref: str = "main",
    log_excluded: bool = False,
    log_decode_anomaly: bool = False,
) -> JobRecord:
    if log_path is None and status == "failed" and not log_excluded:
        log_path = f"logs/{job_id}.log"
    return JobRecord(
        project_id=project_id,
        job_id=job_id,
        name=name,
        commit_sha=commit_sha,
        status=status,
        created_at=created_at,
        finished_at=finished_at,
        log_path=log_path,
        ref=ref,
        log_excluded=log_excluded,
        log_decode_anomaly=log_decode_anomaly,
    )


def sample(
    job_id: int,
    auto_label: int,
    manual_label: Optional[int] = None,
    processed_log: Optional[str] = None,
    project_id: str = "proj",
    metrics=None,
) -> LabeledSample:
    return LabeledSample(
        job_id=job_id,
        project_id=project_id,
        auto_label=auto_label,
        raw_log_path=f"logs/{job_id}.log",
        processed_log=processed_log,
        manual_label=manual_label,
        metrics=metrics,
    )


def brute_force_rerun_labels(jobs: Sequence[JobRecord]) -> Dict[int, int]:
    """Reference labeler: a failed job is intermittent exactly when some
    success shares its (name, commit_sha). Quadratic on purpose."""
    out: Dict[int, int] = {}
    for j in jobs:
        if j.status != "failed":
            continue
        out[j.job_id] = int(
            any(
                k.status == "success"
                and k.name == j.name
                and k.commit_sha == j.commit_sha
                for k in jobs
            )
        )
    return out


JOB_KINDS: Tuple[Tuple[str, str, str], ...] = tuple(
    itertools.product(("unit", "lint"), ("c1", "c2"), ("success", "failed"))
)


def enumerate_job_multisets(max_runs: int) -> Iterable[List[JobRecord]]:
    """Every multiset of up to max_runs jobs over two names, two commits
    and two completed statuses."""
    for size in range(1, max_runs + 1):
        for combo in itertools.combinations_with_replacement(JOB_KINDS, size):
            yield [
                job(job_id=i + 1, name=name, commit_sha=sha, status=status)
                for i, (name, sha, status) in enumerate(combo)
            ]
