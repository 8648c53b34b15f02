"""Shared record types: CI job runs and labeled log samples."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Optional

COMPLETED_STATUSES = ("success", "failed")

LABEL_INTERMITTENT = 1
LABEL_REGULAR = 0

PROVENANCE_RERUN_HEURISTIC = "rerun_heuristic"
PROVENANCE_MANUAL_OVERLAY = "manual_overlay"

# Manifest rows serialize exactly these keys, in this order.
JOB_RECORD_FIELDS = (
    "project_id",
    "job_id",
    "name",
    "commit_sha",
    "status",
    "created_at",
    "finished_at",
    "log_path",
    "ref",
    "log_excluded",
    "log_decode_anomaly",
)


@dataclass
class JobRecord:
    """One CI job run as persisted in a project store manifest.

    ``log_excluded`` marks failed jobs whose trace was missing or empty
    (they never enter datasets); ``log_decode_anomaly`` marks traces
    that needed UTF-8 replacement characters on decode.
    """

    project_id: str
    job_id: int
    name: str
    commit_sha: str
    status: str
    created_at: str
    finished_at: Optional[str] = None
    log_path: Optional[str] = None
    ref: str = ""
    log_excluded: bool = False
    log_decode_anomaly: bool = False

    def __post_init__(self):
        # any CI status is storable; completed-only filtering happens at
        # labeling time
        if not self.status or not isinstance(self.status, str):
            raise ValueError(f"job {self.job_id}: status must be a non-empty string")

    def to_json_line(self) -> str:
        d = asdict(self)
        return json.dumps({k: d[k] for k in JOB_RECORD_FIELDS}, sort_keys=False)

    @classmethod
    def from_json_line(cls, line: str) -> "JobRecord":
        return cls(**json.loads(line))


@dataclass
class LabeledSample:
    """A failed job's log with its automated and (optional) manual label."""

    job_id: int
    project_id: str
    auto_label: int
    raw_log_path: Optional[str] = None
    processed_log: Optional[str] = None
    manual_label: Optional[int] = None
    label_provenance: str = PROVENANCE_RERUN_HEURISTIC
    justification: Optional[str] = None
    category: Optional[str] = None
    # history-derived numeric features, filled by the metrics pass:
    # {"prior_reruns": int, "commits_since_last_intermittent": int}
    metrics: Optional[dict] = None

    @property
    def effective_label(self) -> int:
        """Manual label when present, otherwise the automated one."""
        return self.manual_label if self.manual_label is not None else self.auto_label

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledSample":
        return cls(**d)


@dataclass
class ProjectStats:
    """Per-project labeling statistics for the stats report."""

    project_id: str
    n_failed: int
    n_brown: int
    bfr: float
    sample_size: Optional[int] = None
    error_rate: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)
