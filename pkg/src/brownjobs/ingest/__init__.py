"""CI job metadata and log ingestion (GitLab-style REST)."""

from ..records import JOB_RECORD_FIELDS
from .client import CiClient, JobPage, TraceResult
from .fetch import FetchOutcome, fetch_jobs
from .store import ProjectStore

__all__ = [
    "CiClient",
    "JobPage",
    "TraceResult",
    "FetchOutcome",
    "fetch_jobs",
    "ProjectStore",
    "JOB_RECORD_FIELDS",
]
