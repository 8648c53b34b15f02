"""Fetch job metadata and failure logs into a project store.

Pages stream from the cursor; canceled/skipped/running jobs are
dropped at ingest, failed jobs get their traces downloaded with
bounded parallelism, and the cursor advances after every persisted
page so an interrupted fetch resumes without refetching. Already
stored job_ids are never duplicated, so an unchanged remote yields a
byte-identical manifest on re-run. `refresh=True` restarts from page
one and rewrites rows whose remote state changed (e.g. a job retried
after the first fetch).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional

from ..errors import DataError
from ..records import COMPLETED_STATUSES, JobRecord
from .client import CiClient, TraceResult
from .store import ProjectStore

DEFAULT_DOWNLOAD_WORKERS = 4


@dataclass
class FetchOutcome:
    new_records: int = 0
    updated_records: int = 0
    logs_fetched: int = 0
    excluded: int = 0
    decode_anomalies: int = 0
    pages: int = 0
    warnings: List[str] = field(default_factory=list)


def _normalize_timestamp(value: Optional[str]) -> Optional[str]:
    """Provider timestamps land as UTC ISO-8601 regardless of offset."""
    if not value:
        return None
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise DataError(f"unparseable timestamp from provider: {value!r}")
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc).isoformat()


def _record_from_payload(project_id: str, payload: dict) -> JobRecord:
    try:
        commit = payload.get("commit") or {}
        sha = payload.get("commit_sha") or commit.get("id") or ""
        return JobRecord(
            project_id=str(project_id),
            job_id=int(payload["id"]),
            name=str(payload["name"]),
            commit_sha=str(sha),
            status=str(payload["status"]),
            created_at=_normalize_timestamp(payload.get("created_at")) or "",
            finished_at=_normalize_timestamp(payload.get("finished_at")),
            ref=str(payload.get("ref") or ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed job payload from provider: {exc}")


def _needs_log(record: JobRecord, store: ProjectStore, refresh: bool) -> bool:
    if record.status != "failed":
        return False
    return refresh or not store.has_log(record.job_id)


def _apply_trace(record: JobRecord, trace: TraceResult, store: ProjectStore, outcome: FetchOutcome) -> None:
    if not trace.found:
        record.log_excluded = True
        record.log_path = None
        outcome.excluded += 1
        outcome.warnings.append(f"job {record.job_id}: trace missing (404), excluded")
        return
    record.log_path = store.write_log(record.job_id, trace.text)
    outcome.logs_fetched += 1
    if trace.decode_anomaly:
        record.log_decode_anomaly = True
        outcome.decode_anomalies += 1
    if not trace.text:
        record.log_excluded = True
        outcome.excluded += 1
        outcome.warnings.append(f"job {record.job_id}: empty trace, excluded")


def fetch_jobs(
    client: CiClient,
    project_id: str,
    store: ProjectStore,
    page_size: int = 100,
    refresh: bool = False,
    workers: int = DEFAULT_DOWNLOAD_WORKERS,
) -> FetchOutcome:
    if workers < 1:
        raise ValueError("workers must be >= 1")
    outcome = FetchOutcome()
    existing: Dict[int, JobRecord] = {r.job_id: r for r in store.read_records()}
    updates: Dict[int, JobRecord] = {}

    page = 1 if refresh else store.read_cursor(page_size)
    last_page = page
    while page is not None:
        job_page = client.list_jobs(project_id, page=page, per_page=page_size)
        outcome.pages += 1
        last_page = job_page.page

        records = []
        for payload in job_page.jobs:
            record = _record_from_payload(project_id, payload)
            if record.status not in COMPLETED_STATUSES:
                continue
            old = existing.get(record.job_id)
            if old is not None:
                if refresh and (record.status, record.finished_at) != (
                    old.status,
                    old.finished_at,
                ):
                    # retried remotely since the last fetch: take the new row,
                    # keep local log markers until the trace is re-downloaded
                    record.log_path = old.log_path
                    record.log_excluded = old.log_excluded
                    record.log_decode_anomaly = old.log_decode_anomaly
                    updates[record.job_id] = record
                    records.append(record)
                continue
            records.append(record)

        to_download = [r for r in records if _needs_log(r, store, refresh)]
        if to_download:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                traces = list(
                    pool.map(
                        lambda r: client.fetch_trace(project_id, r.job_id),
                        to_download,
                    )
                )
            for record, trace in zip(to_download, traces):
                _apply_trace(record, trace, store, outcome)
        for record in records:
            # resume case: a prior interrupted run downloaded the log but
            # crashed before appending the manifest row
            if (
                record.status == "failed"
                and record.log_path is None
                and not record.log_excluded
                and store.has_log(record.job_id)
            ):
                record.log_path = f"logs/{record.job_id}.log"

        fresh = [r for r in records if r.job_id not in updates]
        outcome.new_records += store.append_records(fresh)
        for record in fresh:
            existing[record.job_id] = record

        if job_page.next_page is not None:
            store.write_cursor(job_page.next_page, page_size)
        page = job_page.next_page

    if updates:
        merged = {r.job_id: r for r in store.read_records()}
        merged.update(updates)
        store.replace_records(merged.values())
        outcome.updated_records = len(updates)
    elif refresh:
        store.compact()

    # the remote is exhausted: resume at the last page seen, so rows later
    # appended to that partial page are still picked up (dedupe skips the rest)
    store.write_cursor(last_page, page_size)
    return outcome
