"""Flat-file project store: JSONL manifest + one log file per job.

Layout under the root directory:

    manifest.jsonl   one JobRecord per line, exact field order
    logs/<job_id>.log
    cursor.json      {"next_page": int} resumption point

The manifest is append-only between compactions; compaction sorts by
job_id and drops duplicates keeping the newest row. Only completed
jobs (success/failed) may enter the store.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set

from ..errors import DataError
from ..records import COMPLETED_STATUSES, JobRecord

MANIFEST_NAME = "manifest.jsonl"
LOGS_DIR = "logs"
CURSOR_NAME = "cursor.json"


class ProjectStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / LOGS_DIR).mkdir(exist_ok=True)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    @property
    def cursor_path(self) -> Path:
        return self.root / CURSOR_NAME

    def log_path(self, job_id: int) -> Path:
        return self.root / LOGS_DIR / f"{int(job_id)}.log"

    # manifest

    def read_records(self) -> List[JobRecord]:
        if not self.manifest_path.exists():
            return []
        records = []
        with open(self.manifest_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(JobRecord.from_json_line(line))
                except (json.JSONDecodeError, TypeError) as exc:
                    raise DataError(
                        f"{self.manifest_path}:{lineno}: bad manifest row: {exc}"
                    )
        return records

    def job_ids(self) -> Set[int]:
        return {r.job_id for r in self.read_records()}

    def append_records(self, records: Iterable[JobRecord]) -> int:
        """Append new rows, skipping job_ids already present."""
        rows = list(records)
        for r in rows:
            if r.status not in COMPLETED_STATUSES:
                raise DataError(
                    f"job {r.job_id}: only completed jobs enter a store, "
                    f"got status {r.status!r}"
                )
        existing = self.job_ids()
        written = 0
        with open(self.manifest_path, "a", encoding="utf-8") as fh:
            for r in rows:
                if r.job_id in existing:
                    continue
                fh.write(r.to_json_line() + "\n")
                existing.add(r.job_id)
                written += 1
        return written

    def replace_records(self, records: Iterable[JobRecord]) -> None:
        """Rewrite the whole manifest (used by refresh and compaction)."""
        rows = sorted(records, key=lambda r: r.job_id)
        for r in rows:
            if r.status not in COMPLETED_STATUSES:
                raise DataError(
                    f"job {r.job_id}: only completed jobs enter a store, "
                    f"got status {r.status!r}"
                )
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".manifest")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                for r in rows:
                    fh.write(r.to_json_line() + "\n")
            os.replace(tmp, self.manifest_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def compact(self) -> int:
        """Sort by job_id, drop duplicate job_ids keeping the last row."""
        by_id: Dict[int, JobRecord] = {}
        for r in self.read_records():
            by_id[r.job_id] = r
        self.replace_records(by_id.values())
        return len(by_id)

    # logs

    def write_log(self, job_id: int, text: str) -> str:
        path = self.log_path(job_id)
        path.write_text(text, encoding="utf-8")
        return f"{LOGS_DIR}/{int(job_id)}.log"

    def read_log(self, job_id: int) -> str:
        path = self.log_path(job_id)
        if not path.exists():
            raise DataError(f"no stored log for job {job_id} under {self.root}")
        return path.read_text(encoding="utf-8")

    def has_log(self, job_id: int) -> bool:
        return self.log_path(job_id).exists()

    # cursor

    def read_cursor(self, page_size: Optional[int] = None) -> int:
        """Next page to fetch (1 when starting fresh).

        A page number is only meaningful for the page size it was
        written under; a mismatch restarts from page 1 (dedupe makes
        the re-walk harmless).
        """
        if not self.cursor_path.exists():
            return 1
        try:
            data = json.loads(self.cursor_path.read_text(encoding="utf-8"))
            stored_size = data.get("page_size")
            if page_size is not None and stored_size not in (None, int(page_size)):
                return 1
            return int(data["next_page"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{self.cursor_path}: bad cursor file: {exc}")

    def write_cursor(self, next_page: int, page_size: Optional[int] = None) -> None:
        payload = {"next_page": int(next_page)}
        if page_size is not None:
            payload["page_size"] = int(page_size)
        self.cursor_path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
