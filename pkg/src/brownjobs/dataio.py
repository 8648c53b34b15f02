"""Labeled-sample JSONL files shared between pipeline stages.

One sample per line in LabeledSample field order. Processed log text
may live inline or be joined in from a directory of `<job_id>.prep.txt`
files produced by the log pre-processing stage.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Optional, Sequence

from .errors import DataError
from .records import LabeledSample


def write_samples_jsonl(samples: Sequence[LabeledSample], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_dict(), sort_keys=False) + "\n")


def read_samples_jsonl(path, prep_dir: Optional[str] = None) -> List[LabeledSample]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"samples file not found: {path}")
    samples: List[LabeledSample] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                samples.append(LabeledSample.from_dict(json.loads(line)))
            except (json.JSONDecodeError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: bad sample row: {exc}")
    if prep_dir is not None:
        prep_root = Path(prep_dir)
        for s in samples:
            if s.processed_log is not None:
                continue
            candidate = prep_root / f"{s.job_id}.prep.txt"
            if candidate.exists():
                s.processed_log = candidate.read_text(encoding="utf-8")
    return samples
