"""One-to-one cross-project evaluation.

Each cell trains on shots drawn from the column project's learn split
and scores on the row project's validation/test splits. Diagonal
cells are plain within-project runs. A project whose data cannot
support the harness (missing, single-class, or too small to split) is
dropped from the matrix with a recorded notice instead of failing the
whole grid.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..errors import BrownjobsError, DataError
from ..records import LabeledSample
from .mccv import EvalReport, MccvConfig, mccv


@dataclass
class CrossProjectResult:
    projects: List[str]  # usable projects, input order
    matrix: Dict[str, Dict[str, EvalReport]]  # matrix[target][source]
    skipped: List[Tuple[str, str]]  # (project, reason)

    def cell(self, target: str, source: str) -> Optional[EvalReport]:
        return self.matrix.get(target, {}).get(source)

    def to_json_dict(self) -> dict:
        return {
            "projects": self.projects,
            "matrix": {
                t: {s: r.to_json_dict() for s, r in row.items()}
                for t, row in self.matrix.items()
            },
            "skipped": [{"project": p, "reason": r} for p, r in self.skipped],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CrossProjectResult":
        d = json.loads(text)
        return cls(
            projects=list(d["projects"]),
            matrix={
                t: {s: EvalReport(**r) for s, r in row.items()}
                for t, row in d["matrix"].items()
            },
            skipped=[(e["project"], e["reason"]) for e in d["skipped"]],
        )


def _usable(samples: Sequence[LabeledSample]) -> Optional[str]:
    """Reason the project cannot participate, or None if it can."""
    if not samples:
        return "no samples"
    counts = Counter(s.effective_label for s in samples)
    if counts.get(1, 0) < 2 or counts.get(0, 0) < 2:
        return (
            f"needs at least 2 samples of each class, got "
            f"{counts.get(1, 0)} intermittent / {counts.get(0, 0)} regular"
        )
    if any(not s.processed_log for s in samples):
        return "samples without processed logs"
    return None


def cross_project(
    datasets: Mapping[str, Sequence[LabeledSample]],
    config: MccvConfig,
    trainer,
) -> CrossProjectResult:
    if not datasets:
        raise DataError("cross-project evaluation needs at least one dataset")

    usable: List[str] = []
    skipped: List[Tuple[str, str]] = []
    for name, samples in datasets.items():
        reason = _usable(samples)
        if reason is None:
            usable.append(name)
        else:
            skipped.append((name, reason))

    matrix: Dict[str, Dict[str, EvalReport]] = {}
    for target in usable:
        row: Dict[str, EvalReport] = {}
        for source in usable:
            shots_from = None if source == target else datasets[source]
            try:
                row[source] = mccv(
                    datasets[target], config, trainer, shots_from=shots_from
                )
            except BrownjobsError as exc:
                # a pairing can still starve (e.g. source learn split < N
                # shots); record it like a missing project, keep the grid
                skipped.append((f"{target}<-{source}", str(exc)))
        matrix[target] = row
    return CrossProjectResult(projects=usable, matrix=matrix, skipped=skipped)
