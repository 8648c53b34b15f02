"""Auto-labeling of failed jobs plus the manual-audit machinery.

The rerun heuristic: group completed jobs by (job name, commit sha).
A group where the same code both failed and succeeded is
nondeterministic, so its failures are intermittent. Failures in groups
with no success are regular failures. Jobs that never completed
(canceled, skipped, still running) are omitted.

The heuristic is cheap but imperfect, so a manually audited subsample
can be overlaid on top of the automatic labels, and the disagreement
rate between the two labelings quantifies the heuristic's error.
"""

from __future__ import annotations

import csv
from dataclasses import replace
from math import ceil
from statistics import NormalDist
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DataError, OverlayError, UndefinedStatisticError
from .records import (
    COMPLETED_STATUSES,
    LABEL_INTERMITTENT,
    LABEL_REGULAR,
    PROVENANCE_MANUAL_OVERLAY,
    JobRecord,
    LabeledSample,
    ProjectStats,
)
from .seeding import rng_for

RerunKey = Tuple[str, str]

OVERLAY_REQUIRED_COLUMNS = ("job_id", "manual_label")
OVERLAY_OPTIONAL_COLUMNS = ("justification", "category")


def build_rerun_groups(jobs: Iterable[JobRecord]) -> Dict[RerunKey, List[JobRecord]]:
    """Group completed jobs by (name, commit sha); reruns share a key."""
    groups: Dict[RerunKey, List[JobRecord]] = {}
    for job in jobs:
        if job.status not in COMPLETED_STATUSES:
            continue
        groups.setdefault((job.name, job.commit_sha), []).append(job)
    return groups


def auto_label(jobs: Iterable[JobRecord]) -> Tuple[List[LabeledSample], int]:
    """Label every failed job via the rerun heuristic.

    Returns the labeled samples sorted by job id, plus the count of
    jobs omitted because they never completed.
    """
    jobs = list(jobs)
    omitted = sum(1 for j in jobs if j.status not in COMPLETED_STATUSES)
    samples: List[LabeledSample] = []
    for group in build_rerun_groups(jobs).values():
        has_success = any(j.status == "success" for j in group)
        for job in group:
            if job.status != "failed":
                continue
            if job.log_excluded:
                # still counted in its rerun group above, but a job
                # without a readable log never enters a dataset
                omitted += 1
                continue
            label = LABEL_INTERMITTENT if has_success else LABEL_REGULAR
            samples.append(
                LabeledSample(
                    job_id=job.job_id,
                    project_id=job.project_id,
                    auto_label=label,
                    raw_log_path=job.log_path,
                )
            )
    samples.sort(key=lambda s: s.job_id)
    return samples, omitted


def brown_failure_ratio(samples: Sequence[LabeledSample]) -> float:
    """Share of failures the heuristic calls intermittent."""
    if not samples:
        raise UndefinedStatisticError("brown failure ratio needs at least one failed job")
    brown = sum(1 for s in samples if s.auto_label == LABEL_INTERMITTENT)
    return brown / len(samples)


def labeling_error_rate(samples: Sequence[LabeledSample]) -> float:
    """Mean absolute disagreement between automatic and manual labels.

    Only samples carrying a manual label participate.
    """
    audited = [s for s in samples if s.manual_label is not None]
    if not audited:
        raise UndefinedStatisticError("labeling error rate needs manually audited samples")
    return sum(abs(s.auto_label - s.manual_label) for s in audited) / len(audited)


def representative_sample_size(
    population: int, confidence: float = 0.95, margin: float = 0.05
) -> int:
    """Sample size for a proportion at worst-case variance, with finite-
    population correction. Population must be at least 1."""
    if population < 1:
        raise UndefinedStatisticError("sample size undefined for an empty population")
    if not (0.0 < confidence < 1.0) or not (0.0 < margin < 1.0):
        raise ValueError("confidence and margin must lie in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    unadjusted = z * z * 0.25 / (margin * margin)
    adjusted = unadjusted / (1.0 + (unadjusted - 1.0) / population)
    return ceil(adjusted)


def _round_half_up_ratio(numerator: int, denominator: int) -> int:
    # floor(n/d + 1/2) in exact integer arithmetic
    return (2 * numerator + denominator) // (2 * denominator)


def stratified_sample(
    samples: Sequence[LabeledSample], size: int, seed: int
) -> List[LabeledSample]:
    """Draw a label-stratified subsample of the given size.

    Per-class quotas are proportional; the intermittent quota rounds
    half up so audit sets never underrepresent the minority class.
    """
    n = len(samples)
    if size < 1 or size > n:
        raise DataError(f"sample size {size} outside [1, {n}]")
    intermittent = sorted(
        (s for s in samples if s.effective_label == LABEL_INTERMITTENT),
        key=lambda s: s.job_id,
    )
    regular = sorted(
        (s for s in samples if s.effective_label == LABEL_REGULAR),
        key=lambda s: s.job_id,
    )
    quota_int = _round_half_up_ratio(size * len(intermittent), n)
    quota_int = min(quota_int, len(intermittent))
    quota_reg = size - quota_int
    if quota_reg > len(regular):
        quota_reg = len(regular)
        quota_int = size - quota_reg

    rng = rng_for(seed, "stratified_sample")
    picked: List[LabeledSample] = []
    for stratum, quota in ((intermittent, quota_int), (regular, quota_reg)):
        if quota == 0:
            continue
        idx = rng.choice(len(stratum), size=quota, replace=False)
        picked.extend(stratum[i] for i in sorted(idx))
    picked.sort(key=lambda s: s.job_id)
    return picked


def read_overlay_csv(path) -> List[dict]:
    """Parse a manual-label overlay CSV into row dicts."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in OVERLAY_REQUIRED_COLUMNS if c not in header]
        if missing:
            raise OverlayError(
                f"overlay is missing required column(s): {', '.join(missing)}"
            )
        return list(reader)


def apply_manual_overlay(
    samples: Sequence[LabeledSample], rows: Sequence[dict]
) -> List[LabeledSample]:
    """Attach manual labels to samples; every bad row is reported at once.

    A row is bad when its job id is unknown, repeated within the
    overlay, or its manual label is not 0/1.
    """
    by_id = {s.job_id: s for s in samples}
    problems: List[str] = []
    overlays: Dict[int, dict] = {}
    for lineno, row in enumerate(rows, start=2):  # row 1 is the header
        raw_id = (row.get("job_id") or "").strip()
        raw_label = (row.get("manual_label") or "").strip()
        try:
            job_id = int(raw_id)
        except ValueError:
            problems.append(f"row {lineno}: job_id {raw_id!r} is not an integer")
            continue
        if job_id not in by_id:
            problems.append(f"row {lineno}: unknown job_id {job_id}")
            continue
        if job_id in overlays:
            problems.append(f"row {lineno}: duplicate job_id {job_id}")
            continue
        if raw_label not in ("0", "1"):
            problems.append(f"row {lineno}: manual_label {raw_label!r} must be 0 or 1")
            continue
        overlays[job_id] = {
            "manual_label": int(raw_label),
            "justification": (row.get("justification") or "").strip() or None,
            "category": (row.get("category") or "").strip() or None,
        }
    if problems:
        raise OverlayError(
            f"overlay has {len(problems)} bad row(s): " + "; ".join(problems),
            rows=problems,
        )

    out: List[LabeledSample] = []
    for s in samples:
        patch = overlays.get(s.job_id)
        if patch is None:
            out.append(s)
        else:
            out.append(
                replace(
                    s,
                    manual_label=patch["manual_label"],
                    justification=patch["justification"],
                    category=patch["category"],
                    label_provenance=PROVENANCE_MANUAL_OVERLAY,
                )
            )
    return out


def disagreement_summary(samples: Sequence[LabeledSample]) -> dict:
    """Cross-tabulate automatic vs manual labels over audited samples."""
    audited = [s for s in samples if s.manual_label is not None]
    if not audited:
        raise UndefinedStatisticError("disagreement summary needs audited samples")
    cells = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0}
    for s in audited:
        cells[(s.auto_label, s.manual_label)] += 1
    return {
        "n": len(audited),
        "auto_intermittent": cells[(1, 0)] + cells[(1, 1)],
        "manual_intermittent": cells[(0, 1)] + cells[(1, 1)],
        "agree_regular": cells[(0, 0)],
        "agree_intermittent": cells[(1, 1)],
        "auto_only": cells[(1, 0)],
        "manual_only": cells[(0, 1)],
        "one_sided": cells[(1, 0)] == 0 or cells[(0, 1)] == 0,
        "error_rate": labeling_error_rate(audited),
    }


def project_stats(
    project_id: str,
    samples: Sequence[LabeledSample],
    confidence: float = 0.95,
    margin: float = 0.05,
) -> ProjectStats:
    """Roll labeling results up into per-project headline numbers."""
    n_failed = len(samples)
    n_brown = sum(1 for s in samples if s.auto_label == LABEL_INTERMITTENT)
    audited = any(s.manual_label is not None for s in samples)
    return ProjectStats(
        project_id=project_id,
        n_failed=n_failed,
        n_brown=n_brown,
        bfr=n_brown / n_failed if n_failed else 0.0,
        sample_size=(
            representative_sample_size(n_failed, confidence, margin) if n_failed else None
        ),
        error_rate=labeling_error_rate(samples) if audited else None,
    )
