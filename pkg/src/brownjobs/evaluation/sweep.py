"""Shots sweep: how many labeled examples per class are enough.

Runs the full MCCV harness once per shot count and compares each F1
distribution against the largest-N reference with a two-sided rank-sum
test. A large p-value means the smaller budget is statistically
indistinguishable from the reference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

from ..errors import DataError
from ..records import LabeledSample
from .mccv import EvalReport, MccvConfig, mccv
from .ranksum import rank_sum_test

DEFAULT_SHOT_COUNTS = tuple(range(1, 16))


@dataclass
class ShotsSweepResult:
    reference_n: int
    per_n: Dict[int, EvalReport]
    p_values: Dict[int, float]  # vs the reference_n distribution; reference excluded

    def to_json_dict(self) -> dict:
        return {
            "reference_n": self.reference_n,
            "per_n": {str(n): r.to_json_dict() for n, r in self.per_n.items()},
            "p_values": {str(n): p for n, p in self.p_values.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ShotsSweepResult":
        d = json.loads(text)
        return cls(
            reference_n=d["reference_n"],
            per_n={int(n): EvalReport(**r) for n, r in d["per_n"].items()},
            p_values={int(n): p for n, p in d["p_values"].items()},
        )


def shots_sweep(
    samples: Sequence[LabeledSample],
    config: MccvConfig,
    trainer,
    shot_counts: Optional[Sequence[int]] = None,
) -> ShotsSweepResult:
    # `is None` check, not truthiness: an explicit empty list must error below
    counts: List[int] = sorted(
        set(DEFAULT_SHOT_COUNTS if shot_counts is None else shot_counts)
    )
    if not counts:
        raise DataError("shot sweep needs at least one shot count")
    if counts[0] < 1:
        raise DataError(f"shot counts must be >= 1, got {counts[0]}")

    per_n: Dict[int, EvalReport] = {}
    for n in counts:
        per_n[n] = mccv(samples, replace(config, shots=n), trainer)

    reference = counts[-1]
    ref_f1 = per_n[reference].f1_values
    p_values = {
        n: rank_sum_test(per_n[n].f1_values, ref_f1)
        for n in counts
        if n != reference
    }
    return ShotsSweepResult(reference_n=reference, per_n=per_n, p_values=p_values)
