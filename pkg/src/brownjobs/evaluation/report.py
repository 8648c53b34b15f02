"""Markdown summaries of harness results.

Scores render as percentages with the standard deviation in a
subscript, e.g. `82.3<sub>5.1</sub>`, one row or cell per condition.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

import numpy as np

from .cross import CrossProjectResult
from .mccv import EvalReport
from .sweep import ShotsSweepResult


def format_mean_std(values: Sequence[float]) -> str:
    arr = np.asarray(list(values), dtype=np.float64) * 100.0
    return f"{arr.mean():.1f}<sub>{arr.std():.1f}</sub>"


def _column(report: EvalReport, key: str) -> List[float]:
    return [r[key] for r in report.per_repeat]


def mccv_markdown(report: EvalReport, name: str = "dataset") -> str:
    cfg = report.config
    lines = [
        f"## MCCV results: {name}",
        "",
        f"Trainer `{cfg['trainer']}`, {cfg['repeats']} repeats, "
        f"{cfg['trials']} trials, {cfg['shots']} shots per class, "
        f"master seed {cfg['master_seed']}.",
        "",
        "| class | precision | recall | F1 |",
        "| --- | --- | --- | --- |",
        "| intermittent | {p} | {r} | {f} |".format(
            p=format_mean_std(_column(report, "precision_intermittent")),
            r=format_mean_std(_column(report, "recall_intermittent")),
            f=format_mean_std(report.f1_values),
        ),
        "| regular | {p} | {r} | {f} |".format(
            p=format_mean_std(_column(report, "precision_regular")),
            r=format_mean_std(_column(report, "recall_regular")),
            f=format_mean_std(
                [_f1(r["precision_regular"], r["recall_regular"]) for r in report.per_repeat]
            ),
        ),
        "",
        f"Headline intermittent-class F1: "
        f"{report.mean_f1 * 100:.1f}<sub>{report.std_f1 * 100:.1f}</sub>",
        "",
    ]
    return "\n".join(lines)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def sweep_markdown(result: ShotsSweepResult, name: str = "dataset") -> str:
    lines = [
        f"## Shots sweep: {name}",
        "",
        f"Rank-sum p-values compare each F1 distribution against the "
        f"{result.reference_n}-shot reference (two-sided).",
        "",
        "| shots | F1 | p vs reference |",
        "| --- | --- | --- |",
    ]
    for n in sorted(result.per_n):
        f1_cell = format_mean_std(result.per_n[n].f1_values)
        if n == result.reference_n:
            p_cell = "reference"
        else:
            p_cell = f"{result.p_values[n]:.3f}"
        lines.append(f"| {n} | {f1_cell} | {p_cell} |")
    lines.append("")
    return "\n".join(lines)


def cross_markdown(result: CrossProjectResult) -> str:
    lines = [
        "## Cross-project F1 (rows: scored project, columns: shot source)",
        "",
        "| target \\ source | " + " | ".join(result.projects) + " |",
        "| --- |" + " --- |" * len(result.projects),
    ]
    for target in result.projects:
        cells = []
        for source in result.projects:
            report = result.cell(target, source)
            cells.append(format_mean_std(report.f1_values) if report else "n/a")
        lines.append(f"| {target} | " + " | ".join(cells) + " |")
    if result.skipped:
        lines.append("")
        lines.append("Skipped:")
        for project, reason in result.skipped:
            lines.append(f"- {project}: {reason}")
    lines.append("")
    return "\n".join(lines)
