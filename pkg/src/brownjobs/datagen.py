"""Deterministic synthetic CI-log corpora for offline evaluation.

Real failure logs are project-specific and large; tests and offline
harness runs instead use generated logs built from template families.
Each family mimics one failure mode (a network flake, a compile error,
...) with a stable core vocabulary plus fresh variable elements per
log: URLs, paths, durations, versions, hex ids, ANSI color, runner
section markers, duplicated lines. Families carry a class label, so a
corpus is separable by design while still exercising every
pre-processing rule.

Everything is driven by the shared seed-derivation scheme, so a given
(n, seed, families) triple always yields the same corpus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .logprep import PrepConfig, preprocess
from .records import LABEL_INTERMITTENT, LABEL_REGULAR, LabeledSample
from .seeding import rng_for

_WORDS = (
    "alpha", "bravo", "cargo", "delta", "ember", "fable", "gamma", "hydra",
    "icarus", "jolt", "kappa", "lumen", "mesa", "nimbus", "orbit", "pylon",
    "quartz", "raven", "sable", "tundra",
)

_HOSTS = ("registry", "cdn", "mirror", "cache", "git")


@dataclass(frozen=True)
class LogFamily:
    """One failure mode: a labeled set of core template lines."""

    name: str
    label: int
    lines: Tuple[str, ...]


# Intermittent families share some flake vocabulary (retrying,
# transient) on top of family-unique markers; regular families share
# deterministic-error vocabulary. That overlap is deliberate: corpora
# stay separable by class while features correlate across families the
# way real failure modes do.
INTERMITTENT_FAMILIES = (
    LogFamily(
        "net_flake",
        LABEL_INTERMITTENT,
        (
            "error connection reset by peer while fetching {url}",
            "warning transient network failure retrying request attempt {num}",
            "curl download of {url} timed out after {duration}",
        ),
    ),
    LogFamily(
        "runner_timeout",
        LABEL_INTERMITTENT,
        (
            "job exceeded maximum runtime of {duration} on executor {hexid}",
            "runner system failure while waiting for pod to start retrying",
            "transient scheduler timeout reached killing build step",
        ),
    ),
    LogFamily(
        "oom_transient",
        LABEL_INTERMITTENT,
        (
            "container for executor {hexid} exceeded memory limit and was evicted",
            "transient allocation failure in worker retrying stage",
            "oom killer terminated process during test run",
        ),
    ),
    LogFamily(
        "cache_flake",
        LABEL_INTERMITTENT,
        (
            "cache restore from {url} failed with checksum mismatch",
            "stale lock on {dirpath} released after {duration} retrying extraction",
            "warning transient cache backend unavailable attempt {num}",
        ),
    ),
)

REGULAR_FAMILIES = (
    LogFamily(
        "compile_error",
        LABEL_REGULAR,
        (
            "error expected identifier before token in {path}",
            "undefined reference to symbol {word} in object file",
            "compilation terminated with unrecoverable errors",
        ),
    ),
    LogFamily(
        "assert_fail",
        LABEL_REGULAR,
        (
            "assertion failed expected value {num} but got {num} in {path}",
            "unit test {word} failed with deterministic assertion error",
            "stack trace written to {path}",
        ),
    ),
    LogFamily(
        "lint_error",
        LABEL_REGULAR,
        (
            "style violation line exceeds column limit in {path}",
            "lint check found {num} unfixable issues in module {word}",
            "formatting rules failed deterministic verification",
        ),
    ),
    LogFamily(
        "type_error",
        LABEL_REGULAR,
        (
            "type mismatch cannot assign {word} to field in {path}",
            "deterministic build error missing trait implementation for {word}",
            "type checking failed with unrecoverable diagnostics",
        ),
    ),
)

ALL_FAMILIES: Dict[str, LogFamily] = {
    f.name: f for f in INTERMITTENT_FAMILIES + REGULAR_FAMILIES
}

# Failure modes are not uniform in the wild: one flaky pattern tends to
# dominate. Family mix within a class is deterministic by quota, so two
# corpora from different seeds share the same composition.
FAMILY_WEIGHTS: Dict[str, float] = {
    "net_flake": 0.35,
    "runner_timeout": 0.25,
    "oom_transient": 0.20,
    "cache_flake": 0.20,
    "compile_error": 0.25,
    "assert_fail": 0.25,
    "lint_error": 0.25,
    "type_error": 0.25,
}

_BOILERPLATE = (
    "Running with ci runner {version} on host {word} {hexid}",
    "Fetching changes with git depth set to {num}",
    "Preparing environment using image {word} {version}",
    "Cleaning up project directory and file based variables",
)

_NOISE_LINES = (
    "Uploading artifact archive to {url}",
    "Restored build directory {dirpath} in {duration}",
    "step finished with checkpoint {hexid} after {duration}",
    "Using toolchain {version} from {path}",
    "progress {num} of {num} units complete",
)

_PLACEHOLDER_PATTERN = re.compile(r"\{(\w+)\}")


def _fill_placeholders(template: str, rng) -> str:
    def gen(kind: str) -> str:
        if kind == "url":
            host = _HOSTS[rng.integers(len(_HOSTS))]
            word = _WORDS[rng.integers(len(_WORDS))]
            return f"https://{host}{rng.integers(1, 99)}.example.com/{word}/{_hexid(rng)}?t={rng.integers(10**6)}"
        if kind == "path":
            a = _WORDS[rng.integers(len(_WORDS))]
            b = _WORDS[rng.integers(len(_WORDS))]
            ext = ("rs", "c", "py", "log", "txt")[rng.integers(5)]
            return f"/builds/{a}/src/{b}.{ext}"
        if kind == "dirpath":
            a = _WORDS[rng.integers(len(_WORDS))]
            return f"/var/cache/{a}/{_WORDS[rng.integers(len(_WORDS))]}"
        if kind == "duration":
            unit = ("ms", "s", "min")[rng.integers(3)]
            return f"{rng.integers(1, 5000)}{unit}"
        if kind == "version":
            return f"v{rng.integers(0, 20)}.{rng.integers(0, 30)}.{rng.integers(0, 100)}"
        if kind == "hexid":
            return _hexid(rng)
        if kind == "num":
            return str(rng.integers(2, 100000))
        if kind == "word":
            return _WORDS[rng.integers(len(_WORDS))]
        raise ValueError(f"unknown placeholder {kind!r}")

    return _PLACEHOLDER_PATTERN.sub(lambda m: gen(m.group(1)), template)


def _hexid(rng, length: int = 10) -> str:
    digits = "0123456789abcdef"
    # force at least one letter and one digit so the id rule always fires
    core = "".join(digits[rng.integers(16)] for _ in range(length - 2))
    return "e" + core + str(rng.integers(10))


def render_family_log(family: LogFamily, rng) -> str:
    """One raw log: boilerplate, family core, noise, duplicates, ANSI."""
    ts = int(rng.integers(1_600_000_000, 1_700_000_000))
    lines: List[str] = [f"section_start:{ts}:build_step\r"]
    for tpl in _BOILERPLATE[: 2 + int(rng.integers(3))]:
        lines.append(_fill_placeholders(tpl, rng))

    body: List[str] = [_fill_placeholders(tpl, rng) for tpl in family.lines]
    for _ in range(int(rng.integers(2, 5))):
        noise = _fill_placeholders(_NOISE_LINES[rng.integers(len(_NOISE_LINES))], rng)
        body.insert(int(rng.integers(len(body) + 1)), noise)
    lines.extend(body)

    # duplicated tail lines exercise the dedup rule
    for _ in range(int(rng.integers(1, 4))):
        lines.append(lines[int(rng.integers(1, len(lines)))])

    lines.append(f"section_end:{ts}:build_step\r")
    lines.append(f"ERROR: Job failed: exit code {int(rng.integers(1, 3))}")

    colored = []
    for line in lines:
        if rng.random() < 0.3:
            colored.append(f"\x1b[{31 + int(rng.integers(6))}m{line}\x1b[0m")
        else:
            colored.append(line)
    return "\n".join(colored) + "\n"


def _pick_families(families: Optional[Sequence[str]]) -> Tuple[List[LogFamily], List[LogFamily]]:
    if families is None:
        return list(INTERMITTENT_FAMILIES), list(REGULAR_FAMILIES)
    unknown = [f for f in families if f not in ALL_FAMILIES]
    if unknown:
        raise ValueError(f"unknown families: {unknown} (known: {sorted(ALL_FAMILIES)})")
    chosen = [ALL_FAMILIES[f] for f in families]
    ints = [f for f in chosen if f.label == LABEL_INTERMITTENT]
    regs = [f for f in chosen if f.label == LABEL_REGULAR]
    if not ints or not regs:
        raise ValueError("need at least one family of each class")
    return ints, regs


def _family_for_ordinal(families: List[LogFamily], ordinal: int, count: int) -> LogFamily:
    """Deterministic quota assignment: the class's ordinal-th sample
    lands in the family whose cumulative weight interval contains it."""
    weights = [FAMILY_WEIGHTS.get(f.name, 1.0) for f in families]
    total = sum(weights)
    frac = (ordinal + 0.5) / count
    cum = 0.0
    for fam, w in zip(families, weights):
        cum += w / total
        if frac < cum:
            return fam
    return families[-1]


def make_corpus(
    n: int,
    seed: int,
    families: Optional[Sequence[str]] = None,
    intermittent_fraction: float = 0.5,
    preprocess_logs: bool = True,
    prep_config: Optional[PrepConfig] = None,
) -> List[LabeledSample]:
    """Generate n labeled samples, class-balanced per the fraction.

    Each sample's family becomes its category; processed_log is filled
    through the real pre-processing chain unless disabled. Fabricated
    history metrics lean the way real ones do: rerun counts are high
    for intermittent jobs and near zero for regular ones.
    """
    ints, regs = _pick_families(families)
    n_int = round(n * intermittent_fraction)
    samples: List[LabeledSample] = []
    for i in range(n):
        rng = rng_for(seed, "datagen", i)
        intermittent = i < n_int
        if intermittent:
            family = _family_for_ordinal(ints, i, max(n_int, 1))
        else:
            family = _family_for_ordinal(regs, i - n_int, max(n - n_int, 1))
        raw = render_family_log(family, rng)
        text = preprocess(raw, prep_config).text if preprocess_logs else raw
        if intermittent:
            metrics = {
                "prior_reruns": int(rng.integers(1, 5)),
                "commits_since_last_intermittent": int(rng.integers(0, 8)),
            }
        else:
            metrics = {
                "prior_reruns": int(rng.integers(0, 2)),
                "commits_since_last_intermittent": int(rng.integers(5, 60)),
            }
        samples.append(
            LabeledSample(
                job_id=i + 1,
                project_id="synthetic",
                auto_label=family.label,
                processed_log=text,
                category=family.name,
                metrics=metrics,
            )
        )
    return samples


def generate_raw_logs(n: int, seed: int) -> List[str]:
    """Raw (un-preprocessed) generated logs, for property suites."""
    all_fams = INTERMITTENT_FAMILIES + REGULAR_FAMILIES
    logs = []
    for i in range(n):
        rng = rng_for(seed, "rawlogs", i)
        family = all_fams[int(rng.integers(len(all_fams)))]
        logs.append(render_family_log(family, rng))
    return logs


def flip_intermittent_labels(
    samples: Sequence[LabeledSample], fraction: float, seed: int
) -> Tuple[List[LabeledSample], List[int]]:
    """Corrupt a fraction of the automatic intermittent labels to regular.

    Only auto labels flip; manual labels are human ground truth and
    stay intact. Flips are aligned to failure categories, the way
    rerun-heuristic mistakes are in practice: whole categories flip
    first (largest first), then single samples top up to the exact
    target count. Returns the new sample list and the flipped job ids.
    """
    if not (0.0 <= fraction <= 1.0):
        raise ValueError("fraction must lie in [0, 1]")
    ints = [s for s in samples if s.auto_label == LABEL_INTERMITTENT]
    target = int(fraction * len(ints) + 0.5)
    by_cat: Dict[str, List[LabeledSample]] = {}
    for s in ints:
        by_cat.setdefault(s.category or "", []).append(s)

    rng = rng_for(seed, "label_flips")
    flipped: Set[int] = set()
    remaining = target
    for cat in sorted(by_cat, key=lambda c: (-len(by_cat[c]), c)):
        group = by_cat[cat]
        if remaining <= 0:
            break
        if len(group) <= remaining:
            flipped.update(s.job_id for s in group)
            remaining -= len(group)
        else:
            idx = rng.choice(len(group), size=remaining, replace=False)
            flipped.update(group[i].job_id for i in idx)
            remaining = 0

    out = [
        replace(s, auto_label=LABEL_REGULAR) if s.job_id in flipped else s
        for s in samples
    ]
    return out, sorted(flipped)
