"""Log pre-processing: abstract variable elements, strip noise.

Raw CI job logs are full of run-specific values (URLs, paths, ids,
durations, timestamps) and transport noise (ANSI colors, runner section
markers). Before a log is embedded or vectorized it goes through an
ordered rule chain that replaces variable elements with placeholder
tokens and drops everything that carries no failure signal:

  pre-pass  strip ANSI escapes, runner section markers, CR line endings
  rule 1    URLs, file paths, dir paths, durations, versions -> tokens
  rule 2    mixed letter+digit runs -> <ID>
  rule 3    drop characters outside letters/digits/whitespace
            (placeholder angle brackets survive)
  rule 4    drop standalone numbers, except HTTP status and exit codes
  rule 5    drop trailing single-letter tokens at end of line
  rule 6    collapse whitespace runs, drop blank lines
  rule 7    drop duplicate lines, keeping the first occurrence

The chain is deterministic and idempotent: processing an already
processed log changes nothing. Placeholder tokens are chosen so they
survive every later rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, asdict
from statistics import median
from typing import Iterable, List, Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .errors import UndefinedStatisticError

URL_TOKEN = "<URL>"
FILEPATH_TOKEN = "<FILEPATH>"
DIRPATH_TOKEN = "<DIRPATH>"
DURATION_TOKEN = "<DURATION>"
VERSION_TOKEN = "<VERSION>"
ID_TOKEN = "<ID>"

PLACEHOLDER_TOKENS = (
    URL_TOKEN,
    FILEPATH_TOKEN,
    DIRPATH_TOKEN,
    DURATION_TOKEN,
    VERSION_TOKEN,
    ID_TOKEN,
)

_PLACEHOLDER_RX = re.compile("(" + "|".join(re.escape(t) for t in PLACEHOLDER_TOKENS) + ")")

# Transport noise: CSI/OSC escape sequences and GitLab runner section markers.
_ANSI_CSI_RX = re.compile(r"\x1b\[[0-9;?]*[ -/]*[@-~]")
_ANSI_OSC_RX = re.compile(r"\x1b\][^\x07\x1b]*(?:\x07|\x1b\\)")
_ANSI_OTHER_RX = re.compile(r"\x1b.")
_SECTION_MARKER_RX = re.compile(r"section_(?:start|end):\d+:[A-Za-z0-9_.\-\[\],=]+\r?")

_URL_RX = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*://[^\s<>]+")
# Windows drive paths; classified into file vs dir like unix paths.
_WINPATH_RX = re.compile(r"\b[A-Za-z]:[\\/][^\s<>]*")
# Any run of path characters containing at least one separator. The
# callback rejects matches without a letter so counters like "3/5" are
# left for the number rule instead of becoming <DIRPATH>.
_UNIXPATH_RX = re.compile(r"(?:~|\.{1,2})?/?[A-Za-z0-9_.+\-]*(?:/[A-Za-z0-9_.+\-]*)+")
_DURATION_RX = re.compile(r"\b\d+(?:\.\d+)?(?:ms|s|sec|m|min|h|hr)\b")
_VERSION_RX = re.compile(r"\bv?\d+(?:\.\d+){1,3}\b")

_LETTER_RX = re.compile(r"[A-Za-z]")
_DIGIT_RX = re.compile(r"[0-9]")
_NON_ALNUM_RX = re.compile(r"[^A-Za-z0-9 \t]")
_TRAILING_SINGLE_RX = re.compile(r"(?:^|\s)[A-Za-z][ \t]*$")

_HTTP_KEYWORDS = frozenset({"http", "status"})
_EXIT_BIGRAMS = frozenset({("exit", "code"), ("exit", "status")})

_RULE_FIELDS = {
    1: "rule1_placeholders",
    2: "rule2_ids",
    3: "rule3_charset",
    4: "rule4_numbers",
    5: "rule5_trailing_singles",
    6: "rule6_whitespace",
    7: "rule7_dedup",
}


@dataclass
class PrepConfig:
    """Toggles for the pre-processing chain. Everything defaults on."""

    ansi_strip: bool = True
    rule1_placeholders: bool = True
    rule2_ids: bool = True
    rule3_charset: bool = True
    rule4_numbers: bool = True
    rule5_trailing_singles: bool = True
    rule6_whitespace: bool = True
    rule7_dedup: bool = True
    protect_http_status: bool = True
    protect_exit_codes: bool = True

    def disable_rule(self, number: int) -> "PrepConfig":
        if number not in _RULE_FIELDS:
            raise ValueError(f"no such rule: {number} (valid: 1..7)")
        cfg = PrepConfig(**asdict(self))
        setattr(cfg, _RULE_FIELDS[number], False)
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PrepConfig":
        return cls(**d)


@dataclass
class ProcessedLog:
    text: str
    original_bytes: int
    processed_bytes: int
    reduction: float


def _strip_transport_noise(text: str) -> str:
    text = _ANSI_OSC_RX.sub("", text)
    text = _ANSI_CSI_RX.sub("", text)
    text = _ANSI_OTHER_RX.sub("", text)
    text = _SECTION_MARKER_RX.sub("", text)
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _classify_path(token: str) -> str:
    sep = "\\" if "\\" in token else "/"
    last = token.split(sep)[-1]
    if last and "." in last:
        return FILEPATH_TOKEN
    return DIRPATH_TOKEN


def _sub_winpath(m: re.Match) -> str:
    return _classify_path(m.group(0))


def _sub_unixpath(m: re.Match) -> str:
    token = m.group(0)
    if not _LETTER_RX.search(token):
        return token
    return _classify_path(token)


def _apply_rule1(line: str) -> str:
    line = _URL_RX.sub(URL_TOKEN, line)
    line = _WINPATH_RX.sub(_sub_winpath, line)
    line = _UNIXPATH_RX.sub(_sub_unixpath, line)
    line = _DURATION_RX.sub(DURATION_TOKEN, line)
    line = _VERSION_RX.sub(VERSION_TOKEN, line)
    return line


def _map_segments(token: str, fn) -> str:
    """Apply fn to the sub-segments of a token between placeholder tokens."""
    parts = _PLACEHOLDER_RX.split(token)
    for i in range(0, len(parts), 2):  # even indices are non-placeholder text
        parts[i] = fn(parts[i])
    return "".join(parts)


def _apply_rule2(line: str) -> str:
    def seg_to_id(seg: str) -> str:
        if _LETTER_RX.search(seg) and _DIGIT_RX.search(seg):
            return ID_TOKEN
        return seg

    pieces = re.split(r"(\s+)", line)
    for i, piece in enumerate(pieces):
        if piece and not piece.isspace():
            pieces[i] = _map_segments(piece, seg_to_id)
    return "".join(pieces)


def _apply_rule3(line: str) -> str:
    # Replace, never delete: deleting "?" in "0?A" would glue two
    # tokens into a fresh mixed run and break idempotence.
    return _map_segments(line, lambda seg: _NON_ALNUM_RX.sub(" ", seg))


def _apply_rule4(line: str, cfg: PrepConfig) -> str:
    pieces = re.split(r"(\s+)", line)
    tokens = [(i, p) for i, p in enumerate(pieces) if p and not p.isspace()]
    words = [p for _, p in tokens]

    def protected(pos: int, value: str) -> bool:
        prev1 = words[pos - 1].lower() if pos >= 1 else ""
        prev2 = words[pos - 2].lower() if pos >= 2 else ""
        if cfg.protect_http_status and (
            prev1 in _HTTP_KEYWORDS or prev2 in _HTTP_KEYWORDS
        ):
            if value.isdigit() and 100 <= int(value) <= 599:
                return True
        if cfg.protect_exit_codes and (prev2, prev1) in _EXIT_BIGRAMS:
            return True
        return False

    for pos, (i, token) in enumerate(tokens):
        if token.isdigit():
            if not protected(pos, token):
                pieces[i] = ""
        elif _PLACEHOLDER_RX.search(token):
            # digit runs glued to a placeholder are variable data, never
            # a standalone protected code
            pieces[i] = _map_segments(token, lambda seg: "" if seg.isdigit() else seg)
    return "".join(pieces)


def _apply_rule5(line: str) -> str:
    while True:
        stripped = line.rstrip()
        if _LETTER_RX.fullmatch(stripped):
            return ""
        new = _TRAILING_SINGLE_RX.sub("", line)
        if new == line:
            return line
        line = new


def preprocess(raw_log: str, cfg: Optional[PrepConfig] = None) -> ProcessedLog:
    """Run the full rule chain over one raw log."""
    cfg = cfg or PrepConfig()
    original_bytes = len(raw_log.encode("utf-8"))
    if not raw_log:
        return ProcessedLog(text="", original_bytes=0, processed_bytes=0, reduction=0.0)

    text = _strip_transport_noise(raw_log) if cfg.ansi_strip else raw_log
    out_lines: List[str] = []
    seen = set()
    for line in text.split("\n"):
        if cfg.rule1_placeholders:
            line = _apply_rule1(line)
        if cfg.rule2_ids:
            line = _apply_rule2(line)
        if cfg.rule3_charset:
            line = _apply_rule3(line)
        if cfg.rule4_numbers:
            line = _apply_rule4(line, cfg)
        if cfg.rule5_trailing_singles:
            line = _apply_rule5(line)
        if cfg.rule6_whitespace:
            line = " ".join(line.split())
            if not line:
                continue
        if cfg.rule7_dedup:
            if line in seen:
                continue
            seen.add(line)
        out_lines.append(line)

    processed = "\n".join(out_lines)
    processed_bytes = len(processed.encode("utf-8"))
    reduction = 1.0 - processed_bytes / original_bytes if original_bytes else 0.0
    return ProcessedLog(
        text=processed,
        original_bytes=original_bytes,
        processed_bytes=processed_bytes,
        reduction=reduction,
    )


def reduction_stats(logs: Sequence[ProcessedLog]) -> dict:
    """Aggregate size-reduction ratios over a batch of processed logs."""
    if not logs:
        raise UndefinedStatisticError("reduction stats need at least one log")
    ratios = [p.reduction for p in logs]
    return {
        "mean": sum(ratios) / len(ratios),
        "median": median(ratios),
        "min": min(ratios),
        "max": max(ratios),
    }


class LogPreprocessor(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping the rule chain.

    fit() is a no-op; transform() maps raw log texts to processed texts
    so the preprocessor composes with sklearn pipelines.
    """

    def __init__(self, config: Optional[PrepConfig] = None):
        self.config = config

    def _cfg(self) -> PrepConfig:
        return self.config or PrepConfig()

    def fit(self, X: Iterable[str], y=None) -> "LogPreprocessor":
        return self

    def transform(self, X: Iterable[str]) -> List[str]:
        cfg = self._cfg()
        return [preprocess(text, cfg).text for text in X]

    def process(self, raw_log: str) -> ProcessedLog:
        """Single-log variant that also reports size statistics."""
        return preprocess(raw_log, self._cfg())
