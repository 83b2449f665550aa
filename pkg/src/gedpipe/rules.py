"""Rule-based error detection and rule mining.

Two rule kinds, mirroring the two replace loops of the fallback detector:
common error words are matched as whole tokens (bounded by whitespace,
punctuation, or string edges), literal rules as raw substrings. A
character already inside a produced span is never wrapped again, so the
output always carries well-formed, non-nested markers.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import MARKER, CorpusRecord, MarkedSentence, Span, strip_markers
from .errors import MarkedInputError, MissingGoldError

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class RuleSet:
    """Mined always-erroneous words plus literal substring patterns."""

    common_error_words: frozenset[str] = frozenset()
    literal_rules: tuple[str, ...] = ()

    def __post_init__(self):
        for rule in list(self.common_error_words) + list(self.literal_rules):
            if not rule:
                raise ValueError("empty rule")
            if MARKER in rule:
                raise ValueError(f"rule {rule!r} contains the reserved marker")

    @classmethod
    def build(
        cls, common_error_words: Iterable[str] = (), literal_rules: Iterable[str] = ()
    ) -> "RuleSet":
        """Deduplicate and order: literal rules longest-first, ties lexicographic."""
        ordered = sorted(set(literal_rules), key=lambda r: (-len(r), r))
        return cls(
            common_error_words=frozenset(common_error_words),
            literal_rules=tuple(ordered),
        )

    @classmethod
    def load(cls, path: str | Path) -> "RuleSet":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.build(
            common_error_words=data.get("common_error_words", []),
            literal_rules=data.get("literal_rules", []),
        )

    def save(self, path: str | Path) -> None:
        data = {
            "common_error_words": sorted(self.common_error_words),
            "literal_rules": list(self.literal_rules),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh, ensure_ascii=False, indent=2)
            fh.write("\n")

    def merged_words(self, words: Iterable[str]) -> "RuleSet":
        return RuleSet.build(
            common_error_words=self.common_error_words | set(words),
            literal_rules=self.literal_rules,
        )


@dataclass(frozen=True)
class MiningConfig:
    """Thresholds for learning common error words from training data."""

    min_support: int = 3
    min_precision: float = 0.95

    def __post_init__(self):
        if self.min_support < 1:
            raise ValueError("min_support must be >= 1")
        if not 0 < self.min_precision <= 1:
            raise ValueError("min_precision must be in (0, 1]")


def _is_boundary(text: str, pos: int) -> bool:
    """Whole-token boundary: string edge, whitespace, or punctuation."""
    if pos < 0 or pos >= len(text):
        return True
    ch = text[pos]
    return ch.isspace() or unicodedata.category(ch).startswith("P")


def _whole_token_occurrences(sentence: str, word: str) -> list[Span]:
    spans: list[Span] = []
    start = sentence.find(word)
    while start != -1:
        end = start + len(word)
        if _is_boundary(sentence, start - 1) and _is_boundary(sentence, end):
            spans.append((start, end))
        start = sentence.find(word, start + 1)
    return spans


def detect_spans(sentence: str, rules: RuleSet) -> list[Span]:
    """Spans the rule set would mark, in left-to-right order.

    Common error words fire first (longest first among them), then the
    literal rules longest-first; a position already covered is skipped.
    """
    covered = [False] * len(sentence)
    spans: list[Span] = []

    def claim(start: int, end: int) -> None:
        if any(covered[start:end]):
            return
        for i in range(start, end):
            covered[i] = True
        spans.append((start, end))

    for word in sorted(rules.common_error_words, key=lambda w: (-len(w), w)):
        for start, end in _whole_token_occurrences(sentence, word):
            claim(start, end)
    for rule in rules.literal_rules:
        start = sentence.find(rule)
        while start != -1:
            claim(start, start + len(rule))
            start = sentence.find(rule, start + 1)
    return sorted(spans)


def regex_correction(sentence: str, rules: RuleSet) -> str:
    """Wrap every rule hit in the sentence as `$match$`."""
    if MARKER in sentence:
        raise MarkedInputError(f"sentence already contains {MARKER!r}: {sentence!r}")
    spans = detect_spans(sentence, rules)
    if not spans:
        return sentence
    return MarkedSentence.from_plain(sentence, spans).raw


def mine_common_errors(train: list[CorpusRecord], cfg: MiningConfig = MiningConfig()) -> RuleSet:
    """Learn tokens that are (nearly) always inside gold error spans.

    A token occurrence is in-span when its interval lies fully inside one
    gold span. Tokens pass with in-span count >= min_support and in-span
    fraction >= min_precision, both inclusive.
    """
    total: dict[str, int] = {}
    in_span: dict[str, int] = {}
    for rec in train:
        if rec.gold is None:
            raise MissingGoldError(f"record {rec.id!r} has no gold annotation")
        gold = rec.gold
        for m in _TOKEN_RE.finditer(gold.plain):
            token = m.group()
            total[token] = total.get(token, 0) + 1
            if any(s <= m.start() and m.end() <= e for s, e in gold.spans):
                in_span[token] = in_span.get(token, 0) + 1
    words = {
        token
        for token, hits in in_span.items()
        if hits >= cfg.min_support and hits / total[token] >= cfg.min_precision
    }
    return RuleSet.build(common_error_words=words)


def load_wordlist(path: str | Path) -> set[str]:
    """One token per line; blank lines are skipped with a warning."""
    tokens: set[str] = set()
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            token = line.strip()
            if not token:
                skipped += 1
                continue
            tokens.add(token)
    if skipped:
        logger.warning("skipped %d empty line(s) in %s", skipped, path)
    return tokens
