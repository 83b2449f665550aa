"""Exact-match retrieval of gold-marked sentences seen in training data."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .corpus import CorpusRecord, strip_markers
from .errors import FormatError, MissingGoldError
from .textnorm import NormConfig, normalize

logger = logging.getLogger(__name__)

LOOKUP_HEADER = ("plain", "marked")


@dataclass(frozen=True)
class SentenceLookup:
    """Map from normalized plain sentence to its gold marked form.

    conflicts counts duplicate training inputs whose gold disagreed; the
    first occurrence wins. Matching is exact, no fuzzy retrieval.
    """

    entries: Mapping[str, str]
    conflicts: int = 0

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t".join(LOOKUP_HEADER) + "\n")
            for plain in sorted(self.entries):
                fh.write(f"{plain}\t{self.entries[plain]}\n")

    @classmethod
    def load(cls, path: str | Path) -> "SentenceLookup":
        entries: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            first = fh.readline().rstrip("\n")
            if first != "\t".join(LOOKUP_HEADER):
                raise FormatError(1, "expected header 'plain\\tmarked'", path=str(path))
            for line_no, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                cells = line.split("\t")
                if len(cells) != 2:
                    raise FormatError(line_no, "expected plain<TAB>marked", path=str(path))
                entries[cells[0]] = cells[1]
        return cls(entries=entries)


def build_lookup(train: list[CorpusRecord], cfg: NormConfig = NormConfig()) -> SentenceLookup:
    """One entry per unique normalized input; conflicting duplicates keep
    the first gold and are counted."""
    entries: dict[str, str] = {}
    conflicts = 0
    for rec in train:
        if rec.gold is None:
            raise MissingGoldError(f"record {rec.id!r} has no gold annotation")
        key = normalize(rec.input, cfg)
        value = normalize(rec.gold.raw, cfg)
        if strip_markers(value) != key:
            logger.warning(
                "record %s: gold does not strip back to its input after "
                "normalization; skipped", rec.id,
            )
            continue
        if key in entries:
            if entries[key] != value:
                conflicts += 1
                logger.warning("record %s: conflicting gold for duplicate input", rec.id)
            continue
        entries[key] = value
    return SentenceLookup(entries=entries, conflicts=conflicts)


def find(sentence: str, table: SentenceLookup, cfg: NormConfig = NormConfig()) -> Optional[str]:
    """The stored marked form iff the normalized sentence is a key."""
    return table.entries.get(normalize(sentence, cfg))
