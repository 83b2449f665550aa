"""Marked-sentence corpus: data model, parsing, serialization, TSV I/O, stats.

A marked sentence brackets each erroneous segment with a pair of `$`
symbols. Markers toggle: the text between the (2k+1)-th and (2k+2)-th `$`
is one error span. `$$` marks a zero-width omission error. Span indices
are Unicode scalar-value offsets into the marker-free sentence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import FormatError, MissingGoldError, OddMarkerCountError
from .textnorm import NormConfig, normalize

MARKER = "$"

TRAIN_HEADER = ("id", "input", "gold")
TEST_HEADER = ("id", "input")
PREDICTIONS_HEADER = ("id", "predicted")

Span = tuple[int, int]


def strip_markers(marked: str) -> str:
    """Remove every `$` from the text; no other change."""
    return marked.replace(MARKER, "")


@dataclass(frozen=True)
class MarkedSentence:
    """A sentence plus its error spans, in both plain and marked form.

    plain: the sentence with all markers removed.
    spans: half-open (start, end) character intervals into `plain`,
           sorted, non-overlapping; an empty span marks an omission.
    raw:   the original marked form, preserved byte-exact.
    """

    plain: str
    spans: tuple[Span, ...]
    raw: str

    def __post_init__(self):
        prev_end = 0
        for start, end in self.spans:
            if not (0 <= start <= end <= len(self.plain)):
                raise ValueError(f"span ({start}, {end}) out of bounds for {self.plain!r}")
            if start < prev_end:
                raise ValueError(f"span ({start}, {end}) overlaps a previous span")
            prev_end = end
        if render_marked(self.plain, self.spans) != self.raw:
            raise ValueError(
                f"raw form {self.raw!r} does not round-trip from plain {self.plain!r} "
                f"and spans {self.spans!r}"
            )

    @classmethod
    def from_plain(cls, plain: str, spans: Iterable[Span] = ()) -> "MarkedSentence":
        spans = tuple(spans)
        return cls(plain=plain, spans=spans, raw=render_marked(plain, spans))

    def span_texts(self) -> list[str]:
        return [self.plain[s:e] for s, e in self.spans]


def parse_marked(line: str) -> MarkedSentence:
    """Parse a marked sentence, extracting spans by marker toggling.

    Raises OddMarkerCountError on marker parity violations; a malformed
    gold record is rejected, never repaired.
    """
    count = line.count(MARKER)
    if count % 2:
        raise OddMarkerCountError(line, count)
    plain_parts: list[str] = []
    spans: list[Span] = []
    pos = 0
    open_start: int | None = None
    for ch in line:
        if ch == MARKER:
            if open_start is None:
                open_start = pos
            else:
                spans.append((open_start, pos))
                open_start = None
        else:
            plain_parts.append(ch)
            pos += 1
    return MarkedSentence(plain="".join(plain_parts), spans=tuple(spans), raw=line)


def render_marked(plain: str, spans: Iterable[Span]) -> str:
    """Re-insert `$` at each span boundary; inverse of parse_marked."""
    boundaries: list[int] = []
    for start, end in spans:
        boundaries.append(start)
        boundaries.append(end)
    out: list[str] = []
    b = 0
    for i, ch in enumerate(plain):
        while b < len(boundaries) and boundaries[b] == i:
            out.append(MARKER)
            b += 1
        out.append(ch)
    out.append(MARKER * (len(boundaries) - b))
    return "".join(out)


@dataclass(frozen=True)
class CorpusRecord:
    """One corpus row: an opaque id, the unmarked input sentence, and,
    for train-schema data, its gold marked form."""

    id: str
    input: str
    gold: Optional[MarkedSentence] = None


@dataclass(frozen=True)
class CorpusStats:
    total: int
    with_error: int
    num_errors: int


def corpus_stats(records: list[CorpusRecord]) -> CorpusStats:
    """Count records, records with >=1 error span, and total spans."""
    with_error = 0
    num_errors = 0
    for rec in records:
        if rec.gold is None:
            raise MissingGoldError(f"record {rec.id!r} has no gold annotation")
        if rec.gold.spans:
            with_error += 1
            num_errors += len(rec.gold.spans)
    return CorpusStats(total=len(records), with_error=with_error, num_errors=num_errors)


def _read_tsv_rows(path: str | Path, header: tuple[str, ...]):
    """Yield (line_no, cells) for each non-blank data line; validates the header."""
    path = Path(path)
    expected = "\t".join(header)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if first.rstrip("\n") != expected:
            raise FormatError(1, f"expected header {expected!r}", path=str(path))
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != len(header):
                raise FormatError(
                    line_no,
                    f"expected {len(header)} tab-separated columns, got {len(cells)}",
                    path=str(path),
                )
            yield line_no, cells


def load_corpus(
    path: str | Path,
    schema: str = "train",
    norm: NormConfig | None = None,
) -> list[CorpusRecord]:
    """Load a TSV corpus. schema "train" expects id/input/gold columns,
    "test" expects id/input.

    When `norm` is given, gold.plain must equal the input column after
    normalization; otherwise they must match exactly. A mismatch, a `$`
    in the input column, or a marker parity violation is a FormatError
    carrying the offending line number.
    """
    if schema not in ("train", "test"):
        raise ValueError(f"unknown corpus schema {schema!r}")
    header = TRAIN_HEADER if schema == "train" else TEST_HEADER
    records: list[CorpusRecord] = []
    for line_no, cells in _read_tsv_rows(path, header):
        rec_id, input_text = cells[0], cells[1]
        if MARKER in input_text:
            raise FormatError(
                line_no, f"reserved marker {MARKER!r} in input column", path=str(path)
            )
        gold = None
        if schema == "train":
            try:
                gold = parse_marked(cells[2])
            except OddMarkerCountError as exc:
                raise FormatError(line_no, str(exc), path=str(path)) from exc
            if norm is not None:
                matches = normalize(gold.plain, norm) == normalize(input_text, norm)
            else:
                matches = gold.plain == input_text
            if not matches:
                raise FormatError(
                    line_no,
                    f"gold with markers removed does not reproduce input for id {rec_id!r}",
                    path=str(path),
                )
        records.append(CorpusRecord(id=rec_id, input=input_text, gold=gold))
    return records


def write_corpus(path: str | Path, records: list[CorpusRecord], schema: str = "train") -> None:
    if schema not in ("train", "test"):
        raise ValueError(f"unknown corpus schema {schema!r}")
    header = TRAIN_HEADER if schema == "train" else TEST_HEADER
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for rec in records:
            if schema == "train":
                if rec.gold is None:
                    raise MissingGoldError(f"record {rec.id!r} has no gold annotation")
                fh.write(f"{rec.id}\t{rec.input}\t{rec.gold.raw}\n")
            else:
                fh.write(f"{rec.id}\t{rec.input}\n")


def read_predictions(path: str | Path) -> dict[str, str]:
    """Read a predictions TSV (id -> predicted marked sentence)."""
    preds: dict[str, str] = {}
    for line_no, cells in _read_tsv_rows(path, PREDICTIONS_HEADER):
        rec_id, predicted = cells
        if rec_id in preds:
            raise FormatError(line_no, f"duplicate prediction id {rec_id!r}", path=str(path))
        preds[rec_id] = predicted
    return preds


def write_predictions(path: str | Path, preds: dict[str, str]) -> None:
    """Write predictions sorted by record id."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(PREDICTIONS_HEADER) + "\n")
        for rec_id in sorted(preds):
            fh.write(f"{rec_id}\t{preds[rec_id]}\n")
