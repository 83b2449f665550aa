"""Levenshtein scoring and private/public split reporting.

The distance is the classic unit-cost edit distance over Unicode scalar
values, computed with the Myers/Hyyro bit-parallel recurrence. Python's
arbitrary-precision ints act as the bit vector, so one pass over the
second string costs O(len(a)/word) big-int operations regardless of
pattern length. Agreement with a full DP-matrix reference is enforced by
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Optional, Sequence

from .errors import EmptySplitError, FormatError, MissingGoldError, UnassignedIdError

if TYPE_CHECKING:
    from .pipeline import StageCounters

REPORT_DECIMALS = 4


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimal number of single-element insertions, deletions and
    substitutions transforming `a` into `b`.

    Works on strings (elements are Unicode scalar values) and on any
    hashable-element sequence, e.g. token tuples.
    """
    if a == b:
        return 0
    # Common affixes never contribute edits; trimming keeps the bit
    # vector short.
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a = a[lo:hi_a]
    b = b[lo:hi_b]
    if not a:
        return len(b)
    if not b:
        return len(a)

    m = len(a)
    peq: dict = {}
    for i, ch in enumerate(a):
        peq[ch] = peq.get(ch, 0) | (1 << i)
    mask = (1 << m) - 1
    top = 1 << (m - 1)
    pv = mask
    mv = 0
    dist = m
    for ch in b:
        eq = peq.get(ch, 0)
        xv = eq | mv
        xh = ((((eq & pv) + pv) ^ pv) | eq) & mask
        ph = mv | (~(xh | pv) & mask)
        mh = pv & xh
        if ph & top:
            dist += 1
        elif mh & top:
            dist -= 1
        ph = ((ph << 1) | 1) & mask
        mh = (mh << 1) & mask
        pv = mh | (~(xv | ph) & mask)
        mv = ph & xv
    return dist


class Side(Enum):
    PRIVATE = "Private"
    PUBLIC = "Public"


@dataclass(frozen=True)
class SplitAssignment:
    """Partition of record ids into the Private and Public halves."""

    sides: Mapping[str, Side]

    def side_of(self, record_id: str) -> Side:
        try:
            return self.sides[record_id]
        except KeyError:
            raise UnassignedIdError(record_id) from None

    @classmethod
    def alternating(cls, ids: Sequence[str]) -> "SplitAssignment":
        """Deterministic 50-50 stand-in: sorted ids alternate Private/Public."""
        sides = {
            rec_id: (Side.PRIVATE if i % 2 == 0 else Side.PUBLIC)
            for i, rec_id in enumerate(sorted(ids))
        }
        return cls(sides=sides)

    @classmethod
    def load(cls, path: str | Path) -> "SplitAssignment":
        sides: dict[str, Side] = {}
        by_value = {s.value: s for s in Side}
        with open(path, encoding="utf-8") as fh:
            first = fh.readline().rstrip("\n")
            if first != "id\tsplit":
                raise FormatError(1, "expected header 'id\\tsplit'", path=str(path))
            for line_no, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                cells = line.split("\t")
                if len(cells) != 2 or cells[1] not in by_value:
                    raise FormatError(
                        line_no, "expected 'id\\tPrivate|Public'", path=str(path)
                    )
                sides[cells[0]] = by_value[cells[1]]
        return cls(sides=sides)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("id\tsplit\n")
            for rec_id in sorted(self.sides):
                fh.write(f"{rec_id}\t{self.sides[rec_id].value}\n")


@dataclass(frozen=True)
class EvalReport:
    """Average distances per split plus their mean, one ablation row."""

    variant: Optional[str]
    private_avg: float
    public_avg: float
    aggregated: float
    counters: Optional["StageCounters"]
    n: int

    def to_dict(self) -> dict:
        d = {
            "variant": self.variant,
            "private_avg": round(self.private_avg, REPORT_DECIMALS),
            "public_avg": round(self.public_avg, REPORT_DECIMALS),
            "aggregated": round(self.aggregated, REPORT_DECIMALS),
            "n": self.n,
        }
        if self.counters is not None:
            d["counters"] = self.counters.to_dict()
        return d


def per_record_distances(
    preds: Mapping[str, str], golds: Mapping[str, str]
) -> dict[str, int]:
    dists: dict[str, int] = {}
    for rec_id, predicted in preds.items():
        if rec_id not in golds:
            raise MissingGoldError(f"no gold for prediction id {rec_id!r}")
        dists[rec_id] = levenshtein(predicted, golds[rec_id])
    return dists


def average_distance(preds: Mapping[str, str], golds: Mapping[str, str]) -> float:
    """Arithmetic mean of per-record Levenshtein distances."""
    dists = per_record_distances(preds, golds)
    if not dists:
        return 0.0
    return sum(dists.values()) / len(dists)


def split_report(
    preds: Mapping[str, str],
    golds: Mapping[str, str],
    split: SplitAssignment,
    counters=None,
    variant: str | None = None,
) -> EvalReport:
    """Per-split means plus their average as the aggregated score.

    The aggregated score is the mean of the two split means, not the
    global mean; the two coincide only for an exactly even split.
    """
    sums = {Side.PRIVATE: 0, Side.PUBLIC: 0}
    counts = {Side.PRIVATE: 0, Side.PUBLIC: 0}
    for rec_id, dist in per_record_distances(preds, golds).items():
        side = split.side_of(rec_id)
        sums[side] += dist
        counts[side] += 1
    for side in Side:
        if counts[side] == 0:
            raise EmptySplitError(f"{side.value} split is empty; its mean is undefined")
    private_avg = sums[Side.PRIVATE] / counts[Side.PRIVATE]
    public_avg = sums[Side.PUBLIC] / counts[Side.PUBLIC]
    return EvalReport(
        variant=variant,
        private_avg=private_avg,
        public_avg=public_avg,
        aggregated=(private_avg + public_avg) / 2,
        counters=counters,
        n=counts[Side.PRIVATE] + counts[Side.PUBLIC],
    )
