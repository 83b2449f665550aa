"""Repair a seq2seq model's output until, markers aside, it reproduces the
input character-for-character.

Three attempts per sentence, in order:

1. char_correct: a synchronized scan over (output, input). Matching
   characters are copied, `$` in the output is copied, and a mismatched
   output character is accepted when the confusable table maps it to the
   character the input holds at that position. Anything else stops the
   scan with a Mismatch position pair.
2. word_correct: whole output tokens are replaced by their positionally
   aligned input tokens (markers re-attached), then char_correct runs
   once more. At most one word-level retry per sentence.
3. On a second failure the caller falls back to rule-based detection on
   the bare input; no partial character-level progress is merged in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Union

from .corpus import MARKER, strip_markers
from .errors import AlignmentFailedError, FormatError
from .evaluation import levenshtein
from .stages import Stage
from .rules import RuleSet, regex_correction

_WS_SPLIT_RE = re.compile(r"(\s+)")


@dataclass(frozen=True)
class CharLookupTable:
    """Map from a model-emitted character to the canonical input character
    it stands for. Keys and values are single characters, never `$`, and
    never map a character to itself."""

    entries: Mapping[str, str]

    def __post_init__(self):
        for wrong, right in self.entries.items():
            if len(wrong) != 1 or len(right) != 1:
                raise ValueError(f"table entries must be single characters: {wrong!r} -> {right!r}")
            if wrong == right:
                raise ValueError(f"table must not map {wrong!r} to itself")
            if MARKER in (wrong, right):
                raise ValueError(f"{MARKER!r} cannot appear in the lookup table")

    @classmethod
    def load(cls, path: str | Path) -> "CharLookupTable":
        """Read a two-column wrong<TAB>right TSV; # starts a comment line."""
        entries: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                cells = line.split("\t")
                if len(cells) != 2:
                    raise FormatError(line_no, "expected wrong<TAB>right", path=str(path))
                entries[cells[0]] = cells[1]
        return cls(entries=entries)

    @classmethod
    def default(cls) -> "CharLookupTable":
        """The Bangla confusable pairs shipped with the package."""
        from importlib.resources import files

        path = files("gedpipe").joinpath("data/char_table.tsv")
        entries: dict[str, str] = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            wrong, right = line.split("\t")
            entries[wrong] = right
        return cls(entries=entries)

    def inverted(self) -> dict[str, str]:
        """right -> wrong map for the synthetic degrader; when several
        wrong forms share a right form, the smallest wrong wins."""
        inv: dict[str, str] = {}
        for wrong, right in self.entries.items():
            if right not in inv or wrong < inv[right]:
                inv[right] = wrong
        return inv


@dataclass(frozen=True)
class Corrected:
    text: str
    replacements: int = 0


@dataclass(frozen=True)
class Mismatch:
    pos_input: int
    pos_output: int


CharCorrectResult = Union[Corrected, Mismatch]


@dataclass(frozen=True)
class ReconcileOutcome:
    result: str
    stage: Stage
    replacements: int = 0


def char_correct(t5_output: str, t5_input: str, table: CharLookupTable) -> CharCorrectResult:
    """Synchronized character scan; see the module docstring.

    Boundary cases the scan defines explicitly: with the input exhausted,
    remaining output characters succeed only if they are all `$`; with
    the output exhausted but input remaining, the result is a Mismatch at
    the end positions.
    """
    out: list[str] = []
    entries = table.entries
    i1 = 0
    i2 = 0
    n1 = len(t5_input)
    n2 = len(t5_output)
    replacements = 0
    while True:
        if i1 == n1 and i2 == n2:
            return Corrected("".join(out), replacements)
        if i1 < n1 and i2 < n2 and t5_input[i1] == t5_output[i2]:
            out.append(t5_input[i1])
            i1 += 1
            i2 += 1
            continue
        if i2 < n2 and t5_output[i2] == MARKER:
            out.append(MARKER)
            i2 += 1
            continue
        if (
            i1 < n1
            and i2 < n2
            and entries.get(t5_output[i2]) == t5_input[i1]
        ):
            out.append(t5_input[i1])
            i1 += 1
            i2 += 1
            replacements += 1
            continue
        return Mismatch(i1, i2)


def _token_markers(token: str) -> tuple[str, str, str]:
    """Split a token into (leading markers, core, trailing markers)."""
    start = 0
    end = len(token)
    while start < end and token[start] == MARKER:
        start += 1
    while end > start and token[end - 1] == MARKER:
        end -= 1
    return token[:start], token[start:end], token[end:]


def word_correct(t5_output: str, t5_input: str) -> str:
    """Replace respelled output tokens wholesale with their aligned input
    tokens, re-attaching each token's leading/trailing markers.

    Tokens are whitespace-delimited; marker-only tokens pass through in
    place and do not participate in alignment. Raises AlignmentFailedError
    when the content token counts differ (truncated output) or when the
    minimal token-level alignment needs insertions or deletions, i.e. the
    output is scrambled beyond word substitution. With equal counts and a
    substitution-only alignment, pairing is positional.
    """
    pieces = _WS_SPLIT_RE.split(t5_output)
    content_idx = [
        i for i in range(0, len(pieces), 2) if pieces[i] and strip_markers(pieces[i])
    ]
    in_tokens = t5_input.split()
    if len(content_idx) != len(in_tokens):
        raise AlignmentFailedError(
            f"{len(content_idx)} output tokens vs {len(in_tokens)} input tokens"
        )
    if not in_tokens:
        return t5_output
    stripped = [strip_markers(pieces[i]) for i in content_idx]
    positional_cost = sum(1 for s, t in zip(stripped, in_tokens) if s != t)
    if levenshtein(stripped, in_tokens) < positional_cost:
        raise AlignmentFailedError("output tokens scrambled beyond word substitution")
    for j, i in enumerate(content_idx):
        if stripped[j] == in_tokens[j]:
            continue
        lead, core, trail = _token_markers(pieces[i])
        if MARKER in core:
            # Markers buried mid-token: leave the token alone and let the
            # char-level rescan surface the mismatch.
            continue
        pieces[i] = lead + in_tokens[j] + trail
    return "".join(pieces)


def reconcile(
    t5_output: str,
    t5_input: str,
    table: CharLookupTable,
    ruleset: RuleSet,
) -> ReconcileOutcome:
    """Full correction chain for one sentence; every input produces an
    outcome. Word-level correction is attempted exactly once, after which
    the rule-based fallback takes over on the bare input.

    An output with an odd marker count is structurally invalid and goes
    straight to the fallback: char/word results must keep the output's
    marker count, and that count must end up even.
    """
    if t5_output.count(MARKER) % 2:
        return ReconcileOutcome(regex_correction(t5_input, ruleset), Stage.REGEX_FALLBACK)
    first = char_correct(t5_output, t5_input, table)
    if isinstance(first, Corrected):
        return ReconcileOutcome(first.text, Stage.CHAR_LEVEL, first.replacements)
    try:
        reworded = word_correct(t5_output, t5_input)
    except AlignmentFailedError:
        reworded = None
    if reworded is not None:
        second = char_correct(reworded, t5_input, table)
        if isinstance(second, Corrected):
            return ReconcileOutcome(second.text, Stage.WORD_LEVEL, second.replacements)
    return ReconcileOutcome(regex_correction(t5_input, ruleset), Stage.REGEX_FALLBACK)
