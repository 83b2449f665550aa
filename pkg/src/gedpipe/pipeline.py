"""Per-sentence fallback chain and the ablation variants it is sliced into.

Stage order for the full chain: sentence lookup, character-level
correction, word-level retry, rule-based fallback. Each ablation variant
enables a prefix-free subset of those stages; when every enabled stage
fails and the rule fallback is disabled, the bare input is emitted so
that, markers aside, the prediction still reproduces the input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional

from .corpus import MARKER, CorpusRecord, MarkedSentence, parse_marked
from .errors import DuplicateIdError, FormatError, MissingRawOutputError
from .lookup import SentenceLookup, find
from .reconcile import CharLookupTable, Corrected, char_correct, reconcile
from .rules import RuleSet, _whole_token_occurrences, regex_correction
from .stages import Stage
from .textnorm import NormConfig, normalize

RAW_OUTPUTS_HEADER = ("id", "raw_output")


class AblationVariant(Enum):
    """The eight ablation rows, in report order. Values are row labels."""

    RAW = "Raw"
    NO_CORRECTION = "No Corr."
    REGEX_ONLY = "R"
    CC = "CC"
    CC_R = "CC+R"
    CC_WC_R = "CC+WC+R"
    CC_WC_R_L = "CC+WC+R+L"
    CC_WC_R_L_P2 = "CC+WC+R+L+P2"

    @property
    def cli_name(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_cli(cls, name: str) -> "AblationVariant":
        for variant in cls:
            if variant.cli_name == name:
                return variant
        known = ", ".join(v.cli_name for v in cls)
        raise ValueError(f"unknown variant {name!r}; expected one of: {known}")

    @property
    def uses_word_correct(self) -> bool:
        return self in (self.CC_WC_R, self.CC_WC_R_L, self.CC_WC_R_L_P2)

    @property
    def uses_regex(self) -> bool:
        return self in (
            self.REGEX_ONLY,
            self.CC_R,
            self.CC_WC_R,
            self.CC_WC_R_L,
            self.CC_WC_R_L_P2,
        )

    @property
    def uses_lookup(self) -> bool:
        return self in (self.CC_WC_R_L, self.CC_WC_R_L_P2)


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    input: str
    raw_output: Optional[str]
    predicted: str
    stage: Stage
    p2_added: int = 0


@dataclass(frozen=True)
class StageCounters:
    """How many records each mechanism resolved; sums to the record count."""

    lookup_hits: int = 0
    char_level: int = 0
    word_level: int = 0
    regex_fallback: int = 0
    raw_passthrough: int = 0
    input_passthrough: int = 0

    def to_dict(self) -> dict:
        return {
            "lookup_hits": self.lookup_hits,
            "char_level": self.char_level,
            "word_level": self.word_level,
            "regex_fallback": self.regex_fallback,
            "raw_passthrough": self.raw_passthrough,
            "input_passthrough": self.input_passthrough,
        }

    @property
    def total(self) -> int:
        return sum(self.to_dict().values())


_STAGE_FIELD = {
    Stage.LOOKUP: "lookup_hits",
    Stage.CHAR_LEVEL: "char_level",
    Stage.WORD_LEVEL: "word_level",
    Stage.REGEX_FALLBACK: "regex_fallback",
    Stage.RAW_PASSTHROUGH: "raw_passthrough",
    Stage.INPUT_PASSTHROUGH: "input_passthrough",
}


@dataclass(frozen=True)
class PipelineTables:
    char_table: CharLookupTable
    ruleset: RuleSet
    lookup: Optional[SentenceLookup] = None


def repair_marker_parity(text: str) -> str:
    """Drop the last `$` when the marker count is odd."""
    if text.count(MARKER) % 2:
        pos = text.rindex(MARKER)
        return text[:pos] + text[pos + 1 :]
    return text


def apply_p2(predicted: str, rules: RuleSet) -> tuple[str, int]:
    """Additionally wrap whole-token common error words outside existing
    spans. Existing markers are never removed or moved; returns the new
    marked text and the number of spans added."""
    sentence = parse_marked(predicted)
    taken = list(sentence.spans)
    added = []
    for word in sorted(rules.common_error_words, key=lambda w: (-len(w), w)):
        for start, end in _whole_token_occurrences(sentence.plain, word):
            if any(s < end and start < e or (s, e) == (start, end)
                   for s, e in taken):
                continue
            taken.append((start, end))
            added.append((start, end))
    if not added:
        return predicted, 0
    merged = MarkedSentence.from_plain(sentence.plain, sorted(taken))
    return merged.raw, len(added)


def _reconcile_chain(
    raw_norm: str,
    input_norm: str,
    tables: PipelineTables,
    variant: AblationVariant,
) -> tuple[str, Stage]:
    """Character/word/regex chain restricted to the variant's stages."""
    if variant.uses_word_correct:
        # Word-correcting variants all carry the regex fallback, which
        # reconcile() already applies on second failure.
        outcome = reconcile(raw_norm, input_norm, tables.char_table, tables.ruleset)
        return outcome.result, outcome.stage
    if raw_norm.count(MARKER) % 2 == 0:
        first = char_correct(raw_norm, input_norm, tables.char_table)
        if isinstance(first, Corrected):
            return first.text, Stage.CHAR_LEVEL
    if variant.uses_regex:
        return regex_correction(input_norm, tables.ruleset), Stage.REGEX_FALLBACK
    return input_norm, Stage.INPUT_PASSTHROUGH


def process_sentence(
    rec: CorpusRecord,
    raw_output: Optional[str],
    tables: PipelineTables,
    variant: AblationVariant,
    cfg: NormConfig = NormConfig(),
) -> PredictionRecord:
    """Produce one prediction; see the module docstring for stage order."""
    input_norm = normalize(rec.input, cfg)

    if variant is AblationVariant.RAW:
        if raw_output is None:
            raise MissingRawOutputError(rec.id)
        return PredictionRecord(
            rec.id, input_norm, raw_output, raw_output, Stage.RAW_PASSTHROUGH
        )

    if variant is AblationVariant.NO_CORRECTION:
        if raw_output is None:
            raise MissingRawOutputError(rec.id)
        repaired = repair_marker_parity(normalize(raw_output, cfg))
        return PredictionRecord(
            rec.id, input_norm, raw_output, repaired, Stage.RAW_PASSTHROUGH
        )

    if variant is AblationVariant.REGEX_ONLY:
        predicted = regex_correction(input_norm, tables.ruleset)
        return PredictionRecord(rec.id, input_norm, raw_output, predicted, Stage.REGEX_FALLBACK)

    predicted: Optional[str] = None
    stage: Optional[Stage] = None
    if variant.uses_lookup and tables.lookup is not None:
        hit = find(rec.input, tables.lookup, cfg)
        if hit is not None:
            predicted, stage = hit, Stage.LOOKUP
    if predicted is None:
        if raw_output is None:
            raise MissingRawOutputError(rec.id)
        predicted, stage = _reconcile_chain(
            normalize(raw_output, cfg), input_norm, tables, variant
        )

    p2_added = 0
    if variant is AblationVariant.CC_WC_R_L_P2:
        predicted, p2_added = apply_p2(predicted, tables.ruleset)
    return PredictionRecord(rec.id, input_norm, raw_output, predicted, stage, p2_added)


def run_pipeline(
    records: list[CorpusRecord],
    raw_outputs: Mapping[str, str],
    tables: PipelineTables,
    variant: AblationVariant,
    cfg: NormConfig = NormConfig(),
) -> tuple[list[PredictionRecord], StageCounters]:
    """Process records independently; predictions come back in input order
    with per-stage counts."""
    seen: set[str] = set()
    preds: list[PredictionRecord] = []
    counts = {name: 0 for name in _STAGE_FIELD.values()}
    for rec in records:
        if rec.id in seen:
            raise DuplicateIdError(rec.id)
        seen.add(rec.id)
        pred = process_sentence(rec, raw_outputs.get(rec.id), tables, variant, cfg)
        counts[_STAGE_FIELD[pred.stage]] += 1
        preds.append(pred)
    return preds, StageCounters(**counts)


def load_raw_outputs(path: str | Path) -> dict[str, str]:
    """Read the id<TAB>raw_output TSV produced by an external model run."""
    outputs: dict[str, str] = {}
    expected = "\t".join(RAW_OUTPUTS_HEADER)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != expected:
            raise FormatError(1, f"expected header {expected!r}", path=str(path))
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != 2:
                raise FormatError(line_no, "expected id<TAB>raw_output", path=str(path))
            if cells[0] in outputs:
                raise DuplicateIdError(cells[0])
            outputs[cells[0]] = cells[1]
    return outputs


def write_raw_outputs(path: str | Path, outputs: Mapping[str, str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(RAW_OUTPUTS_HEADER) + "\n")
        for rec_id in sorted(outputs):
            fh.write(f"{rec_id}\t{outputs[rec_id]}\n")


@dataclass(frozen=True)
class PipelineConfig:
    """The JSON run configuration: variant, normalization, table paths."""

    variant: AblationVariant = AblationVariant.CC_WC_R_L_P2
    norm: NormConfig = NormConfig()
    char_table_path: Optional[str] = None
    ruleset_path: Optional[str] = None
    lookup_path: Optional[str] = None
    raw_outputs_path: Optional[str] = None

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        kwargs = {}
        if "variant" in data:
            kwargs["variant"] = AblationVariant.from_cli(data["variant"])
        if "norm" in data:
            kwargs["norm"] = NormConfig.from_dict(data["norm"])
        for key in ("char_table_path", "ruleset_path", "lookup_path", "raw_outputs_path"):
            if key in data:
                kwargs[key] = data[key]
        return cls(**kwargs)
