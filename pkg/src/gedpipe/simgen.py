"""Deterministic synthetic degrader standing in for the seq2seq model.

Produces plausible raw model output from gold data: confusable character
swaps (invertible through the char lookup table), whole-word respellings,
truncation at a token limit, and dropped marker pairs. Randomness comes
from a Mersenne Twister seeded per sentence with (seed, gold.raw), so
output never depends on batch order.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .corpus import MARKER, MarkedSentence, strip_markers

_WS_SPLIT_RE = re.compile(r"(\s+)")


@dataclass(frozen=True)
class DegradeConfig:
    """Degradation rates and the swap material they draw from.

    char_swap_pairs maps canonical characters to the wrong form the model
    would emit (the inverse view of a CharLookupTable); word_swap_pairs
    maps tokens to alternate spellings.
    """

    char_swap_rate: float = 0.0
    word_swap_pairs: Mapping[str, str] = field(default_factory=dict)
    truncate_at_tokens: Optional[int] = 256
    marker_drop_rate: float = 0.0
    seed: int = 0
    char_swap_pairs: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name, rate in (("char_swap_rate", self.char_swap_rate),
                           ("marker_drop_rate", self.marker_drop_rate)):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {rate}")
        for wrong in self.char_swap_pairs.values():
            if wrong == MARKER:
                raise ValueError(f"char swap cannot produce {MARKER!r}")


def degrade(gold: MarkedSentence, cfg: DegradeConfig) -> str:
    """One simulated raw model output for a gold sentence.

    Applied in order: marker-pair drops, whole-word swaps, character
    swaps, token truncation. Identical (gold, cfg) yields identical text.
    """
    rng = random.Random(f"{cfg.seed}:{gold.raw}")

    kept_spans = [s for s in gold.spans if rng.random() >= cfg.marker_drop_rate]
    text = MarkedSentence.from_plain(gold.plain, kept_spans).raw

    if cfg.word_swap_pairs:
        pieces = _WS_SPLIT_RE.split(text)
        for i in range(0, len(pieces), 2):
            token = pieces[i]
            core = strip_markers(token)
            swap = cfg.word_swap_pairs.get(core)
            if swap is None:
                continue
            start = 0
            end = len(token)
            while start < end and token[start] == MARKER:
                start += 1
            while end > start and token[end - 1] == MARKER:
                end -= 1
            if MARKER in token[start:end]:
                continue
            pieces[i] = token[:start] + swap + token[end:]
        text = "".join(pieces)

    if cfg.char_swap_rate > 0 and cfg.char_swap_pairs:
        chars = []
        for ch in text:
            if (
                ch != MARKER
                and ch in cfg.char_swap_pairs
                and rng.random() < cfg.char_swap_rate
            ):
                chars.append(cfg.char_swap_pairs[ch])
            else:
                chars.append(ch)
        text = "".join(chars)

    if cfg.truncate_at_tokens is not None:
        pieces = _WS_SPLIT_RE.split(text)
        token_ends = [
            i for i in range(0, len(pieces), 2) if pieces[i]
        ]
        if len(token_ends) > cfg.truncate_at_tokens:
            cut = token_ends[cfg.truncate_at_tokens - 1] if cfg.truncate_at_tokens > 0 else -1
            text = "".join(pieces[: cut + 1])

    return text
