"""Stage attribution shared by reconciliation and the pipeline."""

from __future__ import annotations

from enum import Enum


class Stage(Enum):
    """Which mechanism produced a prediction. Exactly one per record."""

    LOOKUP = "Lookup"
    CHAR_LEVEL = "CharLevel"
    WORD_LEVEL = "WordLevel"
    REGEX_FALLBACK = "RegexFallback"
    RAW_PASSTHROUGH = "RawPassthrough"
    INPUT_PASSTHROUGH = "InputPassthrough"
