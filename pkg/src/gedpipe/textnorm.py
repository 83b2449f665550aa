"""Text normalization applied identically to inputs, gold, and model outputs.

The upstream model's own normalizer is not reproducible, so this module
substitutes a small, documented, deterministic stand-in: inner-newline
stripping plus Unicode NFC, each individually switchable.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_NEWLINE_RE = re.compile(r"\r\n|\r|\n")
_SPACE_RUN_RE = re.compile(r"  +")


@dataclass(frozen=True)
class NormConfig:
    """Normalization switches; one instance is used for an entire run.

    collapse_spaces defaults off: extra spaces can be the very error a
    gold span marks, so collapsing them is opt-in.
    """

    strip_inner_newlines: bool = True
    unicode_nfc: bool = True
    collapse_spaces: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "NormConfig":
        return cls(
            strip_inner_newlines=bool(d.get("strip_inner_newlines", True)),
            unicode_nfc=bool(d.get("unicode_nfc", True)),
            collapse_spaces=bool(d.get("collapse_spaces", False)),
        )

    def to_dict(self) -> dict:
        return {
            "strip_inner_newlines": self.strip_inner_newlines,
            "unicode_nfc": self.unicode_nfc,
            "collapse_spaces": self.collapse_spaces,
        }


IDENTITY = NormConfig(strip_inner_newlines=False, unicode_nfc=False, collapse_spaces=False)


def normalize(text: str, cfg: NormConfig = NormConfig()) -> str:
    """Normalize one text. Idempotent; with all flags off, the identity."""
    if cfg.strip_inner_newlines:
        text = _NEWLINE_RE.sub(" ", text)
    if cfg.unicode_nfc:
        text = unicodedata.normalize("NFC", text)
    if cfg.collapse_spaces:
        text = _SPACE_RUN_RE.sub(" ", text)
    return text
