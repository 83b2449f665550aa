"""Exception types shared across the package."""

from __future__ import annotations


class GedPipeError(Exception):
    """Base class for all package errors."""


class OddMarkerCountError(GedPipeError):
    """A marked sentence contains an odd number of `$` markers."""

    def __init__(self, text: str, count: int):
        super().__init__(f"odd marker count ({count}) in marked sentence: {text!r}")
        self.text = text
        self.count = count


class FormatError(GedPipeError):
    """A corpus/table file line does not match the expected format."""

    def __init__(self, line_no: int, reason: str, path: str | None = None):
        where = f"{path}:{line_no}" if path else f"line {line_no}"
        super().__init__(f"{where}: {reason}")
        self.line_no = line_no
        self.reason = reason
        self.path = path


class MissingGoldError(GedPipeError):
    """An operation requiring gold annotations met a record without one."""


class AlignmentFailedError(GedPipeError):
    """Word-level correction could not align output tokens to input tokens."""


class MarkedInputError(GedPipeError):
    """Rule-based detection was given text that already contains markers."""


class MissingRawOutputError(GedPipeError):
    """A pipeline variant needed a raw model output that was not supplied."""

    def __init__(self, record_id: str):
        super().__init__(f"no raw output for record {record_id!r}")
        self.record_id = record_id


class DuplicateIdError(GedPipeError):
    """A record id occurred more than once in a batch."""

    def __init__(self, record_id: str):
        super().__init__(f"duplicate record id {record_id!r}")
        self.record_id = record_id


class UnassignedIdError(GedPipeError):
    """A prediction id is missing from the split assignment."""

    def __init__(self, record_id: str):
        super().__init__(f"record {record_id!r} not assigned to any split")
        self.record_id = record_id


class EmptySplitError(GedPipeError):
    """A split side contains no records, so its mean is undefined."""
