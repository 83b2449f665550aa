from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fold_sample() -> Path:
    return FIXTURES / "fold_sample.tsv"


@pytest.fixture
def test_sample() -> Path:
    return FIXTURES / "test_sample.tsv"
