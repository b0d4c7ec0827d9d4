from __future__ import annotations

import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from morsesum.fixtures import fixture  # noqa: E402


@functools.lru_cache(maxsize=None)
def cached_fixture(name: str):
    return fixture(name)


@pytest.fixture
def fx():
    return cached_fixture
