from pathlib import Path

import pytest

from nrdsym.predicates import SymmetricPredicate

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def nae3():
    return SymmetricPredicate.of(3, 1, 2)


def bits(s: str) -> int:
    """'110' -> bitmask with coordinate 1 at bit 0."""
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")
