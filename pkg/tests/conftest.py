import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
DATA_DIR = TESTS_DIR / "data"

sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture(scope="session")
def verification_tle_path() -> Path:
    return DATA_DIR / "verification.tle"


@pytest.fixture(scope="session")
def verification_pairs(verification_tle_path) -> list[tuple[str, str]]:
    lines = verification_tle_path.read_text().splitlines()
    pairs = []
    for i in range(0, len(lines), 3):
        pairs.append((lines[i + 1], lines[i + 2]))
    return pairs
