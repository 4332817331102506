import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from zcheck.lexicon import load_lexicon, seed_lexicon  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
REPO = Path(__file__).parent.parent

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def seed():
    return seed_lexicon()


@pytest.fixture(scope="session")
def seed_path():
    return REPO / "seed.zlex"


def load_fixture(name):
    return load_lexicon((FIXTURES / name).read_text(encoding="utf-8"), name)


def all_fixture_paths():
    return [REPO / "seed.zlex", *sorted(FIXTURES.glob("*.zlex")), *sorted(FIXTURES.glob("generated/*.zlex"))]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
