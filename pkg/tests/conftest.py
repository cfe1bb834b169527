from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

GOLDEN = Path(__file__).parent / "golden"

# (criterion number, passed, one-line detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return Path(str(resources.files("earlywarn") / "data" / "fixture"))


@pytest.fixture
def record_acceptance():
    def record(criterion: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append((criterion, passed, detail))
        print(f"ACCEPTANCE C{criterion}: {'PASS' if passed else 'FAIL'} | {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"C{crit}: {'PASS' if ok else 'FAIL'} | {detail}")
