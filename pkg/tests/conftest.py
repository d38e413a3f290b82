import sys
from pathlib import Path

import pytest

from milnorvf import corpus

DATA = Path(__file__).resolve().parent.parent / "data"
P = (2 ** 0.5, 1.0, 1.0)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def xy_xz():
    return corpus.xy_xz()


@pytest.fixture(scope="session")
def lmap8():
    return corpus.lmap8()


def pytest_configure(config):
    # acceptance lines print PASS/FAIL; make sure they reach the terminal even with -q
    sys.stdout.reconfigure(line_buffering=True)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
