from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from radmean.geometry import load_polygon

DATA = Path(__file__).resolve().parent.parent / "data"
DIAG = np.array([-1.0, 1.0]) / np.sqrt(2.0)

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

# acceptance verdicts collected for the end-of-run summary
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def shows_as(value: float, printed: str) -> bool:
    """``value`` agrees with ``printed`` to the digits shown, rounded or truncated."""
    digits = len(printed.split(".")[1])
    unit = 10.0**-digits
    return abs(value - float(printed)) <= 0.5 * unit or 0 <= value - float(printed) < unit


@pytest.fixture(scope="session")
def t1():
    return load_polygon(DATA / "t1.json")


@pytest.fixture(scope="session")
def q1():
    return load_polygon(DATA / "q1.json")


@pytest.fixture(scope="session")
def square():
    return load_polygon(DATA / "square.json")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {verdict}  {detail}")
