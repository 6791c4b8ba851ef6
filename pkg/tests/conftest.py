import numpy as np
import pytest

from pulseload.series import EventSeries, write_events

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_series():
    return EventSeries([0.5, 0.7, 1.5, 2.2, 3.9], [100.0, 120.0, 90.0, 95.0, 130.0], 85.0, 4.0)


@pytest.fixture
def events_csv(tmp_path, small_series):
    path = tmp_path / "events.csv"
    write_events(small_series, path)
    return path
