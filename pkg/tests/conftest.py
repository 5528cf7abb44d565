import functools

import pytest

from berry_esseen import perimeter

DOMINANCE_DIMS = tuple(range(1, 51)) + (100, 200, 500, 932, 1000)


@functools.lru_cache(maxsize=None)
def _gamma_bar(d):
    return perimeter.gamma_bar_d(d)


@pytest.fixture(scope="session")
def gamma_bar():
    """``d -> PerimeterResult``, computed once per session."""
    return _gamma_bar


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record ``(number, ok, detail)`` for the acceptance summary.

    A criterion with several parts fails if any part fails.
    """
    def record(number, ok, detail):
        _CRITERIA.setdefault(number, []).append((bool(ok), detail))
        return bool(ok)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"{status} criterion {number}: {detail}")
