from __future__ import annotations

import pytest

_RESULTS: dict[str, tuple[bool, str]] = {}


class _Criterion:
    """Records one acceptance outcome; the summary hook prints it."""

    def __init__(self, key: str):
        self.key = key
        self.detail = ""
        _RESULTS[key] = (False, "did not finish")

    def note(self, detail: str) -> None:
        self.detail = detail

    def passed(self) -> None:
        _RESULTS[self.key] = (True, self.detail)


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    key = marker.args[0] if marker else request.node.name
    return _Criterion(key)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS):
        ok, detail = _RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}")
