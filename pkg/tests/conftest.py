import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance line, then assert it."""
    def _record(name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
