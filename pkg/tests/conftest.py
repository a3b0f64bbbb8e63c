import pytest

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(n, check)`` runs ``check() -> (ok, detail)``, records one PASS/FAIL
    line and fails the test when the check does."""
    def run(n, check):
        try:
            ok, detail = check()
        except Exception as exc:  # noqa: BLE001  an error is a FAIL line, not a missing one
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _LINES[n] = line
        print(line)
        assert ok, line
    return run


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_LINES):
            terminalreporter.write_line(_LINES[n])
