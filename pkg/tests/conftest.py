import pytest

_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion; the summary prints one line per criterion."""
    def record(number, title, passed, detail=""):
        _RESULTS[number] = (title, bool(passed), detail)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, passed, detail = _RESULTS[number]
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number:>2}. {title}" + (f"  ({detail})" if detail else ""))
