import pytest

_TABLE = pytest.StashKey[dict]()
CRITERIA = range(1, 11)


@pytest.fixture
def verdict(request):
    """Record one pass/fail line per acceptance criterion."""
    table = request.config.stash.setdefault(_TABLE, {})

    def record(n: int, ok: bool, detail: str = "") -> bool:
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        table[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    table = config.stash.get(_TABLE, None)
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        terminalreporter.write_line(table.get(n, f"criterion {n:>2}: NOT RUN  (deselected, or stopped before recording)"))
