import pytest

_ACCEPT = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one acceptance line, then assert on it."""
    lines = request.config.stash.setdefault(_ACCEPT, [])

    def _report(n, title, ok, detail):
        line = f"[ACCEPT {n}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        lines.append((n, line))
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPT, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
