import pytest

_VERDICTS = []


@pytest.fixture(scope="session")
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert on it."""

    def record(label, checks, known_limit=None):
        """``known_limit=(prefix, reason)`` marks a documented failure mode.

        When every failed check starts with ``prefix`` the FAIL line is still
        printed and the test reports XFAIL with ``reason``; any other failed
        check fails the test.
        """
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{'ok' if passed else 'FAILED'}: {desc}" for desc, passed in checks)
        line = f"{'PASS' if ok else 'FAIL'} {label} | {detail}"
        _VERDICTS.append(line)
        print(line)
        failed = [desc for desc, passed in checks if not passed]
        if failed and known_limit and all(d.startswith(known_limit[0]) for d in failed):
            pytest.xfail(known_limit[1])
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
