import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[num])
