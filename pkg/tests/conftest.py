import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from xposit import _backend  # noqa: E402

BACKENDS = _backend.available()


@pytest.fixture(params=sorted(BACKENDS))
def kern(request):
    """Each importable kernel module in turn."""
    return BACKENDS[request.param]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
