import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hcfr.games import build_kuhn_poker, build_matching_pennies, build_routing_game  # noqa: E402


@pytest.fixture(scope="session")
def kuhn():
    return build_kuhn_poker()


@pytest.fixture(scope="session")
def pennies():
    return build_matching_pennies()


@pytest.fixture(scope="session")
def routing():
    return build_routing_game()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
