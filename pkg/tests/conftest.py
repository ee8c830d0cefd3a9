import pytest

from crralloc import build_instance


@pytest.fixture
def worked_example():
    """4 agents, 6 items, each item to exactly two agents, three items each."""
    utils = [[6, 5, 4, 3, 2, 1]] * 3 + [[2, 6, 5, 4, 3, 1]]
    return build_instance(None, utils, (3, 3), (2, 2))


def incompatibility_utils():
    return [[9, 8, 7, 6, 5, 4, 3, 2, 1]] * 2 + [[6, 9, 8, 7, 5, 4, 3, 2, 1]]


@pytest.fixture
def incompatibility_unbounded():
    return build_instance(None, incompatibility_utils(), (0, 9), (1, 1))


@pytest.fixture
def incompatibility_balanced():
    return build_instance(None, incompatibility_utils(), (3, 3), (1, 1))


@pytest.fixture
def two_agent_balanced():
    return build_instance(None, [[5, 5, 2, 2], [7, 7, 0, 0]], (2, 2), (1, 1))


@pytest.fixture
def two_agent_free():
    return build_instance(None, [[5, 5, 2, 2], [7, 7, 0, 0]], (0, 4), (1, 1))


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []) or [])
            if "criterion" in props and getattr(rep, "when", "call") == "call":
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, verdict in sorted(lines, key=lambda x: int(x[0].split()[0])):
            terminalreporter.write_line(f"{verdict}  criterion {label}")
