import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from regraph.chain import transition_matrix  # noqa: E402
from regraph.mixing import enumerate_state_space  # noqa: E402


@pytest.fixture(scope="session")
def space62():
    return enumerate_state_space(6, 2)


@pytest.fixture(scope="session")
def space63():
    return enumerate_state_space(6, 3)


@pytest.fixture(scope="session")
def kernel62(space62):
    return transition_matrix(space62.states)


@pytest.fixture(scope="session")
def kernel63(space63):
    return transition_matrix(space63.states)


ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::" in report.nodeid:
        ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in ACCEPTANCE.items():
        # test_c3_mixing_dominance -> C3 mixing dominance
        tag, *words = name.removeprefix("test_").split("_")
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {tag.upper()} {' '.join(words)}")
