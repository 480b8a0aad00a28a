import pytest

from kirchberg.graphs import INF, DirectedGraph, cuntz_graph
from kirchberg.suites import mixed_model, linf_pair_model

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def linf():
    return cuntz_graph(INF)


@pytest.fixture(scope="session")
def g2():
    """An infinite emitter ``v`` feeding a regular vertex ``w`` that returns once."""
    return DirectedGraph.from_edges("G2", ["v", "w"], [("v", "w", "inf"), ("w", "v", 1)],
                                    distinguished="v")


@pytest.fixture(scope="session")
def pair_model():
    return linf_pair_model()


@pytest.fixture(scope="session")
def mixed():
    return mixed_model()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        name, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {name:14s} {'PASS' if ok else 'FAIL'}")
