import numpy as np
import pytest

from specpriv import graph as gr


@pytest.fixture(scope="session")
def fixture_graph():
    from specpriv.sim import load_graph

    return load_graph("fixture")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bfs_oracle(g):
    """All-pairs distances by Floyd-Warshall, independent of the BFS kernel."""
    d = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(d, 0.0)
    for i, j in g.edges:
        d[i, j] = d[j, i] = 1.0
    for k in range(g.n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


@pytest.fixture(scope="session")
def small_graphs():
    return [
        gr.generate("cycle", 14),
        gr.generate("path", 9),
        gr.generate("complete", 7),
        gr.generate("erdos_renyi", 30, p=0.2, seed=7),
        gr.generate("erdos_renyi", 20, p=0.3, seed=11),
    ]


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
