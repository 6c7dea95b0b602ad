"""
Pytest configuration and shared fixtures.
"""

import pytest
import networkx as nx
import numpy as np

from src.models.graphs import BinaryGraph


@pytest.fixture(autouse=True)
def default_config():
    """Run every test against the built-in defaults, not a local config file."""
    from src.utils.config import Config, set_config

    set_config(Config())
    yield
    set_config(None)


@pytest.fixture
def k3():
    """Triangle on 3 vertices."""
    return BinaryGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def cycle6():
    """Cycle 0-1-2-3-4-5-0."""
    return BinaryGraph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])


@pytest.fixture
def two_triangles():
    """Triangles {0, 2, 4} and {1, 3, 5}; same common-neighbor counts as cycle6."""
    return BinaryGraph.from_edges(6, [(0, 2), (2, 4), (0, 4), (1, 3), (3, 5), (1, 5)])


@pytest.fixture
def path4():
    """Path 0-1-2-3."""
    return BinaryGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def star5():
    """Star with center 2 and leaves 0, 1, 3, 4."""
    return BinaryGraph.from_edges(5, [(2, leaf) for leaf in (0, 1, 3, 4)])


def to_binary(graph: nx.Graph) -> BinaryGraph:
    nodes = sorted(graph.nodes())
    adj = nx.to_numpy_array(graph, nodelist=nodes, dtype=np.uint8)
    return BinaryGraph((adj > 0).astype(np.uint8))


@pytest.fixture
def random_graph():
    """Factory for seeded Erdős–Rényi graphs with at least one edge."""
    def make(n: int, p: float, seed: int) -> BinaryGraph:
        graph = nx.gnp_random_graph(n, p, seed=seed)
        if graph.number_of_edges() == 0 and n > 1:
            graph.add_edge(0, 1)
        return to_binary(graph)

    return make


@pytest.fixture
def write_edges(tmp_path):
    """Write an edge list file from raw text and return its path."""
    def write(text: str, name: str = "graph.edges") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def temp_output_dir(tmp_path):
    """Create temporary output directory."""
    output_dir = tmp_path / "output"
    output_dir.mkdir()
    return str(output_dir)
