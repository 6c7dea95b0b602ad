"""
Property suites over many random and exhaustively enumerated graphs.

The suites marked slow run the full-size acceptance checks; the unmarked
ones cover the same properties on a smaller sample.
"""

from itertools import combinations, product

import networkx as nx
import numpy as np
import pytest

from src.analysis.metrics import evaluate
from src.models.graphs import BinaryGraph, Cell
from src.models.schemas import KnowledgeSet
from src.services.graph_ops import cosquare_oracle, init_partial, sample_knowledge, square
from src.services.spectral import eigendecompose
from src.services.topological import ATTACK_ORDER, run_fixpoint, topological_fixpoint
from src.workflow.graph import run_grand


def erdos_renyi(n: int, p: float, seed: int) -> BinaryGraph:
    graph = nx.gnp_random_graph(n, p, seed=seed)
    adj = nx.to_numpy_array(graph, nodelist=range(n), dtype=np.uint8)
    return BinaryGraph((adj > 0).astype(np.uint8))


def all_graphs(n: int):
    """Every labeled graph on n vertices."""
    pairs = list(combinations(range(n), 2))
    for bits in product((0, 1), repeat=len(pairs)):
        yield BinaryGraph.from_edges(n, [pair for pair, bit in zip(pairs, bits) if bit])


def soundness_cases(count: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(5, 31))
        p = float(rng.choice([0.1, 0.3, 0.5]))
        rho = float(rng.choice([0.0, 0.1, 0.5]))
        yield erdos_renyi(n, p, seed=i), rho, i


def check_sound(g: BinaryGraph, rho: float, seed: int) -> None:
    knowledge = sample_knowledge(g, rho, seed=seed)
    gstar = topological_fixpoint(knowledge, square(g))
    assert gstar.agrees_with(g), f"unsound inference on n={g.n}, rho={rho}, seed={seed}"


def check_confluent(g: BinaryGraph, rng: np.random.Generator, orders: int = 5) -> None:
    g2 = square(g)
    rho = float(rng.choice([0.0, 0.2]))
    start = init_partial(g.n, sample_knowledge(g, rho, seed=int(rng.integers(1 << 16))))
    reference = run_fixpoint(start, g2).gstar
    for _ in range(orders):
        order = [str(name) for name in rng.permutation(ATTACK_ORDER)]
        assert run_fixpoint(start, g2, order=order).gstar == reference, f"order {order} differs"


def check_oracle_agreement(g: BinaryGraph) -> None:
    g2 = square(g)
    gstar = run_fixpoint(init_partial(g.n, KnowledgeSet()), g2).gstar
    solutions = cosquare_oracle(g2)
    assert g in solutions

    determined = gstar.cells != Cell.UNKNOWN
    for h in solutions:
        assert np.array_equal(gstar.cells[determined], h.adj[determined])

    graph, _ = run_grand(g2)
    assert square(graph) == g2


class TestRowSums:
    """Row sums of G² are the degree sums over each neighborhood."""

    def test_random_graphs(self):
        """Test 500 random graphs with n up to 50."""
        rng = np.random.default_rng(3)
        for i in range(500):
            g = erdos_renyi(int(rng.integers(2, 51)), float(rng.uniform(0.02, 0.5)), seed=1000 + i)
            g2 = square(g)
            expected = g.adj.astype(np.int64) @ g.degrees.astype(np.int64)
            assert np.array_equal(g2.row_sums, expected)
            assert np.array_equal(g2.degrees, g.degrees)


class TestSoundness:
    """The topological fixpoint never contradicts the true graph."""

    @pytest.mark.parametrize("g,rho,seed", list(soundness_cases(25)))
    def test_sample(self, g, rho, seed):
        """Test a small sample of random graphs and knowledge proportions."""
        check_sound(g, rho, seed)

    @pytest.mark.slow
    def test_full(self):
        """Test 200 random graphs with n in [5, 30]."""
        for g, rho, seed in soundness_cases(200, seed=1):
            check_sound(g, rho, seed)


class TestOracleEquivalence:
    """On tiny graphs the fixpoint agrees with every co-square solution."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_every_small_graph(self, n):
        """Test all labeled graphs on up to 4 vertices."""
        for g in all_graphs(n):
            check_oracle_agreement(g)

    def test_sampled_five_vertex_graphs(self):
        """Test a sample of graphs on 5 vertices."""
        graphs = list(all_graphs(5))
        rng = np.random.default_rng(5)
        for index in rng.choice(len(graphs), size=40, replace=False):
            check_oracle_agreement(graphs[int(index)])

    @pytest.mark.slow
    def test_every_five_vertex_graph(self):
        """Test all 1024 labeled graphs on 5 vertices."""
        for g in all_graphs(5):
            check_oracle_agreement(g)


class TestConfluence:
    """The fixpoint does not depend on the order of the attacks."""

    def test_sample(self):
        """Test 15 random graphs under 5 orders each."""
        rng = np.random.default_rng(11)
        for i in range(15):
            n = int(rng.integers(4, 13))
            check_confluent(erdos_renyi(n, float(rng.uniform(0.15, 0.5)), seed=i), rng)

    @pytest.mark.slow
    def test_full(self):
        """Test 100 random graphs with n up to 20."""
        rng = np.random.default_rng(12)
        for i in range(100):
            n = int(rng.integers(4, 21))
            check_confluent(erdos_renyi(n, float(rng.uniform(0.1, 0.5)), seed=100 + i), rng)


class TestEigenSquaring:
    """The spectrum of G² is the squared spectrum of G."""

    @pytest.mark.parametrize("seed", range(100))
    def test_random_graph(self, seed):
        """Test sorted eigenvalues of G² against squared eigenvalues of G."""
        rng = np.random.default_rng(seed)
        g = erdos_renyi(int(rng.integers(2, 31)), float(rng.uniform(0.05, 0.6)), seed=seed)

        expected = np.sort(np.linalg.eigvalsh(g.adj.astype(np.float64)) ** 2)
        actual = np.sort(eigendecompose(square(g)).eigenvalues)
        np.testing.assert_allclose(actual, expected, rtol=0, atol=1e-8)

    def test_cosquare_spectra(self, cycle6, two_triangles):
        """Test the co-square pair keeps distinct adjacency spectra."""
        cycle = np.sort(np.linalg.eigvalsh(cycle6.adj.astype(np.float64)))
        triangles = np.sort(np.linalg.eigvalsh(two_triangles.adj.astype(np.float64)))
        np.testing.assert_allclose(cycle, [-2, -1, -1, 1, 1, 2], atol=1e-8)
        np.testing.assert_allclose(triangles, [-1, -1, -1, -1, 2, 2], atol=1e-8)

        report = evaluate(cycle6, two_triangles)
        assert report.cne == 0.0
        assert report.rae > 0.0


class TestMetricIdentities:
    """Identities between the metrics and the confusion counts."""

    def test_self_evaluation(self, random_graph):
        """Test evaluate(g, g) is zero everywhere."""
        for seed in range(20):
            g = random_graph(12, 0.3, seed=seed)
            report = evaluate(g, g)
            assert (report.fpr, report.fnr, report.rae, report.cne) == (0.0, 0.0, 0.0, 0.0)

    @pytest.mark.parametrize("seed", range(100))
    def test_rae_counts_flipped_pairs(self, seed):
        """Test ‖G − Ĝ‖² = 2(FP + FN) and RAE² ‖G‖² matches it."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 25))
        g = erdos_renyi(n, float(rng.uniform(0.1, 0.6)), seed=2 * seed)
        if g.num_edges == 0:
            g = BinaryGraph.from_edges(n, [(0, 1)])
        ghat = erdos_renyi(n, float(rng.uniform(0.1, 0.6)), seed=2 * seed + 1)

        report = evaluate(g, ghat)
        counts = report.edge_counts
        diff = g.adj.astype(np.int64) - ghat.adj.astype(np.int64)
        flipped = int((diff * diff).sum())
        norm = int(g.adj.astype(np.int64).sum())

        assert flipped == 2 * (counts.false_positives + counts.false_negatives)
        assert norm == 2 * g.num_edges
        assert report.rae ** 2 * norm == pytest.approx(flipped, rel=1e-12)
