"""Unit tests for the spectral attack and targeted error forgetting."""

import numpy as np
import pytest

from src.models.graphs import BinaryGraph, Cell, CommonNeighborsMatrix, TriStateAdjacency
from src.models.schemas import BetaConvention, SpectralConfig
from src.services.graph_ops import square
from src.services.spectral import (
    SpectralAttack,
    default_beta,
    eigendecompose,
    mismatched_vertices,
    spectral_attack,
    targeted_error_forgetting,
)


class TestEigendecompose:
    """Tests for the eigendecomposition of G²."""

    def test_triangle_spectrum(self, k3):
        """Test K3² has eigenvalues 4, 1, 1."""
        es = eigendecompose(square(k3))
        assert np.allclose(es.eigenvalues, [4.0, 1.0, 1.0])

    def test_cycle_spectrum(self, cycle6):
        """Test C6² has eigenvalues 4, 4, 1, 1, 1, 1."""
        es = eigendecompose(square(cycle6))
        assert np.allclose(es.eigenvalues, [4.0, 4.0, 1.0, 1.0, 1.0, 1.0])

    def test_descending_and_reconstructs(self, random_graph):
        """Test eigenvalues are sorted and U Λ Uᵀ gives G² back."""
        g2 = square(random_graph(20, 0.3, seed=4))
        es = eigendecompose(g2)
        assert np.all(np.diff(es.eigenvalues) <= 0)
        assert es.relative_residual(g2.m) < 1e-9

    def test_floor_clamps_zero_modes(self):
        """Test near-zero eigenvalues are clamped to exactly 0."""
        es = eigendecompose(square(BinaryGraph.from_edges(4, [(0, 1)])))
        assert np.all(es.eigenvalues >= 0)
        assert np.count_nonzero(es.eigenvalues) == 2


class TestDefaultBeta:
    """Tests for the adaptive knowledge weight."""

    def test_vertex_count_convention(self):
        """Test 2·pairs/n²."""
        gstar = TriStateAdjacency.unknown(4)
        for v in (1, 2, 3):
            gstar.set(0, v, Cell.ZERO)
        assert default_beta(gstar) == pytest.approx(0.375)

    def test_fully_determined(self, random_graph):
        """Test a fully determined matrix on 10 vertices gives 0.9."""
        gstar = TriStateAdjacency.from_graph(random_graph(10, 0.3, seed=0))
        assert default_beta(gstar) == pytest.approx(0.9)
        assert default_beta(gstar, BetaConvention.NORMALIZED) == pytest.approx(1.0)

    def test_no_knowledge(self):
        """Test an all-Unknown matrix gives 0."""
        assert default_beta(TriStateAdjacency.unknown(5)) == 0.0

    def test_normalized_convention(self):
        """Test the fraction of determined pairs."""
        gstar = TriStateAdjacency.unknown(4)
        for v in (1, 2, 3):
            gstar.set(0, v, Cell.ZERO)
        assert default_beta(gstar, BetaConvention.NORMALIZED) == pytest.approx(0.5)

    def test_tiny_graphs(self):
        """Test fewer than two vertices gives 0."""
        assert default_beta(TriStateAdjacency.unknown(1)) == 0.0


class TestSpectralAttack:
    """Tests for the greedy sign selection."""

    def test_triangle_with_full_knowledge(self, k3):
        """Test K3 is rebuilt when β = 1 and every cell is known."""
        gstar = TriStateAdjacency.from_graph(k3)
        cfg = SpectralConfig(alpha=0.0, beta=1.0)
        graph = spectral_attack(gstar, eigendecompose(square(k3)), cfg)
        assert graph == k3

    def test_steps_choose_closer_sign(self, random_graph):
        """Test each chosen branch is no farther than the discarded one."""
        g = random_graph(16, 0.3, seed=9)
        _, steps = SpectralAttack().run(TriStateAdjacency.unknown(g.n), eigendecompose(square(g)))
        assert steps
        for step in steps:
            assert step.d_chosen <= step.d_discarded
            assert step.eigenvalue > 0

    def test_largest_eigenvalue_first(self, random_graph):
        """Test eigenvalues are visited by decreasing magnitude."""
        g = random_graph(12, 0.4, seed=1)
        _, steps = SpectralAttack().run(TriStateAdjacency.unknown(g.n), eigendecompose(square(g)))
        magnitudes = [abs(step.eigenvalue) for step in steps]
        assert magnitudes == sorted(magnitudes, reverse=True)

    def test_deterministic(self, random_graph):
        """Test repeated runs give the same graph."""
        g = random_graph(15, 0.3, seed=2)
        es = eigendecompose(square(g))
        gstar = TriStateAdjacency.unknown(g.n)
        assert spectral_attack(gstar, es) == spectral_attack(gstar, es)

    def test_output_is_simple_graph(self, random_graph):
        """Test the result is symmetric without self-loops."""
        g = random_graph(15, 0.3, seed=3)
        graph = spectral_attack(TriStateAdjacency.unknown(g.n), eigendecompose(square(g)))
        assert not np.any(np.diagonal(graph.adj))
        assert np.array_equal(graph.adj, graph.adj.T)

    def test_zero_matrix(self):
        """Test an all-zero G² gives the empty graph."""
        g2 = CommonNeighborsMatrix(np.zeros((4, 4), dtype=int))
        graph, steps = SpectralAttack().run(TriStateAdjacency.unknown(4), eigendecompose(g2))
        assert graph.num_edges == 0
        assert steps == []


class TestTargetedErrorForgetting:
    """Tests for reverting rows the spectral attack got wrong."""

    def test_correct_guess_kept(self, cycle6):
        """Test a guess whose square matches G² is kept whole."""
        forgotten = targeted_error_forgetting(cycle6, TriStateAdjacency.unknown(6), square(cycle6))
        assert forgotten == TriStateAdjacency.from_graph(cycle6)

    def test_wrong_rows_reverted(self, k3):
        """Test rows touching a mismatch go back to the topological result."""
        guess = BinaryGraph.from_edges(3, [(0, 1), (0, 2)])
        topo = TriStateAdjacency.unknown(3)
        forgotten = targeted_error_forgetting(guess, topo, square(k3))
        assert np.array_equal(mismatched_vertices(guess, square(k3)), [0, 1, 2])
        assert forgotten == topo

    def test_proven_cells_win(self, k3):
        """Test cells determined topologically keep their value."""
        guess = BinaryGraph.from_edges(3, [(0, 1)])
        topo = TriStateAdjacency.unknown(3)
        topo.set(1, 2, Cell.ONE)
        forgotten = targeted_error_forgetting(guess, topo, square(k3))
        assert forgotten.get(1, 2) == Cell.ONE
        assert forgotten.agrees_with(k3)

    def test_subset_of_guess_and_topo(self, random_graph):
        """Test every determined cell comes from the guess or the topological result."""
        g = random_graph(14, 0.3, seed=6)
        g2 = square(g)
        guess = spectral_attack(TriStateAdjacency.unknown(g.n), eigendecompose(g2))
        topo = TriStateAdjacency.unknown(g.n)
        topo.set(0, 1, Cell(int(g.adj[0, 1])))
        forgotten = targeted_error_forgetting(guess, topo, g2)

        assert forgotten.get(0, 1) == topo.get(0, 1)
        flagged = set(mismatched_vertices(guess, g2).tolist())
        for u, v in zip(*np.nonzero(np.triu(forgotten.cells != Cell.UNKNOWN, k=1))):
            if (u, v) == (0, 1):
                continue
            assert u not in flagged and v not in flagged
            assert forgotten.cells[u, v] == guess.adj[u, v]
