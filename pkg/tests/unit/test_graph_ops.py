"""Unit tests for graph arithmetic, knowledge sampling and the co-square oracle."""

import numpy as np
import pytest

from src.models.graphs import BinaryGraph, Cell, CommonNeighborsMatrix, TriStateAdjacency
from src.models.schemas import KnowledgeSet
from src.services.graph_ops import (
    cosquare_oracle,
    finalize,
    init_partial,
    sample_knowledge,
    square,
)
from src.utils.errors import CapacityError, InvalidKnowledgeError


class TestSquare:
    """Tests for the common-neighbors matrix."""

    def test_triangle(self, k3):
        """Test K3 gives degree 2 on the diagonal and 1 elsewhere."""
        g2 = square(k3)
        expected = np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
        assert np.array_equal(g2.m, expected)

    def test_path(self, path4):
        """Test the diagonal holds degrees and entries count shared neighbors."""
        g2 = square(path4)
        assert g2.degrees.tolist() == [1, 2, 2, 1]
        assert g2[0, 2] == 1
        assert g2[0, 1] == 0
        assert g2[0, 3] == 0

    def test_cycle_and_triangles_share_square(self, cycle6, two_triangles):
        """Test the classic co-square pair."""
        assert square(cycle6) == square(two_triangles)

    def test_matches_numpy_product(self, random_graph):
        """Test square equals A·A computed in integers."""
        g = random_graph(12, 0.4, seed=3)
        a = g.adj.astype(np.int64)
        assert np.array_equal(square(g).m, a @ a)

    def test_empty_graph(self):
        """Test the square of an edgeless graph is zero."""
        assert not square(BinaryGraph.empty(4)).m.any()


class TestInitPartial:
    """Tests for placing prior knowledge."""

    def test_places_knowledge(self):
        """Test E₁ becomes One, E₀ Zero and the rest Unknown."""
        knowledge = KnowledgeSet(known_edges=[(0, 1)], known_non_edges=[(2, 1)])
        gstar = init_partial(3, knowledge)

        assert gstar.get(0, 1) == Cell.ONE and gstar.get(1, 0) == Cell.ONE
        assert gstar.get(1, 2) == Cell.ZERO
        assert gstar.get(0, 2) == Cell.UNKNOWN
        assert all(gstar.get(u, u) == Cell.ZERO for u in range(3))

    def test_empty_knowledge(self):
        """Test no knowledge leaves every pair Unknown."""
        gstar = init_partial(4, KnowledgeSet())
        assert gstar.determined_pairs() == 0
        assert len(gstar.unknown_pairs()) == 6

    def test_overlap_rejected(self):
        """Test a pair cannot be both an edge and a non-edge."""
        knowledge = KnowledgeSet(known_edges=[(0, 1)], known_non_edges=[(1, 0)])
        with pytest.raises(InvalidKnowledgeError):
            init_partial(3, knowledge)

    def test_out_of_range_rejected(self):
        """Test pairs must reference existing vertices."""
        with pytest.raises(InvalidKnowledgeError):
            init_partial(3, KnowledgeSet(known_edges=[(0, 5)]))

    def test_self_loop_rejected(self):
        """Test self-loops are invalid knowledge."""
        with pytest.raises(InvalidKnowledgeError):
            init_partial(3, KnowledgeSet(known_non_edges=[(1, 1)]))


class TestSampleKnowledge:
    """Tests for knowledge sampling."""

    def test_sample_size(self, random_graph):
        """Test ⌊ρ·n(n−1)/2⌋ pairs are revealed."""
        g = random_graph(10, 0.3, seed=1)
        knowledge = sample_knowledge(g, 0.2, seed=5)
        assert knowledge.size == 9  # floor(0.2 * 45)

    def test_sample_is_truthful(self, random_graph):
        """Test revealed pairs agree with the graph."""
        g = random_graph(15, 0.3, seed=2)
        knowledge = sample_knowledge(g, 0.5, seed=11)
        assert all(g.has_edge(u, v) for u, v in knowledge.known_edges)
        assert not any(g.has_edge(u, v) for u, v in knowledge.known_non_edges)
        assert not knowledge.overlap()

    def test_same_seed_same_sample(self, random_graph):
        """Test sampling is deterministic per seed."""
        g = random_graph(15, 0.3, seed=2)
        assert sample_knowledge(g, 0.3, seed=4) == sample_knowledge(g, 0.3, seed=4)

    def test_full_and_empty(self, k3):
        """Test ρ = 1 reveals every pair and ρ = 0 none."""
        assert sample_knowledge(k3, 1.0, seed=0).size == 3
        assert sample_knowledge(k3, 0.0, seed=0).size == 0

    def test_exact_products(self):
        """Test ρ·total products that are integers are not rounded down."""
        g = BinaryGraph.empty(201)  # 20100 pairs
        assert sample_knowledge(g, 0.29, seed=0).size == 5829

    @pytest.mark.parametrize("rho", [-0.1, 1.5])
    def test_invalid_rho(self, k3, rho):
        """Test ρ outside [0, 1] is rejected."""
        with pytest.raises(InvalidKnowledgeError):
            sample_knowledge(k3, rho, seed=0)


class TestFinalize:
    """Tests for turning a partial reconstruction into a graph."""

    def test_fill_zero_and_one(self):
        """Test Unknown cells take the fill value."""
        gstar = TriStateAdjacency.unknown(3)
        gstar.set(0, 1, Cell.ONE)
        gstar.set(1, 2, Cell.ZERO)

        assert finalize(gstar).edges == [(0, 1)]
        assert finalize(gstar, "one").edges == [(0, 1), (0, 2)]

    def test_unknown_fill_rejected(self):
        """Test Unknown is not a valid fill."""
        with pytest.raises(ValueError):
            finalize(TriStateAdjacency.unknown(2), Cell.UNKNOWN)


class TestCosquareOracle:
    """Tests for the brute-force enumeration of co-square graphs."""

    def test_triangle_is_unique(self, k3):
        """Test K3 is the only graph with its square."""
        assert cosquare_oracle(square(k3)) == [k3]

    def test_cycle_has_cosquares(self, cycle6, two_triangles):
        """Test both the 6-cycle and the two triangles are found."""
        solutions = cosquare_oracle(square(cycle6))
        assert cycle6 in solutions
        assert two_triangles in solutions
        assert all(square(h) == square(cycle6) for h in solutions)

    def test_sorted_output(self, cycle6):
        """Test solutions come in lexicographic edge-set order."""
        solutions = cosquare_oracle(square(cycle6))
        assert [h.edges for h in solutions] == sorted(h.edges for h in solutions)

    def test_empty_matrix(self):
        """Test the zero matrix only admits the empty graph."""
        solutions = cosquare_oracle(CommonNeighborsMatrix(np.zeros((3, 3), dtype=int)))
        assert solutions == [BinaryGraph.empty(3)]

    def test_capacity(self, random_graph):
        """Test larger graphs are refused."""
        g = random_graph(9, 0.5, seed=0)
        with pytest.raises(CapacityError):
            cosquare_oracle(square(g))

    def test_unrealizable_matrix(self):
        """Test a matrix with no co-square graph yields no solution."""
        g2 = CommonNeighborsMatrix(np.array([[1, 0], [0, 0]]))
        assert cosquare_oracle(g2) == []
