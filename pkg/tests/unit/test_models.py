"""Unit tests for data models."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.models.graphs import (
    BinaryGraph,
    Cell,
    CommonNeighborsMatrix,
    TriStateAdjacency,
    check_same_size,
    normalize_pair,
)
from src.models.schemas import (
    BetaConvention,
    EigenSystem,
    KnowledgeSet,
    PipelineSettings,
    SpectralConfig,
    SpectralStep,
)
from src.utils.errors import ContractError, InconsistentInputsError


class TestBinaryGraph:
    """Tests for BinaryGraph."""

    def test_from_edges(self):
        """Test building from a pair list."""
        g = BinaryGraph.from_edges(4, [(1, 0), (2, 3)])
        assert g.n == 4
        assert g.edges == [(0, 1), (2, 3)]
        assert g.degrees.tolist() == [1, 1, 1, 1]
        assert g.neighbors(0) == frozenset({1})

    def test_rejects_self_loop(self):
        """Test self-loops violate the contract."""
        with pytest.raises(ContractError):
            BinaryGraph.from_edges(3, [(1, 1)])

    def test_rejects_asymmetric(self):
        """Test an asymmetric matrix is not an undirected graph."""
        with pytest.raises(ContractError):
            BinaryGraph(np.array([[0, 1], [0, 0]]))

    def test_rejects_weights(self):
        """Test entries must be 0 or 1."""
        with pytest.raises(ContractError):
            BinaryGraph(np.array([[0, 2], [2, 0]]))

    def test_read_only(self, k3):
        """Test the adjacency cannot be mutated in place."""
        with pytest.raises(ValueError):
            k3.adj[0, 1] = 0

    def test_equality_and_hash(self, k3):
        """Test graphs compare by adjacency."""
        same = BinaryGraph.from_edges(3, [(1, 2), (0, 2), (0, 1)])
        assert same == k3
        assert hash(same) == hash(k3)


class TestCommonNeighborsMatrix:
    """Tests for CommonNeighborsMatrix."""

    def test_valid_matrix(self):
        """Test degrees and row sums."""
        g2 = CommonNeighborsMatrix(np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]))
        assert g2.degrees.tolist() == [2, 2, 2]
        assert g2.row_sums.tolist() == [4, 4, 4]

    def test_rejects_negative(self):
        """Test negative counts are invalid."""
        with pytest.raises(ContractError):
            CommonNeighborsMatrix(np.array([[1, -1], [-1, 1]]))

    def test_rejects_asymmetric(self):
        """Test counts must be symmetric."""
        with pytest.raises(ContractError):
            CommonNeighborsMatrix(np.array([[1, 0], [1, 1]]))

    def test_rejects_fractional(self):
        """Test float input must hold integers."""
        with pytest.raises(ContractError):
            CommonNeighborsMatrix(np.array([[1.5, 0.0], [0.0, 1.0]]))

    def test_accepts_integral_floats(self):
        """Test float input holding integers is converted."""
        g2 = CommonNeighborsMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert g2.m.dtype == np.int64


class TestTriStateAdjacency:
    """Tests for the partial reconstruction."""

    def test_unknown_has_zero_diagonal(self):
        """Test the diagonal is always Zero."""
        gstar = TriStateAdjacency.unknown(3)
        assert all(gstar.get(u, u) == Cell.ZERO for u in range(3))
        assert gstar.determined_pairs() == 0
        assert gstar.unknown_pairs() == [(0, 1), (0, 2), (1, 2)]

    def test_set_is_symmetric(self):
        """Test a write determines both orientations."""
        gstar = TriStateAdjacency.unknown(3)
        assert gstar.set(2, 0, Cell.ONE)
        assert gstar.get(0, 2) == Cell.ONE
        assert not gstar.set(0, 2, Cell.ONE)

    def test_set_conflict(self):
        """Test a determined cell cannot flip."""
        gstar = TriStateAdjacency.unknown(3)
        gstar.set(0, 1, Cell.ZERO)
        with pytest.raises(InconsistentInputsError) as exc:
            gstar.set(1, 0, Cell.ONE)
        assert exc.value.cell == (0, 1)

    def test_diagonal_one_rejected(self):
        """Test a self-loop cannot be written."""
        with pytest.raises(InconsistentInputsError):
            TriStateAdjacency.unknown(2).set(1, 1, Cell.ONE)

    def test_known_degrees_and_neighbors(self):
        """Test Γ⋆ and its size."""
        gstar = TriStateAdjacency.unknown(4)
        gstar.set(0, 1, Cell.ONE)
        gstar.set(0, 2, Cell.ONE)
        gstar.set(0, 3, Cell.ZERO)
        assert gstar.known_degrees().tolist() == [2, 1, 1, 0]
        assert gstar.neighbors(0) == frozenset({1, 2})
        assert gstar.unknown_counts().tolist() == [0, 2, 2, 2]

    def test_revert_vertices(self, k3):
        """Test reverting copies rows and columns back from the source."""
        gstar = TriStateAdjacency.from_graph(k3)
        gstar.revert_vertices([1], TriStateAdjacency.unknown(3))
        assert gstar.get(0, 1) == Cell.UNKNOWN
        assert gstar.get(1, 2) == Cell.UNKNOWN
        assert gstar.get(0, 2) == Cell.ONE
        assert gstar.get(1, 1) == Cell.ZERO

    def test_agrees_with(self, k3):
        """Test agreement ignores Unknown cells."""
        gstar = TriStateAdjacency.unknown(3)
        gstar.set(0, 1, Cell.ONE)
        assert gstar.agrees_with(k3)
        gstar.set(1, 2, Cell.ZERO)
        assert not gstar.agrees_with(k3)

    def test_rejects_invalid_values(self):
        """Test only Zero, One and Unknown are allowed."""
        with pytest.raises(ContractError):
            TriStateAdjacency(np.array([[0, 2], [2, 0]]))

    def test_size_check(self, k3, path4):
        """Test mixed sizes are a contract violation."""
        assert check_same_size(k3, None) == 3
        with pytest.raises(ContractError):
            check_same_size(k3, path4)


class TestKnowledgeSet:
    """Tests for KnowledgeSet."""

    def test_pairs_normalized(self):
        """Test pairs are ordered and de-duplicated."""
        knowledge = KnowledgeSet(known_edges=[(3, 1), (1, 3), (0, 2)])
        assert knowledge.known_edges == [(0, 2), (1, 3)]
        assert knowledge.size == 2

    def test_overlap(self):
        """Test pairs listed in both sets are reported."""
        knowledge = KnowledgeSet(known_edges=[(0, 1)], known_non_edges=[(1, 0), (1, 2)])
        assert knowledge.overlap() == [(0, 1)]

    def test_rho_bounds(self):
        """Test ρ must lie in [0, 1]."""
        with pytest.raises(ValidationError):
            KnowledgeSet(rho=1.5)

    def test_normalize_pair(self):
        """Test unordered pair normalization."""
        assert normalize_pair(4, 2) == (2, 4)


class TestSpectralConfig:
    """Tests for the spectral parameters."""

    def test_defaults(self):
        """Test α and β are adaptive by default."""
        cfg = SpectralConfig()
        assert cfg.alpha is None and cfg.beta is None
        assert cfg.threshold == 0.5
        assert cfg.beta_convention == BetaConvention.VERTICES

    def test_resolve_adaptive(self):
        """Test α = 1 − β with β from the determined pairs."""
        gstar = TriStateAdjacency.unknown(4)
        for u, v in [(0, 1), (0, 2), (0, 3)]:
            gstar.set(u, v, Cell.ZERO)
        alpha, beta = SpectralConfig().resolve(gstar)
        assert beta == pytest.approx(0.375)
        assert alpha == pytest.approx(0.625)

    def test_resolve_explicit(self):
        """Test explicit weights are kept."""
        alpha, beta = SpectralConfig(alpha=0.2, beta=0.7).resolve(TriStateAdjacency.unknown(3))
        assert (alpha, beta) == (0.2, 0.7)

    @pytest.mark.parametrize("threshold", [0.0, 1.0])
    def test_threshold_bounds(self, threshold):
        """Test the threshold lies strictly between 0 and 1."""
        with pytest.raises(ValidationError):
            SpectralConfig(threshold=threshold)


class TestEigenSystem:
    """Tests for EigenSystem."""

    def test_shape_mismatch(self):
        """Test eigenvectors must match the eigenvalue count."""
        with pytest.raises(ValidationError):
            EigenSystem(eigenvalues=np.ones(3), eigenvectors=np.eye(2))

    def test_reconstruct(self):
        """Test U Λ Uᵀ."""
        es = EigenSystem(eigenvalues=np.array([2.0, 1.0]), eigenvectors=np.eye(2))
        assert np.allclose(es.reconstruct(), np.diag([2.0, 1.0]))
        assert es.relative_residual(np.diag([2.0, 1.0])) == pytest.approx(0.0)


class TestSpectralStep:
    """Tests for SpectralStep."""

    def test_chosen_and_discarded(self):
        """Test the chosen distance follows the sign."""
        step = SpectralStep(index=0, eigenvalue=4.0, sign=-1, d_plus=3.0, d_minus=1.0)
        assert step.d_chosen == 1.0
        assert step.d_discarded == 3.0


class TestPipelineSettings:
    """Tests for PipelineSettings."""

    def test_from_config_auto_beta(self):
        """Test 'auto' in the configuration means the adaptive β."""
        from src.utils.config import Config

        settings = PipelineSettings.from_config(Config())
        assert settings.spectral.beta is None
        assert settings.cosquare_budget == 20
        assert settings.spectral_rounds == 1
        assert settings.fill == "zero"

    def test_from_config_numeric_beta(self):
        """Test a numeric β is carried over."""
        from src.utils.config import Config

        config = Config(spectral={"beta": 0.3, "beta_convention": "normalized"})
        settings = PipelineSettings.from_config(config)
        assert settings.spectral.beta == pytest.approx(0.3)
        assert settings.spectral.beta_convention == BetaConvention.NORMALIZED
