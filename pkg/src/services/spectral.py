"""
Spectral attack.

Greedy reconstruction from the eigendecomposition G² = U Λ Uᵀ: the adjacency
of G is U diag(±√λ) Uᵀ for some choice of signs, and the attack picks each
sign in turn (largest eigenvalues first) to keep the running matrix close to
a binary matrix and to the cells already determined in G⋆.
Targeted error forgetting then drops the rows whose square disagrees with G².
"""

from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from ..models.graphs import BinaryGraph, Cell, CommonNeighborsMatrix, TriStateAdjacency, check_same_size
from ..models.schemas import BetaConvention, EigenSystem, SpectralConfig, SpectralStep
from ..utils.errors import NumericalError
from ..utils.logger import get_logger
from .graph_ops import square

logger = get_logger({"module": "spectral_attack"})

# eigenvalues more negative than this mean g2 is not a common-neighbors matrix
PSD_TOLERANCE = 1e-6


def eigendecompose(g2: CommonNeighborsMatrix, floor: float = 1e-9) -> EigenSystem:
    """Eigendecomposition of g2 with eigenvalues in descending order.

    Eigenvalues below ``floor`` are clamped to 0.

    Raises:
        NumericalError: If the solver does not converge
    """
    m = g2.m.astype(np.float64)
    try:
        eigenvalues, eigenvectors = linalg.eigh(m)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"eigendecomposition failed: {e}") from e

    if eigenvalues.size and eigenvalues[0] < -PSD_TOLERANCE * max(1.0, abs(eigenvalues[-1])):
        logger.warning("matrix_not_psd", smallest_eigenvalue=float(eigenvalues[0]))

    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    eigenvalues = np.where(eigenvalues < floor, 0.0, eigenvalues)

    logger.debug(
        "eigendecomposition_completed",
        n=g2.n,
        rank=int(np.count_nonzero(eigenvalues)),
        largest=float(eigenvalues[0]) if eigenvalues.size else 0.0,
    )
    return EigenSystem(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def default_beta(
    gstar: TriStateAdjacency, convention: BetaConvention = BetaConvention.VERTICES
) -> float:
    """Knowledge weight derived from the number of determined pairs of G⋆.

    ``vertices`` gives 2·pairs/n², which tops out at (n−1)/n;
    ``normalized`` gives the fraction of determined pairs, capped at 1.
    """
    n = gstar.n
    if n < 2:
        return 0.0
    pairs = gstar.determined_pairs()
    if BetaConvention(convention) == BetaConvention.NORMALIZED:
        return min(1.0, 2.0 * pairs / (n * (n - 1)))
    return 2.0 * pairs / (n * n)


class SpectralAttack:
    """Greedy sign selection over the eigenpairs of G²."""

    def __init__(self, config: Optional[SpectralConfig] = None):
        """
        Initialize the attack.

        Args:
            config: Weights and threshold; defaults to the adaptive β
        """
        self.config = config or SpectralConfig()

    def run(
        self, gstar: TriStateAdjacency, es: EigenSystem
    ) -> Tuple[BinaryGraph, List[SpectralStep]]:
        """Reconstruct a graph and return it with the per-eigenvalue decisions."""
        n = check_same_size(gstar, es)
        alpha, beta = self.config.resolve(gstar)
        threshold = self.config.threshold

        rows, cols = np.triu_indices(n, k=1)
        determined = gstar.cells[rows, cols] != Cell.UNKNOWN
        known_rows, known_cols = rows[determined], cols[determined]
        known_values = gstar.cells[known_rows, known_cols].astype(np.float64)

        def distance(candidate: np.ndarray) -> float:
            total = 0.0
            if alpha:
                binary = (candidate > threshold).astype(np.float64)
                total += alpha * float(np.linalg.norm(candidate - binary))
            if beta and known_values.size:
                fit = candidate[known_rows, known_cols] - known_values
                total += beta * float(np.linalg.norm(fit))
            return total

        running = np.zeros((n, n), dtype=np.float64)
        steps: List[SpectralStep] = []

        for index in np.argsort(-np.abs(es.eigenvalues), kind="stable"):
            eigenvalue = float(es.eigenvalues[index])
            if eigenvalue <= 0.0:
                continue  # both branches coincide
            u = es.eigenvectors[:, index]
            term = np.sqrt(eigenvalue) * np.outer(u, u)

            plus = running + term
            minus = running - term
            d_plus, d_minus = distance(plus), distance(minus)
            sign = 1 if d_plus <= d_minus else -1
            running = plus if sign > 0 else minus

            steps.append(SpectralStep(
                index=int(index), eigenvalue=eigenvalue, sign=sign, d_plus=d_plus, d_minus=d_minus
            ))

        upper = np.triu(running > threshold, k=1)
        adj = (upper | upper.T).astype(np.uint8)

        logger.info(
            "spectral_attack_completed",
            n=n,
            alpha=round(alpha, 6),
            beta=round(beta, 6),
            steps=len(steps),
            negative_signs=sum(1 for s in steps if s.sign < 0),
            edges=int(upper.sum()),
        )
        return BinaryGraph(adj), steps


def spectral_attack(
    gstar: TriStateAdjacency, es: EigenSystem, cfg: Optional[SpectralConfig] = None
) -> BinaryGraph:
    """Knowledge-constrained greedy spectral reconstruction."""
    graph, _ = SpectralAttack(cfg).run(gstar, es)
    return graph


def mismatched_vertices(graph: BinaryGraph, g2: CommonNeighborsMatrix) -> np.ndarray:
    """Vertices incident to a pair where square(graph) disagrees with g2."""
    check_same_size(graph, g2)
    mismatch = square(graph).m != g2.m
    return np.flatnonzero(mismatch.any(axis=1))


def targeted_error_forgetting(
    spec_result: BinaryGraph, topo_result: TriStateAdjacency, g2: CommonNeighborsMatrix
) -> TriStateAdjacency:
    """Lift the spectral result into G⋆, reverting the rows it got wrong.

    Rows and columns of every vertex on a mismatched pair are copied back from
    ``topo_result``. Cells determined in ``topo_result`` always keep their value.
    """
    check_same_size(spec_result, topo_result, g2)
    flagged = mismatched_vertices(spec_result, g2)

    forgotten = TriStateAdjacency.from_graph(spec_result)
    forgotten.revert_vertices(flagged.tolist(), topo_result)

    determined = topo_result.cells != Cell.UNKNOWN
    overridden = int(np.triu(determined & (forgotten.cells != topo_result.cells), k=1).sum())
    forgotten.cells[determined] = topo_result.cells[determined]

    logger.info(
        "error_forgetting_completed",
        flagged_vertices=int(flagged.size),
        unknown_pairs=len(forgotten.unknown_pairs()),
        proven_overrides=overridden,
    )
    return forgotten
