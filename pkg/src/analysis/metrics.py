"""Reconstruction quality metrics: FPR, FNR, RAE and CNE."""

import math

import numpy as np

from ..models.graphs import BinaryGraph, check_same_size
from ..models.schemas import EdgeCounts, MetricsReport
from ..services.graph_ops import square
from ..utils.errors import UndefinedMetricError
from ..utils.logger import get_logger

logger = get_logger({"module": "metrics"})


class ReconstructionEvaluator:
    """Compares a reconstruction Ĝ with the true graph G."""

    def __init__(self, g: BinaryGraph):
        """
        Initialize the evaluator.

        Args:
            g: The true graph; must have at least one edge

        Raises:
            UndefinedMetricError: If g has no edges
        """
        if g.num_edges == 0:
            raise UndefinedMetricError("metrics are undefined for a graph without edges")
        self.g = g
        self.g2 = square(g).m
        self._g2_norm_sq = int(np.square(self.g2).sum())

    def edge_counts(self, ghat: BinaryGraph) -> EdgeCounts:
        """Confusion counts over unordered off-diagonal pairs."""
        check_same_size(self.g, ghat)
        rows, cols = np.triu_indices(self.g.n, k=1)
        truth = self.g.adj[rows, cols].astype(bool)
        guess = ghat.adj[rows, cols].astype(bool)
        return EdgeCounts(
            true_positives=int(np.sum(truth & guess)),
            false_positives=int(np.sum(~truth & guess)),
            true_negatives=int(np.sum(~truth & ~guess)),
            false_negatives=int(np.sum(truth & ~guess)),
        )

    def evaluate(self, ghat: BinaryGraph) -> MetricsReport:
        """Compute all four metrics for ghat."""
        counts = self.edge_counts(ghat)
        edges = counts.true_positives + counts.false_negatives
        negatives = counts.true_negatives + counts.false_positives

        # ‖G − Ĝ‖²_F counts each wrong pair twice, ‖G‖²_F each edge twice
        rae = math.sqrt((counts.false_positives + counts.false_negatives) / edges)

        diff = self.g2 - square(ghat).m
        cne = math.sqrt(int(np.square(diff).sum()) / self._g2_norm_sq)

        report = MetricsReport(
            fpr=counts.false_positives / negatives if negatives else 0.0,
            fnr=counts.false_negatives / edges,
            rae=rae,
            cne=cne,
            edge_counts=counts,
        )
        logger.debug(
            "reconstruction_evaluated",
            fpr=round(report.fpr, 6),
            fnr=round(report.fnr, 6),
            rae=round(report.rae, 6),
            cne=round(report.cne, 6),
        )
        return report


def evaluate(g: BinaryGraph, ghat: BinaryGraph) -> MetricsReport:
    """Metrics of ghat against the true graph g."""
    return ReconstructionEvaluator(g).evaluate(ghat)
