"""Knowledgeable-Erdős baseline: plain greedy spectral reconstruction, then overwrite with the knowledge."""

from typing import Optional

import numpy as np

from ..models.graphs import BinaryGraph, CommonNeighborsMatrix, TriStateAdjacency
from ..models.schemas import KnowledgeSet, SpectralConfig
from ..services.spectral import SpectralAttack, eigendecompose
from ..utils.logger import get_logger

logger = get_logger({"module": "baseline"})


def run_knowledgeable_erdos(
    g2: CommonNeighborsMatrix,
    knowledge: Optional[KnowledgeSet] = None,
    cfg: Optional[SpectralConfig] = None,
) -> BinaryGraph:
    """
    Reconstruct without using the knowledge during the search.

    The spectral attack runs with β = 0 on an empty partial matrix; known
    non-edges are then forced to 0 and known edges to 1.
    """
    knowledge = knowledge or KnowledgeSet()
    cfg = cfg or SpectralConfig()
    blind = cfg.model_copy(update={"beta": 0.0, "alpha": cfg.alpha if cfg.alpha is not None else 1.0})

    es = eigendecompose(g2, blind.eigenvalue_floor)
    graph, _ = SpectralAttack(blind).run(TriStateAdjacency.unknown(g2.n), es)

    adj = graph.adj.copy()
    for pairs, value in ((knowledge.known_non_edges, 0), (knowledge.known_edges, 1)):
        if pairs:
            rows, cols = np.array(pairs, dtype=np.int64).T
            adj[rows, cols] = adj[cols, rows] = value

    logger.debug(
        "baseline_completed",
        n=g2.n,
        overwritten=knowledge.size,
        edges=int(np.triu(adj, k=1).sum()),
    )
    return BinaryGraph(adj)
