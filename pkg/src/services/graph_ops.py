"""Graph arithmetic, prior-knowledge handling and the brute-force co-square oracle."""

import math
from itertools import combinations
from typing import List, Union

import numpy as np

from ..models.graphs import BinaryGraph, Cell, CommonNeighborsMatrix, TriStateAdjacency
from ..models.schemas import KnowledgeSet
from ..utils.errors import CapacityError, InvalidKnowledgeError
from ..utils.logger import get_logger

logger = get_logger({"module": "graph_ops"})

ORACLE_MAX_N = 8


def square(g: BinaryGraph) -> CommonNeighborsMatrix:
    """Common-neighbors matrix of g: entry (u, v) is |Γ(u) ∩ Γ(v)|, diagonal the degrees."""
    a = g.adj.astype(np.float64)
    # float products are exact for counts far below 2**53
    return CommonNeighborsMatrix(np.rint(a @ a).astype(np.int64))


def init_partial(n: int, knowledge: KnowledgeSet) -> TriStateAdjacency:
    """Place E₁ as One and E₀ as Zero in an otherwise Unknown matrix."""
    for u, v in knowledge.known_edges + knowledge.known_non_edges:
        if u == v:
            raise InvalidKnowledgeError(f"knowledge contains self-loop ({u}, {v})")
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidKnowledgeError(f"knowledge pair ({u}, {v}) out of range for n={n}")

    overlap = knowledge.overlap()
    if overlap:
        raise InvalidKnowledgeError(
            f"{len(overlap)} pair(s) are both known edges and known non-edges, first {overlap[0]}"
        )

    gstar = TriStateAdjacency.unknown(n)
    if knowledge.known_edges:
        rows, cols = np.array(knowledge.known_edges, dtype=np.int64).T
        gstar.cells[rows, cols] = gstar.cells[cols, rows] = Cell.ONE
    if knowledge.known_non_edges:
        rows, cols = np.array(knowledge.known_non_edges, dtype=np.int64).T
        gstar.cells[rows, cols] = gstar.cells[cols, rows] = Cell.ZERO

    logger.debug(
        "partial_initialized",
        n=n,
        known_edges=len(knowledge.known_edges),
        known_non_edges=len(knowledge.known_non_edges),
    )
    return gstar


def sample_knowledge(g: BinaryGraph, rho: float, seed: int) -> KnowledgeSet:
    """Uniformly sample ⌊ρ·n(n−1)/2⌋ unordered pairs of g as prior knowledge."""
    if not 0.0 <= rho <= 1.0:
        raise InvalidKnowledgeError(f"rho must lie in [0, 1], got {rho}")

    n = g.n
    total = n * (n - 1) // 2
    # rho=0.29 over 100 pairs gives 0.29 * 100 == 28.999999999999996 in floats;
    # without the epsilon that floors to 28 pairs instead of 29
    count = min(total, math.floor(rho * total + 1e-9))

    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(total, size=count, replace=False)) if count else np.array([], int)

    rows, cols = np.triu_indices(n, k=1)
    rows, cols = rows[chosen], cols[chosen]
    present = g.adj[rows, cols].astype(bool)

    knowledge = KnowledgeSet(
        known_edges=list(zip(rows[present].tolist(), cols[present].tolist())),
        known_non_edges=list(zip(rows[~present].tolist(), cols[~present].tolist())),
        rho=rho,
        seed=seed,
    )
    logger.debug("knowledge_sampled", rho=rho, seed=seed, pairs=count)
    return knowledge


def finalize(gstar: TriStateAdjacency, fill: Union[Cell, str] = Cell.ZERO) -> BinaryGraph:
    """Replace Unknown cells with ``fill`` and return the binary graph."""
    if isinstance(fill, str):
        fill = Cell[fill.upper()]
    if fill == Cell.UNKNOWN:
        raise ValueError("fill must be Zero or One")

    cells = gstar.cells.copy()
    cells[cells == Cell.UNKNOWN] = fill
    np.fill_diagonal(cells, Cell.ZERO)
    return BinaryGraph(cells.astype(np.uint8))


def cosquare_oracle(g2: CommonNeighborsMatrix, max_n: int = ORACLE_MAX_N) -> List[BinaryGraph]:
    """Every graph H with square(H) = g2, in lexicographic edge-set order.

    The enumeration covers all graphs on n vertices; branches are cut only
    when a degree or a completed pair count already rules them out.
    """
    n = g2.n
    if max_n > ORACLE_MAX_N:
        raise CapacityError(f"the oracle supports at most {ORACLE_MAX_N} vertices, asked {max_n}")
    if n > max_n:
        raise CapacityError(f"oracle limited to n <= {max_n}, got n={n}")

    target = g2.m
    degrees = g2.degrees
    adj = np.zeros((n, n), dtype=np.int64)
    solutions: List[BinaryGraph] = []

    def rows_consistent(u: int) -> bool:
        # rows 0..u are final; pairs among them must match exactly
        counts = adj[: u + 1] @ adj[: u + 1].T
        if not np.array_equal(counts, target[: u + 1, : u + 1]):
            return False
        # pairs with a later vertex can only grow
        partial = adj[: u + 1] @ adj[u + 1 :].T
        return bool(np.all(partial <= target[: u + 1, u + 1 :]))

    def place(u: int) -> None:
        if u == n:
            solutions.append(BinaryGraph(adj.astype(np.uint8)))
            return
        missing = int(degrees[u]) - int(adj[u, :u].sum())
        later = [v for v in range(u + 1, n) if adj[v].sum() < degrees[v]]
        if missing < 0 or missing > len(later):
            return
        for chosen in combinations(later, missing):
            for v in chosen:
                adj[u, v] = adj[v, u] = 1
            if rows_consistent(u):
                place(u + 1)
            for v in chosen:
                adj[u, v] = adj[v, u] = 0

    place(0)
    solutions.sort(key=lambda h: h.edges)
    logger.debug("oracle_enumerated", n=n, solutions=len(solutions))
    return solutions
