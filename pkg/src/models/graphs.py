"""Matrix containers for graphs, common-neighbors matrices and partial reconstructions.

These wrap numpy arrays and validate their invariants on construction.
``BinaryGraph`` and ``CommonNeighborsMatrix`` are read-only once built;
``TriStateAdjacency`` is the single-writer working state of an attack.
"""

from enum import IntEnum
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import ContractError, InconsistentInputsError

Pair = Tuple[int, int]


def normalize_pair(u: int, v: int) -> Pair:
    """Return the unordered pair (u, v) with u < v."""
    return (u, v) if u < v else (v, u)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class Cell(IntEnum):
    """Value of a cell of a partial reconstruction."""
    ZERO = 0
    ONE = 1
    UNKNOWN = -1


class BinaryGraph:
    """Undirected simple graph stored as a dense 0/1 adjacency matrix."""

    def __init__(self, adj: np.ndarray):
        adj = np.array(adj, dtype=np.uint8, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ContractError(f"adjacency must be square, got shape {adj.shape}")
        if np.any(adj > 1):
            raise ContractError("adjacency must be a 0/1 matrix")
        if np.any(np.diagonal(adj)):
            raise ContractError("graph must not contain self-loops")
        if not np.array_equal(adj, adj.T):
            raise ContractError("adjacency must be symmetric")
        self.adj = _frozen(adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Pair]) -> "BinaryGraph":
        """Build a graph on n vertices from an iterable of (u, v) pairs."""
        adj = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            if u == v:
                raise ContractError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ContractError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u, v] = adj[v, u] = 1
        return cls(adj)

    @classmethod
    def empty(cls, n: int) -> "BinaryGraph":
        return cls(np.zeros((n, n), dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @cached_property
    def edges(self) -> List[Pair]:
        """Edges as sorted unordered pairs (u, v), u < v."""
        rows, cols = np.nonzero(np.triu(self.adj, k=1))
        return [(int(u), int(v)) for u, v in zip(rows, cols)]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(self.adj.sum(axis=1).astype(np.int64))

    @cached_property
    def neighbor_sets(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(frozenset(int(w) for w in np.flatnonzero(row)) for row in self.adj)

    def neighbors(self, u: int) -> FrozenSet[int]:
        return self.neighbor_sets[u]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryGraph):
            return NotImplemented
        return np.array_equal(self.adj, other.adj)

    def __hash__(self) -> int:
        return hash((self.n, tuple(self.edges)))

    def __repr__(self) -> str:
        return f"BinaryGraph(n={self.n}, edges={self.num_edges})"


class CommonNeighborsMatrix:
    """Symmetric non-negative integer matrix G²; the diagonal holds degrees."""

    def __init__(self, m: np.ndarray):
        raw = np.asarray(m)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise ContractError(f"common-neighbors matrix must be square, got shape {raw.shape}")
        if raw.dtype.kind == "f":
            if not np.all(np.isfinite(raw)) or not np.array_equal(raw, np.round(raw)):
                raise ContractError("common-neighbors matrix must hold integers")
        m = np.array(raw, dtype=np.int64, copy=True)
        if np.any(m < 0):
            raise ContractError("common-neighbors matrix must be non-negative")
        if not np.array_equal(m, m.T):
            raise ContractError("common-neighbors matrix must be symmetric")
        self.m = _frozen(m)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.diagonal(self.m).astype(np.int64).copy())

    @cached_property
    def row_sums(self) -> np.ndarray:
        return _frozen(self.m.sum(axis=1))

    def __getitem__(self, key):
        return self.m[key]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CommonNeighborsMatrix):
            return NotImplemented
        return np.array_equal(self.m, other.m)

    def __hash__(self) -> int:
        return hash((self.n, self.m.tobytes()))

    def __repr__(self) -> str:
        return f"CommonNeighborsMatrix(n={self.n}, nnz={int(np.count_nonzero(self.m))})"


class TriStateAdjacency:
    """Partial reconstruction G⋆ over {Zero, One, Unknown} with a Zero diagonal.

    Writes are monotone: a determined cell can only be rewritten to the same
    value. Reverting cells to Unknown goes through ``revert_vertices``.
    """

    def __init__(self, cells: np.ndarray):
        cells = np.array(cells, dtype=np.int8, copy=True)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise ContractError(f"cell matrix must be square, got shape {cells.shape}")
        if not np.all(np.isin(cells, (Cell.ZERO, Cell.ONE, Cell.UNKNOWN))):
            raise ContractError("cells must be Zero, One or Unknown")
        if not np.array_equal(cells, cells.T):
            raise ContractError("cell matrix must be symmetric")
        np.fill_diagonal(cells, Cell.ZERO)
        self.cells = cells

    @classmethod
    def unknown(cls, n: int) -> "TriStateAdjacency":
        return cls(np.full((n, n), Cell.UNKNOWN, dtype=np.int8))

    @classmethod
    def from_graph(cls, g: BinaryGraph) -> "TriStateAdjacency":
        """Lift a binary graph into a fully determined tri-state matrix."""
        return cls(g.adj.astype(np.int8))

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    def copy(self) -> "TriStateAdjacency":
        return TriStateAdjacency(self.cells)

    def get(self, u: int, v: int) -> Cell:
        return Cell(int(self.cells[u, v]))

    def set(self, u: int, v: int, value: Cell) -> bool:
        """Determine cell (u, v); returns whether it changed.

        Raises InconsistentInputsError when the cell already holds the other value.
        """
        if u == v:
            if value != Cell.ZERO:
                raise InconsistentInputsError("diagonal cells are always Zero", cell=(u, v))
            return False
        current = self.cells[u, v]
        if current == value:
            return False
        if current != Cell.UNKNOWN:
            raise InconsistentInputsError(
                f"cell is {Cell(int(current)).name}, cannot become {Cell(value).name}",
                cell=normalize_pair(u, v),
            )
        self.cells[u, v] = self.cells[v, u] = value
        return True

    @property
    def ones(self) -> np.ndarray:
        """Boolean mask of One cells (the known adjacency)."""
        return self.cells == Cell.ONE

    @property
    def zeros(self) -> np.ndarray:
        return self.cells == Cell.ZERO

    @property
    def unknowns(self) -> np.ndarray:
        return self.cells == Cell.UNKNOWN

    def known_degrees(self) -> np.ndarray:
        """|Γ⋆(u)| for every vertex."""
        return self.ones.sum(axis=1).astype(np.int64)

    def unknown_counts(self) -> np.ndarray:
        return self.unknowns.sum(axis=1).astype(np.int64)

    def neighbors(self, u: int) -> FrozenSet[int]:
        """Γ⋆(u), the known neighbors of u."""
        return frozenset(int(w) for w in np.flatnonzero(self.cells[u] == Cell.ONE))

    def determined_pairs(self) -> int:
        """Number of determined unordered off-diagonal pairs (|E⋆|)."""
        upper = np.triu(self.cells != Cell.UNKNOWN, k=1)
        return int(upper.sum())

    def unknown_pairs(self) -> List[Pair]:
        rows, cols = np.nonzero(np.triu(self.unknowns, k=1))
        return [(int(u), int(v)) for u, v in zip(rows, cols)]

    def is_fully_determined(self) -> bool:
        return not bool(self.unknowns.any())

    def revert_vertices(self, vertices: Sequence[int], source: "TriStateAdjacency") -> None:
        """Copy rows and columns of ``vertices`` from ``source``, Unknowns included."""
        if source.n != self.n:
            raise ContractError(f"cannot revert from n={source.n} into n={self.n}")
        idx = np.asarray(list(vertices), dtype=np.int64)
        if idx.size == 0:
            return
        self.cells[idx, :] = source.cells[idx, :]
        self.cells[:, idx] = source.cells[:, idx]

    def diff_count(self, other: "TriStateAdjacency") -> int:
        """Number of unordered pairs whose cells differ."""
        return int(np.triu(self.cells != other.cells, k=1).sum())

    def agrees_with(self, g: BinaryGraph) -> bool:
        """Whether every determined cell matches g."""
        determined = self.cells != Cell.UNKNOWN
        return bool(np.all(self.cells[determined] == g.adj.astype(np.int8)[determined]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TriStateAdjacency):
            return NotImplemented
        return np.array_equal(self.cells, other.cells)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"TriStateAdjacency(n={self.n}, determined={self.determined_pairs()}, "
            f"unknown={len(self.unknown_pairs())})"
        )


def check_same_size(*items: Optional[object]) -> int:
    """Return the common vertex count of the given containers or raise ContractError."""
    sizes = {getattr(item, "n") for item in items if item is not None}
    if len(sizes) > 1:
        raise ContractError(f"inputs disagree on vertex count: {sorted(sizes)}")
    return sizes.pop() if sizes else 0
