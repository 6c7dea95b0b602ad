"""
Co-square handling.

After the attacks, the remaining Unknown cells usually sit in small groups
whose completions all produce the same common-neighbor counts (co-square
subgraphs). This module groups them, enumerates the completions of each
group that agree with G², and fixes one of them.
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..models.graphs import Cell, CommonNeighborsMatrix, TriStateAdjacency, check_same_size
from ..models.schemas import AmbiguousComponent, CosquareSummary
from ..utils.errors import CapacityError, InconsistentInputsError
from ..utils.logger import get_logger

logger = get_logger({"module": "cosquare"})

DEFAULT_BUDGET = 20
# cap on (assignments × tracked entries) evaluated at once
CHUNK_ELEMENTS = 1 << 22


def find_ambiguous_components(gstar: TriStateAdjacency) -> List[AmbiguousComponent]:
    """Group Unknown cells that share a vertex, smallest groups first."""
    unknown = np.triu(gstar.unknowns, k=1)
    if not unknown.any():
        return []

    _, labels = connected_components(csr_matrix(unknown), directed=False)
    groups: Dict[int, List[Tuple[int, int]]] = {}
    for u, v in gstar.unknown_pairs():
        groups.setdefault(int(labels[u]), []).append((u, v))

    components = []
    for cells in groups.values():
        vertices = sorted({w for cell in cells for w in cell})
        components.append(AmbiguousComponent(cells=sorted(cells), vertices=vertices))
    components.sort(key=lambda c: (c.size, c.cells[0]))

    logger.debug(
        "components_found",
        components=len(components),
        largest=components[-1].size,
    )
    return components


@dataclass
class _CountModel:
    """Common-neighbor counts of the rows of a component as a function of its cells.

    For an assignment x of the component cells, the counts at the tracked
    entries are ``base + x @ linear + pair terms``; ``slack`` counts products
    involving Unknown cells of other components, which may add up to that
    many common neighbors later.
    """

    entries: np.ndarray  # flat indices into the (rows × n) table
    target: np.ndarray
    base: np.ndarray
    slack: np.ndarray
    linear: np.ndarray  # (k, entries)
    pair_cells: np.ndarray  # (t, 2) cell indices
    pair_entries: np.ndarray  # (t,) positions into entries

    def feasible(self, assignments: np.ndarray) -> np.ndarray:
        """Boolean mask of the assignments (chunk × k, 0/1) compatible with G²."""
        assignments = assignments.astype(np.float64)
        counts = self.base + assignments @ self.linear
        if self.pair_cells.size:
            products = assignments[:, self.pair_cells[:, 0]] * assignments[:, self.pair_cells[:, 1]]
            for position in np.unique(self.pair_entries):
                counts[:, position] += products[:, self.pair_entries == position].sum(axis=1)
        ok = (counts <= self.target) & (self.target <= counts + self.slack)
        return ok.all(axis=1)


def _count_model(
    gstar: TriStateAdjacency, g2: CommonNeighborsMatrix, comp: AmbiguousComponent
) -> Tuple[_CountModel, bool]:
    """Build the count model; the flag is False when fixed entries already disagree."""
    n = gstar.n
    rows = np.asarray(comp.vertices, dtype=np.int64)
    row_of = {int(v): i for i, v in enumerate(rows)}
    k = comp.size

    ones = gstar.ones
    own = np.zeros((n, n), dtype=bool)
    for u, v in comp.cells:
        own[u, v] = own[v, u] = True
    foreign = gstar.unknowns & ~own

    ones_f = ones.astype(np.int64)
    known = ones.astype(np.float64)
    base = np.rint(known[rows] @ known.T).astype(np.int64)
    slack = np.rint(known[rows] @ foreign.astype(np.float64).T).astype(np.int64)
    target = g2.m[rows]

    linear = np.zeros((k, rows.size, n), dtype=np.int64)
    for e, (x, y) in enumerate(comp.cells):
        for end, other in ((x, y), (y, x)):
            # (end, other) pairs with a One (b, other) in column b
            linear[e, row_of[end], :] += ones_f[:, other]
            # and as the partner of row a through a One (a, other)
            linear[e, :, end] += ones_f[rows, other]
            linear[e, row_of[end], end] += 1  # own degree

    pair_cells: List[Tuple[int, int]] = []
    pair_flat: List[int] = []
    incident: Dict[int, List[Tuple[int, int]]] = {}
    for e, (x, y) in enumerate(comp.cells):
        incident.setdefault(x, []).append((e, y))
        incident.setdefault(y, []).append((e, x))
    for shared, touching in incident.items():
        for i, (e1, a) in enumerate(touching):
            for e2, b in touching[i + 1:]:
                # both cells present make `shared` a common neighbor of a and b
                for row, col in ((a, b), (b, a)):
                    pair_cells.append((e1, e2))
                    pair_flat.append(row_of[row] * n + col)

    linear = linear.reshape(k, -1)
    base, slack, target = base.ravel(), slack.ravel(), target.ravel()

    varying = linear.any(axis=0)
    if pair_flat:
        varying[np.asarray(pair_flat)] = True
    fixed = ~varying
    fixed_ok = bool(np.all(
        (base[fixed] <= target[fixed]) & (target[fixed] <= base[fixed] + slack[fixed])
    ))

    entries = np.flatnonzero(varying)
    position = {int(f): i for i, f in enumerate(entries)}
    model = _CountModel(
        entries=entries,
        target=target[entries],
        base=base[entries],
        slack=slack[entries],
        linear=linear[:, entries].astype(np.float64),
        pair_cells=np.asarray(pair_cells, dtype=np.int64).reshape(-1, 2),
        pair_entries=np.asarray([position[f] for f in pair_flat], dtype=np.int64),
    )
    return model, fixed_ok


def component_solutions(
    gstar: TriStateAdjacency,
    g2: CommonNeighborsMatrix,
    comp: AmbiguousComponent,
    budget: int = DEFAULT_BUDGET,
) -> np.ndarray:
    """Every assignment of the component cells compatible with G², in canonical order.

    Assignments are integers whose most significant bit is the first cell.

    Raises:
        CapacityError: If the component has more cells than ``budget``
    """
    check_same_size(gstar, g2)
    k = comp.size
    if k > budget:
        raise CapacityError(f"component of {k} cells exceeds the budget of {budget}")
    for u, v in comp.cells:
        if gstar.cells[u, v] != Cell.UNKNOWN:
            raise ValueError(f"cell ({u}, {v}) of the component is already determined")

    model, fixed_ok = _count_model(gstar, g2, comp)
    if not fixed_ok:
        return np.array([], dtype=np.int64)

    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    chunk = max(1, CHUNK_ELEMENTS // max(1, model.entries.size))
    found = []
    for start in range(0, 1 << k, chunk):
        codes = np.arange(start, min(start + chunk, 1 << k), dtype=np.int64)
        assignments = (codes[:, None] >> shifts) & 1
        found.append(codes[model.feasible(assignments)])
    return np.concatenate(found) if found else np.array([], dtype=np.int64)


def _apply(gstar: TriStateAdjacency, comp: AmbiguousComponent, code: int) -> None:
    k = comp.size
    for e, (u, v) in enumerate(comp.cells):
        bit = (int(code) >> (k - 1 - e)) & 1
        gstar.cells[u, v] = gstar.cells[v, u] = Cell.ONE if bit else Cell.ZERO


def instantiate_cosquare(
    gstar: TriStateAdjacency,
    g2: CommonNeighborsMatrix,
    comp: AmbiguousComponent,
    budget: int = DEFAULT_BUDGET,
) -> TriStateAdjacency:
    """Fix the component to its first completion compatible with G².

    Updates ``comp.solutions_found`` and ``comp.resolved``.

    Raises:
        InconsistentInputsError: If no completion matches G²
        CapacityError: If the component has more cells than ``budget``
    """
    solutions = component_solutions(gstar, g2, comp, budget)
    comp.solutions_found = int(solutions.size)
    if solutions.size == 0:
        raise InconsistentInputsError(
            "no completion of the component matches the common-neighbor counts",
            cell=comp.cells[0],
            attack="cosquare",
        )

    result = gstar.copy()
    _apply(result, comp, int(solutions[0]))
    comp.resolved = True
    logger.debug("component_instantiated", cells=comp.size, solutions=comp.solutions_found)
    return result


def instantiate_all(
    gstar: TriStateAdjacency,
    g2: CommonNeighborsMatrix,
    components: Optional[List[AmbiguousComponent]] = None,
    budget: int = DEFAULT_BUDGET,
) -> Tuple[TriStateAdjacency, CosquareSummary]:
    """Instantiate every component within budget, backtracking across them.

    Components are searched in order; a choice that leaves a later component
    without any completion is undone and the next one tried. Components over
    budget stay Unknown and are reported.

    Raises:
        InconsistentInputsError: If no combination of completions matches G²
    """
    components = find_ambiguous_components(gstar) if components is None else components
    searchable = [c for c in components if c.size <= budget]
    skipped = [c for c in components if c.size > budget]
    for comp in skipped:
        logger.warning("cosquare_budget_exceeded", cells=comp.size, budget=budget)

    work = gstar.copy()

    def search(i: int) -> bool:
        if i == len(searchable):
            return True
        comp = searchable[i]
        solutions = component_solutions(work, g2, comp, budget)
        comp.solutions_found = int(solutions.size)
        for code in solutions:
            _apply(work, comp, int(code))
            if search(i + 1):
                comp.resolved = True
                return True
        for u, v in comp.cells:
            work.cells[u, v] = work.cells[v, u] = Cell.UNKNOWN
        return False

    if not search(0):
        first = searchable[0].cells[0] if searchable else None
        raise InconsistentInputsError(
            "no combination of co-square completions matches the common-neighbor counts",
            cell=first,
            attack="cosquare",
        )

    summary = CosquareSummary(
        components=components,
        unresolved_cells=sum(c.size for c in skipped),
        disconnected_or_bipartite=bipartite_or_disconnected_check(g2),
    )
    logger.info(
        "cosquare_instantiated",
        components=len(components),
        resolved=len(searchable),
        unresolved_cells=summary.unresolved_cells,
        max_solutions=summary.max_solutions,
    )
    return work, summary


def enumerate_completions(
    gstar: TriStateAdjacency,
    g2: CommonNeighborsMatrix,
    budget: int = DEFAULT_BUDGET,
    limit: Optional[int] = None,
) -> Iterator[TriStateAdjacency]:
    """Every combination of component completions that agrees with G².

    Completions come in the order ``instantiate_all`` searches, so the first
    one is the completion it picks. Components over budget stay Unknown.

    Args:
        gstar: Partial reconstruction before instantiation
        g2: Common-neighbors matrix
        budget: Largest component searched
        limit: Stop after this many completions
    """
    searchable = [c for c in find_ambiguous_components(gstar) if c.size <= budget]
    work = gstar.copy()
    emitted = 0

    def search(i: int) -> Iterator[TriStateAdjacency]:
        nonlocal emitted
        if i == len(searchable):
            emitted += 1
            yield work.copy()
            return
        comp = searchable[i]
        for code in component_solutions(work, g2, comp, budget):
            _apply(work, comp, int(code))
            yield from search(i + 1)
            if limit is not None and emitted >= limit:
                break
        for u, v in comp.cells:
            work.cells[u, v] = work.cells[v, u] = Cell.UNKNOWN

    yield from search(0)


def bipartite_or_disconnected_check(g2: CommonNeighborsMatrix) -> bool:
    """Whether the graph of non-zero off-diagonal entries of G² is disconnected.

    That happens exactly when the target graph is disconnected or bipartite.
    """
    if g2.n < 2:
        return False
    linked = g2.m > 0
    np.fill_diagonal(linked, False)
    count, _ = connected_components(csr_matrix(linked), directed=False)
    return count > 1
