"""
Topological attacks.

Seven sound inference rules that turn Unknown cells of a partial
reconstruction G⋆ into Zero or One using the degrees and common-neighbor
counts held by G², and their composition to a fixpoint:

1. Degree combination: row sums of G² equal the degree sums of neighbors
2. Degree matching: a vertex with all its neighbors known has no other edge
3. Neighbor matching: a pair with all its common neighbors known has no other
4. Degree completion: a vertex missing exactly as many edges as it has Unknowns
5. Neighbor completion: same, for the common neighbors of a pair
6. Triangle: the common neighbors of a known edge lie among shared G² neighbors
7. Bi-clique: vertices sharing a complete neighborhood

Every attack reads one snapshot of G⋆ (matrix products over the known
adjacency), then merges all of its writes at once. Writes only ever target
Unknown cells; an inference that contradicts a determined cell is a conflict.
"""

from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..models.graphs import Cell, CommonNeighborsMatrix, TriStateAdjacency, check_same_size
from ..models.schemas import AttackOutcome, Conflict, FixpointResult, KnowledgeSet
from ..utils.errors import InconsistentInputsError
from .graph_ops import init_partial

DEFAULT_MAX_COMBINATION_DEGREE = 2

ATTACK_ORDER: Tuple[str, ...] = (
    "degree_combination",
    "degree_matching",
    "neighbor_matching",
    "degree_completion",
    "neighbor_completion",
    "triangle",
    "biclique",
)


def _count(mask: np.ndarray) -> np.ndarray:
    return mask.astype(np.float64)


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer matrix product of 0/1 masks through BLAS."""
    return np.rint(_count(a) @ _count(b)).astype(np.int64)


def _upper_cells(mask: np.ndarray) -> List[Tuple[int, int]]:
    rows, cols = np.nonzero(np.triu(mask, k=0))
    return [(int(u), int(v)) for u, v in zip(rows, cols)]


class _Snapshot:
    """Read-only view of G⋆ and G² shared by the rules of one pass."""

    def __init__(self, gstar: TriStateAdjacency, g2: CommonNeighborsMatrix):
        self.n = gstar.n
        self.cells = gstar.cells
        self.ones = gstar.ones
        self.zeros = gstar.zeros
        self.unknown = gstar.unknowns
        self.m = g2.m
        self.deg = g2.degrees
        self.row_sums = g2.row_sums
        self.known_deg = self.ones.sum(axis=1).astype(np.int64)
        self.off = ~np.eye(self.n, dtype=bool)
        self._common: Optional[np.ndarray] = None

    @property
    def common(self) -> np.ndarray:
        """|Γ⋆(u) ∩ Γ⋆(v)| for every pair."""
        if self._common is None:
            self._common = _product(self.ones, self.ones)
        return self._common


class TopologicalAttacker:
    """Applies the topological attacks against one common-neighbors matrix."""

    def __init__(
        self,
        g2: CommonNeighborsMatrix,
        max_combination_degree: int = DEFAULT_MAX_COMBINATION_DEGREE,
        max_iterations: int = 10_000,
    ):
        """
        Initialize the attacker.

        Args:
            g2: Common-neighbors matrix of the target graph
            max_combination_degree: Degree bound for the subset enumeration
            max_iterations: Guard on the number of fixpoint cycles
        """
        if max_combination_degree < 0:
            raise ValueError("max_combination_degree must be non-negative")
        self.g2 = g2
        self.max_combination_degree = max_combination_degree
        self.max_iterations = max_iterations
        self.logger = logger.bind(component="topological_attacker")
        self._attacks: Dict[str, Callable[[_Snapshot], Tuple]] = {
            "degree_combination": self._degree_combination,
            "degree_matching": self._degree_matching,
            "neighbor_matching": self._neighbor_matching,
            "degree_completion": self._degree_completion,
            "neighbor_completion": self._neighbor_completion,
            "triangle": self._triangle,
            "biclique": self._biclique,
        }

    # ------------------------------------------------------------------
    # Single passes
    # ------------------------------------------------------------------

    def apply(self, name: str, gstar: TriStateAdjacency) -> AttackOutcome:
        """Run one attack on a copy of gstar."""
        check_same_size(gstar, self.g2)
        if name not in self._attacks:
            raise KeyError(f"unknown attack: {name}")

        snap = _Snapshot(gstar, self.g2)
        ones, zeros, findings = self._attacks[name](snap)
        return self._merge(name, gstar, snap, ones, zeros, findings)

    def _merge(
        self,
        name: str,
        gstar: TriStateAdjacency,
        snap: _Snapshot,
        ones: Optional[np.ndarray],
        zeros: Optional[np.ndarray],
        findings: List[Conflict],
    ) -> AttackOutcome:
        n = snap.n
        ones = np.zeros((n, n), dtype=bool) if ones is None else (ones | ones.T)
        zeros = np.zeros((n, n), dtype=bool) if zeros is None else (zeros | zeros.T)

        conflicts = list(findings)
        for cell in _upper_cells(ones & snap.zeros):
            conflicts.append(Conflict(attack=name, cell=cell, message="inferred One on a Zero cell"))
        for cell in _upper_cells(zeros & snap.ones):
            conflicts.append(Conflict(attack=name, cell=cell, message="inferred Zero on a One cell"))
        for cell in _upper_cells(ones & zeros & snap.unknown):
            conflicts.append(Conflict(attack=name, cell=cell, message="inferred both One and Zero"))

        updated = gstar.copy()
        write_ones = ones & snap.unknown & ~zeros
        write_zeros = zeros & snap.unknown & ~ones
        updated.cells[write_ones] = Cell.ONE
        updated.cells[write_zeros] = Cell.ZERO

        changes = int(np.triu(write_ones | write_zeros, k=1).sum())
        return AttackOutcome(attack=name, updated=updated, changes=changes, conflicts=conflicts)

    # ------------------------------------------------------------------
    # Rules
    # ------------------------------------------------------------------

    def _degree_combination(self, snap: _Snapshot):
        """Neighbor sets whose degree sum is the only one matching the row sum."""
        n = snap.n
        ones = np.zeros((n, n), dtype=bool)
        zeros = np.zeros((n, n), dtype=bool)
        findings: List[Conflict] = []

        for u in np.flatnonzero(snap.deg <= self.max_combination_degree):
            u = int(u)
            unknown_row = snap.unknown[u]
            if not unknown_row.any():
                continue

            known = np.flatnonzero(snap.ones[u])
            missing = int(snap.deg[u]) - known.size
            target = int(snap.row_sums[u]) - int(snap.deg[known].sum())
            if missing < 0:
                continue  # reported by degree matching

            if missing == 0:
                if target != 0:
                    findings.append(Conflict(
                        attack="degree_combination", cell=(u, u),
                        message=f"neighbors complete but row sum leaves {target} unexplained",
                    ))
                    continue
                zeros[u] |= unknown_row
                continue

            # every missing neighbor has degree >= 1, so one of them has at most
            # target - (missing - 1)
            bound = target - (missing - 1)
            candidate = unknown_row & (snap.deg >= 1) & (snap.deg <= bound)
            zeros[u] |= unknown_row & ~candidate

            members = self._unique_subset(snap.deg, np.flatnonzero(candidate), missing, target)
            if members is None:
                continue
            if members.size == 0 and missing > 0:
                findings.append(Conflict(
                    attack="degree_combination", cell=(u, u),
                    message="no neighbor set matches the row sum",
                ))
                continue
            ones[u, members] = True
            rest = unknown_row.copy()
            rest[members] = False
            zeros[u] |= rest

        return ones, zeros, findings

    @staticmethod
    def _unique_subset(
        degrees: np.ndarray, candidates: np.ndarray, size: int, target: int
    ) -> Optional[np.ndarray]:
        """Members of the only size-``size`` subset with degree sum ``target``.

        Returns an empty array when no subset matches and None when several do.
        Subsets are counted per multiset of candidate degrees.
        """
        values, counts = np.unique(degrees[candidates], return_counts=True)
        values = values.tolist()
        counts = counts.tolist()
        position = {value: i for i, value in enumerate(values)}

        def multisets(start: int, left: int, remaining: int, picked: Tuple[int, ...]):
            # indices are non-decreasing; the last one is looked up directly
            if left == 1:
                i = position.get(remaining)
                if i is not None and i >= start:
                    yield picked + (i,)
                return
            for i in range(start, len(values)):
                if values[i] * left > remaining:
                    break
                yield from multisets(i, left - 1, remaining - values[i], picked + (i,))

        total = 0
        unique: Tuple[int, ...] = ()
        for picked in multisets(0, size, target, ()):
            ways = 1
            for i in set(picked):
                ways *= comb(counts[i], picked.count(i))
            if ways == 0:
                continue
            total += ways
            unique = picked
            if total > 1:
                return None

        if total == 0:
            return np.array([], dtype=np.int64)
        # a single subset takes each chosen degree class whole
        chosen = [values[i] for i in set(unique)]
        return candidates[np.isin(degrees[candidates], chosen)]

    def _degree_matching(self, snap: _Snapshot):
        """Vertices whose known degree reached their degree get Zero elsewhere."""
        findings = [
            Conflict(attack="degree_matching", cell=(int(u), int(u)),
                     message="more known neighbors than the degree")
            for u in np.flatnonzero(snap.known_deg > snap.deg)
        ]
        complete = snap.known_deg == snap.deg
        return None, complete[:, None] & snap.unknown, findings

    def _neighbor_matching(self, snap: _Snapshot):
        """Pairs whose common neighbors are all known exclude the other known neighbors."""
        common = snap.common
        matched = (common == snap.m) & snap.off
        findings = [
            Conflict(attack="neighbor_matching", cell=cell,
                     message="more known common neighbors than G² allows")
            for cell in _upper_cells((common > snap.m) & snap.off)
        ]
        # (w, v) is excluded when w ∈ Γ⋆(u) for some u matched with v
        excluded = _product(snap.ones, matched) > 0
        return None, excluded & snap.unknown, findings

    def _degree_completion(self, snap: _Snapshot):
        """Vertices needing all their Unknown cells get them as One."""
        unknown_count = snap.unknown.sum(axis=1)
        reachable = snap.known_deg + unknown_count
        findings = [
            Conflict(attack="degree_completion", cell=(int(u), int(u)),
                     message="degree cannot be reached with the remaining Unknown cells")
            for u in np.flatnonzero(snap.deg > reachable)
        ]
        fire = (snap.deg == reachable) & (unknown_count > 0)
        return fire[:, None] & snap.unknown, None, findings

    def _neighbor_completion(self, snap: _Snapshot):
        """Pairs needing every remaining potential common neighbor get them all."""
        open_cells = ~snap.zeros
        potential = _product(open_cells, open_cells)
        common = snap.common
        missing = snap.m - common
        available = potential - common

        fire = snap.off & (missing > 0) & (available == missing)
        findings = [
            Conflict(attack="neighbor_completion", cell=cell,
                     message="not enough potential common neighbors")
            for cell in _upper_cells(snap.off & (available < missing))
        ]
        reach = _product(fire, open_cells) > 0
        return reach & open_cells, None, findings

    def _triangle(self, snap: _Snapshot):
        """Known edges whose shared G² neighbors number exactly G²(u, v)."""
        shared = (snap.m > 0) & snap.off
        candidates = _product(shared, shared)
        edges = snap.ones & (snap.m > 0)

        fire = edges & (candidates == snap.m)
        findings = [
            Conflict(attack="triangle", cell=cell,
                     message="fewer triangle candidates than common neighbors")
            for cell in _upper_cells(edges & (candidates < snap.m))
        ]
        reach = _product(fire, shared) > 0
        return reach & shared, None, findings

    def _biclique(self, snap: _Snapshot):
        """Vertices sharing a complete neighborhood, and their complements."""
        complete = (snap.known_deg == snap.deg)[:, None] & snap.off
        covers = complete & (snap.m == snap.deg[:, None])

        missing_neighbors = (snap.deg - snap.known_deg)[None, :]
        missing_common = snap.m - snap.common
        confined = complete & ~covers & (missing_neighbors == missing_common)

        # covers[u, v]: v is adjacent to all of Γ⋆(u)
        ones = _product(covers.T, snap.ones) > 0
        # confined[u, v]: v has no Unknown edge outside Γ⋆(u)
        zeros = (_product(confined.T, ~snap.ones) > 0) & snap.unknown
        return ones, zeros, []

    # ------------------------------------------------------------------
    # Composition
    # ------------------------------------------------------------------

    def run_cycle(
        self, gstar: TriStateAdjacency, order: Sequence[str] = ATTACK_ORDER
    ) -> Tuple[TriStateAdjacency, Dict[str, int]]:
        """Apply every attack once, in order. Raises on the first conflict."""
        changes: Dict[str, int] = {}
        for name in order:
            outcome = self.apply(name, gstar)
            if outcome.conflicts:
                first = outcome.conflicts[0]
                self.logger.warning(
                    "attack_conflict", attack=name, cell=first.cell,
                    conflicts=len(outcome.conflicts),
                )
                raise InconsistentInputsError(first.message, cell=first.cell, attack=name)
            changes[name] = outcome.changes
            gstar = outcome.updated
        return gstar, changes

    def run(
        self, gstar: TriStateAdjacency, order: Sequence[str] = ATTACK_ORDER
    ) -> FixpointResult:
        """Cycle the attacks until a full cycle changes nothing."""
        unknown_order = set(order) - set(ATTACK_ORDER)
        if unknown_order:
            raise KeyError(f"unknown attacks: {sorted(unknown_order)}")

        totals = {name: 0 for name in order}
        history: List[Dict[str, int]] = []
        current = gstar.copy()

        for iteration in range(1, self.max_iterations + 1):
            current, changes = self.run_cycle(current, order)
            history.append(changes)
            for name, count in changes.items():
                totals[name] += count
            self.logger.debug("cycle_completed", iteration=iteration, changes=changes)
            if sum(changes.values()) == 0:
                break
        else:
            self.logger.warning("fixpoint_iteration_limit", max_iterations=self.max_iterations)

        self.logger.info(
            "fixpoint_reached",
            iterations=len(history),
            total_changes=sum(totals.values()),
            remaining_unknown=len(current.unknown_pairs()),
        )
        return FixpointResult(
            gstar=current, iterations=len(history), change_counts=totals, history=history
        )


def _attack(name: str):
    def attack(gstar: TriStateAdjacency, g2: CommonNeighborsMatrix, **kwargs) -> AttackOutcome:
        return TopologicalAttacker(g2, **kwargs).apply(name, gstar)

    attack.__name__ = f"{name}_attack"
    attack.__doc__ = f"Apply the {name.replace('_', ' ')} attack once."
    return attack


def degree_combination_attack(
    gstar: TriStateAdjacency,
    g2: CommonNeighborsMatrix,
    max_degree: int = DEFAULT_MAX_COMBINATION_DEGREE,
) -> AttackOutcome:
    """Apply the degree combination attack to vertices of degree at most max_degree."""
    return TopologicalAttacker(g2, max_combination_degree=max_degree).apply(
        "degree_combination", gstar
    )


degree_matching_attack = _attack("degree_matching")
neighbor_matching_attack = _attack("neighbor_matching")
degree_completion_attack = _attack("degree_completion")
neighbor_completion_attack = _attack("neighbor_completion")
triangle_attack = _attack("triangle")
biclique_attack = _attack("biclique")


def run_fixpoint(
    gstar: TriStateAdjacency,
    g2: CommonNeighborsMatrix,
    max_combination_degree: int = DEFAULT_MAX_COMBINATION_DEGREE,
    order: Sequence[str] = ATTACK_ORDER,
    max_iterations: int = 10_000,
) -> FixpointResult:
    """Close an existing partial reconstruction under the topological attacks."""
    attacker = TopologicalAttacker(g2, max_combination_degree, max_iterations)
    return attacker.run(gstar, order)


def topological_fixpoint(
    knowledge: KnowledgeSet,
    g2: CommonNeighborsMatrix,
    max_combination_degree: int = DEFAULT_MAX_COMBINATION_DEGREE,
    order: Sequence[str] = ATTACK_ORDER,
) -> TriStateAdjacency:
    """Initialize G⋆ from the knowledge and close it under the topological attacks."""
    gstar = init_partial(g2.n, knowledge)
    return run_fixpoint(gstar, g2, max_combination_degree, order).gstar
