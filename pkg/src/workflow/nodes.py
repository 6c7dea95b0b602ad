"""
LangGraph node implementations for the reconstruction workflow.

Each node function:
1. Receives the current state
2. Runs one pipeline stage
3. Records a StageRecord and its execution time
4. Returns the updated state

Failures in the initialization and first topological pass propagate.
Conflicts met while refining spectral guesses are recorded and the run
falls back to the proven matrix.
"""

import time
from typing import Any, Dict

import numpy as np

from ..models.graphs import CommonNeighborsMatrix, TriStateAdjacency
from ..models.schemas import StageRecord
from ..models.state import GrandState
from ..services.cosquare import instantiate_all
from ..services.graph_ops import finalize, init_partial, square
from ..services.spectral import SpectralAttack, eigendecompose, targeted_error_forgetting
from ..services.topological import run_fixpoint
from ..utils.errors import InconsistentInputsError
from ..utils.logger import get_logger

logger = get_logger({"module": "workflow_nodes"})


def _finish(state: GrandState, node: str, start: float, changes: int, **details: Any) -> None:
    execution_time = time.time() - start
    state["node_execution_times"][node] = state["node_execution_times"].get(node, 0.0) + execution_time
    state["stages"].append(
        StageRecord(stage=node, changes=changes, seconds=execution_time, details=details)
    )
    logger.info("node_completed", node=node, changes=changes, execution_time=round(execution_time, 4))


def _record_conflict(state: GrandState, node: str, error: InconsistentInputsError) -> None:
    logger.warning("node_conflict", node=node, error=str(error), cell=error.cell)
    state["conflicts"].append({
        "node": node,
        "attack": error.attack,
        "cell": list(error.cell) if error.cell else None,
        "message": str(error),
    })


def _fixpoint(gstar: TriStateAdjacency, state: GrandState):
    settings = state["settings"]
    return run_fixpoint(
        gstar,
        state["g2"],
        max_combination_degree=settings.max_combination_degree,
        max_iterations=settings.max_iterations,
    )


def initialize_node(state: GrandState) -> GrandState:
    """
    Node: Initialization

    Places the known edges and non-edges in an all-Unknown matrix.
    """
    start_time = time.time()
    logger.info("node_started", node="initialize")

    g2 = state["g2"]
    gstar = init_partial(g2.n, state["knowledge"])
    state["gstar"] = gstar

    _finish(state, "initialize", start_time, gstar.determined_pairs(), n=g2.n)
    return state


def topological_node(state: GrandState) -> GrandState:
    """
    Node: Topological Attacks

    Closes the initial matrix under the attacks. The result is the proven
    matrix every later stage can fall back to.
    """
    start_time = time.time()
    logger.info("node_started", node="topological")

    result = _fixpoint(state["gstar"], state)
    state["gstar"] = result.gstar
    state["proven"] = result.gstar.copy()

    _finish(
        state, "topological", start_time, result.total_changes,
        iterations=result.iterations, attacks=result.change_counts,
        unknown_pairs=len(result.gstar.unknown_pairs()),
    )
    return state


def spectral_node(state: GrandState) -> GrandState:
    """
    Node: Spectral Attack

    Guesses every cell from the eigenpairs of G², steered by the current matrix.
    """
    start_time = time.time()
    logger.info("node_started", node="spectral")

    gstar = state["gstar"]
    if gstar.is_fully_determined():
        state["spectral_graph"] = None
        if not state.get("rounds_completed"):
            state["path"] = "proven"
        _finish(state, "spectral", start_time, 0, skipped=True)
        return state

    settings = state["settings"]
    if state.get("eigensystem") is None:
        state["eigensystem"] = eigendecompose(state["g2"], settings.spectral.eigenvalue_floor)

    graph, steps = SpectralAttack(settings.spectral).run(gstar, state["eigensystem"])
    state["spectral_graph"] = graph
    state["spectral_steps"] = steps

    alpha, beta = settings.spectral.resolve(gstar)
    _finish(
        state, "spectral", start_time, len(gstar.unknown_pairs()),
        alpha=alpha, beta=beta, steps=len(steps),
    )
    return state


def forgetting_node(state: GrandState) -> GrandState:
    """
    Node: Targeted Error Forgetting

    Keeps the spectral guesses on rows whose counts match G².
    """
    start_time = time.time()
    logger.info("node_started", node="forgetting")

    spectral_graph = state.get("spectral_graph")
    if spectral_graph is None:
        _finish(state, "forgetting", start_time, 0, skipped=True)
        return state

    before = state["gstar"]
    forgotten = targeted_error_forgetting(spectral_graph, before, state["g2"])
    newly = int(np.triu(before.unknowns & ~forgotten.unknowns, k=1).sum())
    state["gstar"] = forgotten

    _finish(
        state, "forgetting", start_time, newly,
        unknown_pairs=len(forgotten.unknown_pairs()),
    )
    return state


def refinement_node(state: GrandState) -> GrandState:
    """
    Node: Refinement

    Runs the topological attacks again on top of the kept spectral guesses.
    A conflict means some guess was wrong; the proven matrix is used instead.
    """
    start_time = time.time()
    logger.info("node_started", node="refinement")
    state["rounds_completed"] = state.get("rounds_completed", 0) + 1

    if state.get("spectral_graph") is None:
        _finish(state, "refinement", start_time, 0, skipped=True)
        return state

    try:
        result = _fixpoint(state["gstar"], state)
    except InconsistentInputsError as e:
        _record_conflict(state, "refinement", e)
        state["gstar"] = state["proven"].copy()
        state["path"] = "proven"
        _finish(state, "refinement", start_time, 0, fallback=True)
        return state

    state["gstar"] = result.gstar
    _finish(
        state, "refinement", start_time, result.total_changes,
        iterations=result.iterations, attacks=result.change_counts,
        unknown_pairs=len(result.gstar.unknown_pairs()),
    )
    return state


def cosquare_node(state: GrandState) -> GrandState:
    """
    Node: Co-square Instantiation

    Fixes each ambiguous component to one completion consistent with G².
    """
    start_time = time.time()
    logger.info("node_started", node="cosquare")

    budget = state["settings"].cosquare_budget
    g2 = state["g2"]
    before = state["gstar"]

    try:
        completed, summary = instantiate_all(before, g2, budget=budget)
    except InconsistentInputsError as e:
        if state.get("path") == "proven":
            raise
        _record_conflict(state, "cosquare", e)
        before = state["proven"].copy()
        state["path"] = "proven"
        completed, summary = instantiate_all(before, g2, budget=budget)

    state["gstar"] = completed
    state["cosquare_input"] = before
    state["cosquare"] = summary
    _finish(
        state, "cosquare", start_time, before.diff_count(completed),
        components=len(summary.components), unresolved_cells=summary.unresolved_cells,
        disconnected_or_bipartite=summary.disconnected_or_bipartite,
    )
    return state


def _squares_match(state: GrandState, gstar: TriStateAdjacency) -> bool:
    graph = finalize(gstar, state["settings"].fill)
    return square(graph) == state["g2"]


def finalize_node(state: GrandState) -> GrandState:
    """
    Node: Finalization

    Fills residual Unknown cells and checks the square of the result against
    G². A refined result that fails the check is replaced by the proven-only
    completion when that one passes.
    """
    start_time = time.time()
    logger.info("node_started", node="finalize")

    g2: CommonNeighborsMatrix = state["g2"]
    settings = state["settings"]
    gstar = state["gstar"]

    if state.get("path") != "proven" and not _squares_match(state, gstar):
        try:
            alternative, summary = instantiate_all(
                state["proven"], g2, budget=settings.cosquare_budget
            )
        except InconsistentInputsError as e:
            _record_conflict(state, "finalize", e)
        else:
            if _squares_match(state, alternative):
                logger.info("proven_completion_selected")
                gstar = alternative
                state["gstar"] = alternative
                state["cosquare"] = summary
                state["cosquare_input"] = state["proven"]
                state["path"] = "proven"

    residual = len(gstar.unknown_pairs())
    if residual:
        logger.warning("unknown_cells_filled", cells=residual, fill=settings.fill)
        state["warnings"].append({
            "node": "finalize",
            "message": f"{residual} Unknown cell(s) set to {settings.fill}",
        })

    graph = finalize(gstar, settings.fill)
    state["graph"] = graph
    verified = square(graph) == g2
    if not verified:
        state["warnings"].append({
            "node": "finalize",
            "message": "square of the reconstruction differs from the input matrix",
        })

    _finish(state, "finalize", start_time, residual, verified=verified, edges=graph.num_edges)
    return state


def initial_state(g2: CommonNeighborsMatrix, knowledge, settings) -> Dict[str, Any]:
    """State the workflow starts from."""
    return {
        "g2": g2,
        "knowledge": knowledge,
        "settings": settings,
        "eigensystem": None,
        "spectral_graph": None,
        "spectral_steps": [],
        "rounds_completed": 0,
        "cosquare": None,
        "path": "refined",
        "stages": [],
        "conflicts": [],
        "warnings": [],
        "node_execution_times": {},
    }
