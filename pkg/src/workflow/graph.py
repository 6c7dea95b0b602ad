"""LangGraph workflow construction for the GRAND reconstruction pipeline."""

from typing import Optional, Tuple

from langgraph.graph import END, StateGraph

from ..models.graphs import BinaryGraph, CommonNeighborsMatrix
from ..models.schemas import KnowledgeSet, PipelineSettings, SpectralConfig
from ..models.state import GrandState, PipelineTrace
from ..utils.logger import get_logger

logger = get_logger({"module": "workflow_graph"})


def create_grand_graph():
    """
    Create and compile the reconstruction workflow.

    initialize → topological → spectral → forgetting → refinement
    → (spectral again while rounds remain) → cosquare → finalize

    Returns:
        Compiled graph ready for ``invoke``
    """
    logger.debug("creating_grand_graph")

    workflow = StateGraph(GrandState)

    from .conditions import should_run_another_round
    from .nodes import (
        cosquare_node,
        finalize_node,
        forgetting_node,
        initialize_node,
        refinement_node,
        spectral_node,
        topological_node,
    )

    workflow.add_node("initialize", initialize_node)
    workflow.add_node("topological", topological_node)
    workflow.add_node("spectral", spectral_node)
    workflow.add_node("forgetting", forgetting_node)
    workflow.add_node("refinement", refinement_node)
    workflow.add_node("cosquare", cosquare_node)
    workflow.add_node("finalize", finalize_node)

    workflow.set_entry_point("initialize")

    workflow.add_edge("initialize", "topological")
    workflow.add_edge("topological", "spectral")
    workflow.add_edge("spectral", "forgetting")
    workflow.add_edge("forgetting", "refinement")

    workflow.add_conditional_edges(
        "refinement",
        should_run_another_round,
        {
            "spectral": "spectral",
            "cosquare": "cosquare",
        },
    )

    workflow.add_edge("cosquare", "finalize")
    workflow.add_edge("finalize", END)

    return workflow.compile()


def run_grand(
    g2: CommonNeighborsMatrix,
    knowledge: Optional[KnowledgeSet] = None,
    cfg: Optional[SpectralConfig] = None,
    settings: Optional[PipelineSettings] = None,
) -> Tuple[BinaryGraph, PipelineTrace]:
    """
    Reconstruct a graph from its common-neighbors matrix.

    Args:
        g2: Common-neighbors matrix of the target
        knowledge: Known edges and non-edges, empty by default
        cfg: Spectral parameters; overrides ``settings.spectral`` when given
        settings: Remaining pipeline parameters

    Returns:
        The reconstruction and the trace of the run
    """
    from .nodes import initial_state

    knowledge = knowledge or KnowledgeSet()
    settings = settings or PipelineSettings()
    if cfg is not None:
        settings = settings.model_copy(update={"spectral": cfg})

    logger.info(
        "running_grand",
        n=g2.n,
        known_edges=len(knowledge.known_edges),
        known_non_edges=len(knowledge.known_non_edges),
    )

    app = create_grand_graph()
    # seven nodes plus three per extra round
    limit = 10 + 3 * settings.spectral_rounds
    try:
        final_state = app.invoke(initial_state(g2, knowledge, settings), {"recursion_limit": limit})
    except Exception as e:
        logger.error("workflow_execution_failed", error=str(e), error_type=type(e).__name__)
        raise

    trace = PipelineTrace(
        stages=final_state["stages"],
        conflicts=final_state["conflicts"],
        warnings=final_state["warnings"],
        cosquare=final_state.get("cosquare"),
        cosquare_input=final_state.get("cosquare_input"),
        spectral_steps=final_state.get("spectral_steps", []),
        rounds=final_state.get("rounds_completed", 0),
        path=final_state.get("path", "refined"),
        gstar=final_state["gstar"],
        graph=final_state["graph"],
    )
    logger.info(
        "grand_completed",
        path=trace.path,
        edges=trace.graph.num_edges,
        unresolved_cells=trace.unresolved_cells,
        conflicts=len(trace.conflicts),
    )
    return final_state["graph"], trace
