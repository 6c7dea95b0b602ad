"""Conditional logic for LangGraph workflow routing."""

from typing import Literal

from ..models.state import GrandState
from ..utils.logger import get_logger

logger = get_logger({"module": "workflow_conditions"})


def should_run_another_round(state: GrandState) -> Literal["spectral", "cosquare"]:
    """
    Decide whether to repeat the spectral, forgetting and refinement stages.

    Another round runs while Unknown cells remain, rounds are left and the
    run has not fallen back to the proven matrix.

    Args:
        state: Current workflow state

    Returns:
        "spectral" to start another round, "cosquare" otherwise
    """
    rounds = state.get("rounds_completed", 0)
    limit = state["settings"].spectral_rounds

    if state.get("path") == "proven" or state["gstar"].is_fully_determined():
        return "cosquare"
    if rounds < limit:
        logger.info("spectral_round_scheduled", round=rounds + 1, limit=limit)
        return "spectral"
    return "cosquare"
