"""LangGraph state schema and trace for the reconstruction pipeline."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import TypedDict

from .graphs import BinaryGraph, CommonNeighborsMatrix, TriStateAdjacency
from .schemas import (
    CosquareSummary,
    EigenSystem,
    KnowledgeSet,
    PipelineSettings,
    SpectralStep,
    StageRecord,
)


class GrandState(TypedDict, total=False):
    """
    State schema for the reconstruction workflow.

    Holds the inputs, the working partial reconstruction and everything the
    stages record along the way.
    """

    # Inputs
    g2: CommonNeighborsMatrix
    knowledge: KnowledgeSet
    settings: PipelineSettings

    # Working matrices
    gstar: TriStateAdjacency
    proven: TriStateAdjacency  # closure of the knowledge, no spectral guesses
    eigensystem: Optional[EigenSystem]

    # Spectral round
    spectral_graph: Optional[BinaryGraph]
    spectral_steps: List[SpectralStep]
    rounds_completed: int

    # Outcome
    cosquare: Optional[CosquareSummary]
    cosquare_input: TriStateAdjacency  # matrix the co-square stage completed
    graph: BinaryGraph
    path: str  # "refined" or "proven"

    # Bookkeeping
    stages: List[StageRecord]
    conflicts: List[Dict[str, Any]]
    warnings: List[Dict[str, Any]]
    node_execution_times: Dict[str, float]


class PipelineTrace(BaseModel):
    """What a reconstruction run did, stage by stage."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    stages: List[StageRecord] = Field(default_factory=list, description="Stages in execution order")
    conflicts: List[Dict[str, Any]] = Field(default_factory=list, description="Recovered conflicts")
    warnings: List[Dict[str, Any]] = Field(default_factory=list)
    cosquare: Optional[CosquareSummary] = None
    spectral_steps: List[SpectralStep] = Field(default_factory=list)
    rounds: int = 0
    path: str = "refined"
    gstar: Optional[TriStateAdjacency] = Field(default=None, description="Final partial reconstruction")
    cosquare_input: Optional[TriStateAdjacency] = Field(
        default=None, description="Partial reconstruction handed to co-square instantiation"
    )
    graph: Optional[BinaryGraph] = None

    @property
    def change_counts(self) -> Dict[str, int]:
        """Total changes per stage name."""
        totals: Dict[str, int] = {}
        for record in self.stages:
            totals[record.stage] = totals.get(record.stage, 0) + record.changes
        return totals

    @property
    def timings(self) -> Dict[str, float]:
        totals: Dict[str, float] = {}
        for record in self.stages:
            totals[record.stage] = totals.get(record.stage, 0.0) + record.seconds
        return totals

    @property
    def unresolved_cells(self) -> int:
        return self.cosquare.unresolved_cells if self.cosquare else 0

    def summary(self) -> Dict[str, Any]:
        """JSON-ready digest of the trace; timings are kept apart from the rest."""
        return {
            "path": self.path,
            "rounds": self.rounds,
            "stages": [
                {"stage": r.stage, "changes": r.changes, "details": r.details} for r in self.stages
            ],
            "conflicts": self.conflicts,
            "warnings": self.warnings,
            "cosquare": self.cosquare.model_dump(mode="json") if self.cosquare else None,
            "unresolved_cells": self.unresolved_cells,
            "negative_signs": sum(1 for s in self.spectral_steps if s.sign < 0),
        }
