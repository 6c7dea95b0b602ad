"""Data models for graph reconstruction."""

from datetime import datetime
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .graphs import Pair, TriStateAdjacency, normalize_pair

if TYPE_CHECKING:
    from ..utils.config import Config

SCHEMA_VERSION = "1.0"


class BetaConvention(str, Enum):
    """How β is derived from the number of determined pairs."""
    VERTICES = "vertices"      # 2·|E⋆| / n²
    NORMALIZED = "normalized"  # min(1, 2·|E⋆| / (n(n−1)))


class KnowledgeSet(BaseModel):
    """Prior knowledge of the attacker: known edges E₁ and known non-edges E₀."""

    known_edges: List[Tuple[int, int]] = Field(default_factory=list, description="E₁, pairs known to be edges")
    known_non_edges: List[Tuple[int, int]] = Field(default_factory=list, description="E₀, pairs known to be absent")
    rho: float = Field(default=0.0, ge=0.0, le=1.0, description="Sampled proportion of pairs")
    seed: int = Field(default=0, ge=0, description="Seed used for sampling")

    @field_validator("known_edges", "known_non_edges", mode="before")
    @classmethod
    def normalize_pairs(cls, v):
        """Store pairs as sorted, de-duplicated (u, v) with u < v."""
        pairs = {normalize_pair(int(p[0]), int(p[1])) for p in (v or [])}
        return sorted(pairs)

    @classmethod
    def empty(cls) -> "KnowledgeSet":
        return cls()

    def overlap(self) -> List[Pair]:
        """Pairs claimed both as edges and non-edges."""
        return sorted(set(self.known_edges) & set(self.known_non_edges))

    def self_loops(self) -> List[Pair]:
        return [p for p in self.known_edges + self.known_non_edges if p[0] == p[1]]

    @property
    def size(self) -> int:
        return len(self.known_edges) + len(self.known_non_edges)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "known_edges": [[0, 1], [2, 5]],
                "known_non_edges": [[1, 2]],
                "rho": 0.1,
                "seed": 7,
            }
        }
    )


class SpectralConfig(BaseModel):
    """Weights and threshold of the spectral attack.

    ``beta=None`` means the adaptive value derived from the partial
    reconstruction; ``alpha=None`` means ``1 - beta``.
    """

    alpha: Optional[float] = Field(default=None, ge=0.0, description="Weight of the binariness term")
    beta: Optional[float] = Field(default=None, ge=0.0, description="Weight of the knowledge term")
    threshold: float = Field(default=0.5, gt=0.0, lt=1.0, description="Binarization cutoff t")
    eigenvalue_floor: float = Field(default=1e-9, ge=0.0, description="Eigenvalues below are clamped to 0")
    beta_convention: BetaConvention = Field(default=BetaConvention.VERTICES)

    def resolve(self, gstar: TriStateAdjacency) -> Tuple[float, float]:
        """Return concrete (alpha, beta) for the given partial reconstruction."""
        from ..services.spectral import default_beta

        beta = self.beta if self.beta is not None else default_beta(gstar, self.beta_convention)
        alpha = self.alpha if self.alpha is not None else max(0.0, 1.0 - beta)
        return alpha, beta


class Conflict(BaseModel):
    """An inference that contradicts an already determined cell."""

    attack: str
    cell: Tuple[int, int]
    message: str


class AttackOutcome(BaseModel):
    """Result of one topological attack pass."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    attack: str
    updated: TriStateAdjacency
    changes: int = Field(default=0, ge=0, description="Cells changed from Unknown to Zero or One")
    conflicts: List[Conflict] = Field(default_factory=list)


class FixpointResult(BaseModel):
    """Closure of the topological attacks."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    gstar: TriStateAdjacency
    iterations: int = 0
    change_counts: Dict[str, int] = Field(default_factory=dict, description="Total changes per attack")
    history: List[Dict[str, int]] = Field(default_factory=list, description="Changes per attack per cycle")

    @property
    def total_changes(self) -> int:
        return sum(self.change_counts.values())


class EigenSystem(BaseModel):
    """Eigendecomposition G² = U Λ Uᵀ with eigenvalues in descending order."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @model_validator(mode="after")
    def check_shapes(self):
        n = self.eigenvalues.shape[0]
        if self.eigenvectors.shape != (n, n):
            raise ValueError(
                f"eigenvectors shape {self.eigenvectors.shape} does not match {n} eigenvalues"
            )
        return self

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def relative_residual(self, m: np.ndarray) -> float:
        """‖U Λ Uᵀ − M‖_F / ‖M‖_F (absolute residual when M is zero)."""
        residual = float(np.linalg.norm(self.reconstruct() - m))
        norm = float(np.linalg.norm(m))
        return residual / norm if norm > 0 else residual


class SpectralStep(BaseModel):
    """One greedy sign decision."""

    index: int
    eigenvalue: float
    sign: int
    d_plus: float
    d_minus: float

    @property
    def d_chosen(self) -> float:
        return self.d_plus if self.sign > 0 else self.d_minus

    @property
    def d_discarded(self) -> float:
        return self.d_minus if self.sign > 0 else self.d_plus


class AmbiguousComponent(BaseModel):
    """Unknown cells linked through shared vertices."""

    cells: List[Tuple[int, int]] = Field(default_factory=list, description="Unknown unordered pairs")
    vertices: List[int] = Field(default_factory=list, description="Vertices incident to the cells")
    solutions_found: int = Field(default=0, ge=0)
    resolved: bool = False

    @property
    def size(self) -> int:
        return len(self.cells)


class EdgeCounts(BaseModel):
    """Confusion counts over unordered off-diagonal pairs."""

    true_positives: int = 0
    false_positives: int = 0
    true_negatives: int = 0
    false_negatives: int = 0


class MetricsReport(BaseModel):
    """Reconstruction quality of Ĝ against G."""

    schema_version: str = SCHEMA_VERSION
    fpr: float = Field(..., ge=0.0, le=1.0)
    fnr: float = Field(..., ge=0.0, le=1.0)
    rae: float = Field(..., ge=0.0)
    cne: float = Field(..., ge=0.0)
    edge_counts: EdgeCounts

    @property
    def is_perfect(self) -> bool:
        return self.fpr == 0 and self.fnr == 0 and self.rae == 0 and self.cne == 0


class StageRecord(BaseModel):
    """Bookkeeping for one pipeline stage."""

    stage: str
    changes: int = 0
    seconds: float = 0.0
    details: Dict[str, Any] = Field(default_factory=dict)


class CosquareSummary(BaseModel):
    """Outcome of co-square instantiation."""

    components: List[AmbiguousComponent] = Field(default_factory=list)
    unresolved_cells: int = 0
    disconnected_or_bipartite: bool = False

    @property
    def max_solutions(self) -> int:
        return max((c.solutions_found for c in self.components), default=0)


class RunManifest(BaseModel):
    """Everything needed to reproduce a run."""

    command: str
    inputs: Dict[str, Optional[str]] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    tool_version: str
    started_at: datetime = Field(default_factory=datetime.utcnow)
    finished_at: Optional[datetime] = None


class PipelineSettings(BaseModel):
    """Parameters of one GRAND run."""

    spectral: SpectralConfig = Field(default_factory=SpectralConfig)
    max_combination_degree: int = Field(default=2, ge=0)
    max_iterations: int = Field(default=10_000, ge=1)
    cosquare_budget: int = Field(default=20, ge=0, description="Largest component searched exhaustively")
    spectral_rounds: int = Field(default=1, ge=1, description="Spectral, forgetting and refinement rounds")
    fill: Literal["zero", "one"] = Field(default="zero", description="Value given to residual Unknown cells")

    @classmethod
    def from_config(cls, config: "Config") -> "PipelineSettings":
        """Build run settings from the application configuration."""
        spectral = config.spectral
        beta = None if spectral.beta == "auto" else float(spectral.beta)
        return cls(
            spectral=SpectralConfig(
                alpha=spectral.alpha,
                beta=beta,
                threshold=spectral.threshold,
                eigenvalue_floor=spectral.eigenvalue_floor,
                beta_convention=BetaConvention(spectral.beta_convention),
            ),
            max_combination_degree=config.topological.max_combination_degree,
            max_iterations=config.topological.max_iterations,
            cosquare_budget=config.cosquare.budget,
            spectral_rounds=config.pipeline.spectral_rounds,
            fill=config.pipeline.fill,
        )
