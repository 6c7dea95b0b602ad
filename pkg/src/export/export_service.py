"""
Export Service.

Writes the artifacts of a run:
1. Edge lists and MatrixMarket matrices
2. JSON reports, knowledge sets and id mappings
3. Sweep tables as CSV
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from loguru import logger
from scipy import io as sio
from scipy import sparse

from ..models.graphs import BinaryGraph, CommonNeighborsMatrix
from ..models.schemas import SCHEMA_VERSION, KnowledgeSet, RunManifest


class ExportService:
    """
    Service for writing reconstruction artifacts.

    Relative paths resolve against ``output_dir``.
    """

    def __init__(self, output_dir: str = "."):
        """
        Initialize export service.

        Args:
            output_dir: Base directory for relative output paths
        """
        self.output_dir = Path(output_dir)
        self.logger = logger.bind(component="export_service")

    def _target(self, path: str) -> Path:
        target = Path(path)
        if not target.is_absolute():
            target = self.output_dir / target
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def write_edge_list(self, graph: BinaryGraph, path: str) -> str:
        """Write ``u v`` lines with a ``# n=`` header."""
        target = self._target(path)
        with open(target, "w", encoding="utf-8") as f:
            f.write(f"# n={graph.n}\n")
            for u, v in graph.edges:
                f.write(f"{u} {v}\n")
        self.logger.info("edge_list_written", path=str(target), edges=graph.num_edges)
        return str(target)

    def write_matrix(self, matrix: np.ndarray, path: str, comment: str = "") -> str:
        """Write a symmetric integer matrix in MatrixMarket coordinate format."""
        target = self._target(path)
        sio.mmwrite(
            str(target),
            sparse.coo_matrix(np.asarray(matrix, dtype=np.int64)),
            comment=comment,
            field="integer",
            symmetry="symmetric",
        )
        self.logger.info("matrix_written", path=str(target), n=int(matrix.shape[0]))
        return str(target)

    def write_common_neighbors(self, g2: CommonNeighborsMatrix, path: str) -> str:
        return self.write_matrix(g2.m, path, comment="common-neighbors matrix")

    def write_graph(self, graph: BinaryGraph, path: str, fmt: str = "edgelist") -> str:
        """Write a graph as an edge list or a MatrixMarket adjacency matrix."""
        if fmt == "mtx":
            return self.write_matrix(graph.adj, path, comment="adjacency matrix")
        if fmt != "edgelist":
            raise ValueError(f"unknown graph format: {fmt}")
        return self.write_edge_list(graph, path)

    def write_json(self, data: Dict[str, Any], path: str) -> str:
        target = self._target(path)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=True, default=str)
            f.write("\n")
        self.logger.info("json_written", path=str(target))
        return str(target)

    def write_knowledge(self, knowledge: KnowledgeSet, path: str) -> str:
        data = {"schema_version": SCHEMA_VERSION, **knowledge.model_dump(mode="json")}
        return self.write_json(data, path)

    def write_mapping(self, mapping: Dict[int, int], path: str) -> str:
        """Write the original id → dense id mapping."""
        data = {
            "schema_version": SCHEMA_VERSION,
            "mapping": {str(original): dense for original, dense in mapping.items()},
        }
        return self.write_json(data, path)

    def write_report(
        self,
        path: str,
        manifest: RunManifest,
        sections: Optional[Dict[str, Any]] = None,
    ) -> str:
        """Write a versioned JSON report embedding the run manifest."""
        return self.write_json(build_report(manifest, sections), path)

    def write_csv(self, frame: pd.DataFrame, path: str) -> str:
        target = self._target(path)
        frame.to_csv(target, index=False)
        self.logger.info("csv_written", path=str(target), rows=len(frame))
        return str(target)


def build_report(manifest: RunManifest, sections: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Report body: schema version, manifest, then the given sections."""
    report: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest.model_dump(mode="json"),
    }
    report.update(sections or {})
    return report


def mapping_path_for(path: str) -> str:
    """Sidecar path for the id mapping of an output file."""
    target = Path(path)
    return str(target.with_name(f"{target.stem}.mapping.json"))
