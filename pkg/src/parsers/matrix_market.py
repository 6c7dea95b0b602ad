"""MatrixMarket reader for common-neighbors matrices and adjacency matrices."""

from pathlib import Path

import numpy as np
from scipy import io as sio
from scipy import sparse

from ..models.graphs import BinaryGraph, CommonNeighborsMatrix
from ..utils.errors import ContractError, ParseError
from ..utils.logger import get_logger

logger = get_logger({"module": "matrix_market"})


def _read_dense(path: str) -> np.ndarray:
    if not Path(path).exists():
        raise ParseError("file not found", path=str(path))
    try:
        matrix = sio.mmread(path)
    except (ValueError, OSError, IndexError) as e:
        raise ParseError(f"invalid MatrixMarket file: {e}", path=str(path))
    return matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix)


def read_common_neighbors(path: str) -> CommonNeighborsMatrix:
    """Read G² from a MatrixMarket file (symmetric integer, coordinate or array)."""
    dense = _read_dense(path)
    if np.iscomplexobj(dense):
        raise ParseError("complex matrices are not common-neighbors matrices", path=str(path))
    try:
        g2 = CommonNeighborsMatrix(dense)
    except ContractError as e:
        raise ParseError(str(e), path=str(path))
    logger.info("common_neighbors_read", path=str(path), n=g2.n)
    return g2


def read_adjacency(path: str) -> BinaryGraph:
    """Read a graph stored as a MatrixMarket adjacency matrix."""
    dense = _read_dense(path)
    try:
        return BinaryGraph(np.rint(dense.real).astype(np.int64).clip(0, 1))
    except ContractError as e:
        raise ParseError(str(e), path=str(path))
