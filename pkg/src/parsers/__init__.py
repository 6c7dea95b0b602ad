"""Readers for graphs, common-neighbors matrices and knowledge files."""

from .edgelist_parser import EdgeListParser, read_edge_list
from .knowledge_io import read_knowledge
from .matrix_market import read_adjacency, read_common_neighbors

__all__ = [
    "EdgeListParser",
    "read_edge_list",
    "read_knowledge",
    "read_adjacency",
    "read_common_neighbors",
]
