"""Edge-list reader for undirected simple graphs."""

import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..models.graphs import BinaryGraph, Pair, normalize_pair
from ..utils.errors import ParseError
from ..utils.logger import get_logger

logger = get_logger({"module": "edgelist_parser"})

COMMENT_PREFIXES = ("#", "%")
VERTEX_COUNT_HEADER = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


class EdgeListParser:
    """Reads whitespace-separated ``u v`` lines.

    Lines starting with ``#`` or ``%`` are comments; a ``# n=<count>`` comment
    fixes the vertex count so isolated vertices survive a round trip. Extra
    columns (weights, timestamps) are ignored.
    """

    def __init__(self, remap: bool = False):
        """
        Initialize the parser.

        Args:
            remap: Densify arbitrary integer ids to 0…n−1 in first-seen order
        """
        self.remap = remap
        self.logger = logger

    def parse(
        self, path: str, num_vertices: Optional[int] = None
    ) -> Tuple[BinaryGraph, Optional[Dict[int, int]]]:
        """
        Parse an edge list file.

        Args:
            path: Edge list path
            num_vertices: Vertex count; defaults to the header or the largest id + 1

        Returns:
            Tuple of (graph, mapping original id → dense id, or None without remap)

        Raises:
            ParseError: On malformed lines, self-loops and duplicate edges
        """
        file_path = Path(path)
        if not file_path.exists():
            raise ParseError("file not found", path=str(path))

        with open(file_path, "r", encoding="utf-8") as f:
            graph, mapping = self.parse_lines(f.read().splitlines(), str(path), num_vertices)

        self.logger.info(
            "edge_list_parsed",
            path=str(path),
            vertices=graph.n,
            edges=graph.num_edges,
            remapped=mapping is not None,
        )
        return graph, mapping

    def parse_lines(
        self,
        lines: List[str],
        source: str = "<input>",
        num_vertices: Optional[int] = None,
    ) -> Tuple[BinaryGraph, Optional[Dict[int, int]]]:
        """Parse edge-list lines; see ``parse``."""
        mapping: Dict[int, int] = {}
        seen: Dict[Pair, int] = {}
        header_n: Optional[int] = None

        for line_no, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith(COMMENT_PREFIXES):
                match = VERTEX_COUNT_HEADER.match(line)
                if match:
                    header_n = int(match.group(1))
                continue

            tokens = line.split()
            if len(tokens) < 2:
                raise ParseError(f"expected two vertex ids, got {line!r}", path=source, line=line_no)
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ParseError(f"vertex ids must be integers, got {line!r}", path=source, line=line_no)

            if self.remap:
                u = mapping.setdefault(u, len(mapping))
                v = mapping.setdefault(v, len(mapping))
            elif u < 0 or v < 0:
                raise ParseError(f"negative vertex id in {line!r}", path=source, line=line_no)

            if u == v:
                raise ParseError(f"self-loop on vertex {tokens[0]}", path=source, line=line_no)
            pair = normalize_pair(u, v)
            if pair in seen:
                raise ParseError(
                    f"duplicate edge {tokens[0]} {tokens[1]} (first on line {seen[pair]})",
                    path=source,
                    line=line_no,
                )
            seen[pair] = line_no

        largest = max((max(p) for p in seen), default=-1) + 1
        if self.remap:
            largest = len(mapping)
        n = num_vertices if num_vertices is not None else max(largest, header_n or 0)
        if n < largest:
            raise ParseError(f"edge list references vertex {largest - 1} but n={n}", path=source)

        graph = BinaryGraph.from_edges(n, seen.keys())
        return graph, (mapping if self.remap else None)


def read_edge_list(
    path: str, remap: bool = False, num_vertices: Optional[int] = None
) -> Tuple[BinaryGraph, Optional[Dict[int, int]]]:
    """Read a graph from an edge list file."""
    return EdgeListParser(remap=remap).parse(path, num_vertices)
