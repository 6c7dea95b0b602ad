"""
Download and normalize the evaluation datasets.

Every dataset is turned into an undirected simple graph with dense ids
0…n−1 (sorted original ids) and written as an edge list with a ``# n=``
header. The script prints |V| and |E| next to the sizes used in published
experiments so preprocessing differences are visible.

Usage:
    python scripts/fetch_datasets.py --out data/datasets [--only netscience cora]
"""

import argparse
import io
import sys
import zipfile
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import networkx as nx
import numpy as np
import requests
from scipy import io as sio
from scipy import sparse
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.export.export_service import ExportService  # noqa: E402
from src.models.graphs import BinaryGraph  # noqa: E402
from src.utils.logger import get_logger, setup_logger  # noqa: E402

logger = get_logger({"module": "fetch_datasets"})


@dataclass(frozen=True)
class DatasetSource:
    name: str
    url: str
    kind: str  # "mtx-zip" or "npz"
    largest_component: bool
    expected_vertices: int
    expected_edges: int


DATASETS: Dict[str, DatasetSource] = {
    "netscience": DatasetSource(
        "netscience", "https://nrvis.com/download/data/ca/ca-netscience.zip", "mtx-zip", False, 379, 914
    ),
    "bio-diseasome": DatasetSource(
        "bio-diseasome", "https://nrvis.com/download/data/bio/bio-diseasome.zip", "mtx-zip", False, 516, 1188
    ),
    "polblogs": DatasetSource(
        "polblogs",
        "https://raw.githubusercontent.com/danielzuegner/gnn-meta-attack/master/data/polblogs.npz",
        "npz", False, 1490, 16715,
    ),
    "cora": DatasetSource(
        "cora",
        "https://raw.githubusercontent.com/danielzuegner/gnn-meta-attack/master/data/cora.npz",
        "npz", True, 2485, 5069,
    ),
}


@retry(
    retry=retry_if_exception_type(requests.RequestException),
    stop=stop_after_attempt(4),
    wait=wait_exponential(multiplier=1, min=2, max=30),
    reraise=True,
)
def download(url: str, timeout: int = 60) -> bytes:
    """Fetch a URL with retries on network errors."""
    logger.info("downloading", url=url)
    response = requests.get(url, timeout=timeout)
    response.raise_for_status()
    return response.content


def load_mtx_zip(payload: bytes) -> sparse.spmatrix:
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        members = [m for m in archive.namelist() if m.endswith(".mtx")]
        if not members:
            raise ValueError("archive holds no .mtx file")
        with archive.open(members[0]) as f:
            return sparse.csr_matrix(sio.mmread(io.BytesIO(f.read())))


def load_npz(payload: bytes) -> sparse.spmatrix:
    with np.load(io.BytesIO(payload), allow_pickle=True) as data:
        if "adj_data" in data:
            return sparse.csr_matrix(
                (data["adj_data"], data["adj_indices"], data["adj_indptr"]), shape=data["adj_shape"]
            )
        if "data" in data:
            return sparse.csr_matrix((data["data"], data["indices"], data["indptr"]), shape=data["shape"])
    raise ValueError("unrecognized npz layout")


def normalize(matrix: sparse.spmatrix, largest_component: bool) -> BinaryGraph:
    """Undirected, simple, unweighted graph on dense ids."""
    graph = nx.from_scipy_sparse_array(matrix)
    graph = nx.Graph(graph)  # collapses direction and parallel edges
    graph.remove_edges_from(list(nx.selfloop_edges(graph)))
    if largest_component and graph.number_of_nodes():
        graph = graph.subgraph(max(nx.connected_components(graph), key=len)).copy()
    graph = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    adj = nx.to_numpy_array(graph, nodelist=range(graph.number_of_nodes()), dtype=np.uint8)
    return BinaryGraph((adj > 0).astype(np.uint8))


def fetch(source: DatasetSource, out_dir: Path, exporter: ExportService) -> Optional[BinaryGraph]:
    try:
        payload = download(source.url)
        matrix = load_mtx_zip(payload) if source.kind == "mtx-zip" else load_npz(payload)
    except (requests.RequestException, ValueError, zipfile.BadZipFile, OSError) as e:
        logger.error("dataset_unavailable", dataset=source.name, error=str(e))
        return None

    graph = normalize(matrix, source.largest_component)
    exporter.write_edge_list(graph, str(out_dir / f"{source.name}.edges"))
    return graph


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Download the evaluation datasets")
    parser.add_argument("--out", default="data/datasets", help="Output directory")
    parser.add_argument("--only", nargs="*", choices=sorted(DATASETS), help="Subset of datasets")
    args = parser.parse_args(argv)

    setup_logger(level="INFO", log_format="text")
    out_dir = Path(args.out)
    exporter = ExportService(str(out_dir))

    failures = 0
    print(f"{'dataset':<15}{'|V|':>8}{'|E|':>9}{'expected':>18}")
    for name in args.only or sorted(DATASETS):
        source = DATASETS[name]
        graph = fetch(source, out_dir, exporter)
        expected = f"{source.expected_vertices}/{source.expected_edges}"
        if graph is None:
            failures += 1
            print(f"{name:<15}{'-':>8}{'-':>9}{expected:>18}")
            continue
        print(f"{name:<15}{graph.n:>8}{graph.num_edges:>9}{expected:>18}")

    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
