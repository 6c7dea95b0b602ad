"""Command-line interface for the GRAND reconstruction toolkit."""

import argparse
import math
import sys
from datetime import datetime
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .analysis.metrics import evaluate
from .analysis.sweep import sweep
from .export.export_service import ExportService, mapping_path_for
from .models.schemas import KnowledgeSet, PipelineSettings, RunManifest
from .parsers.edgelist_parser import read_edge_list
from .parsers.knowledge_io import read_knowledge
from .parsers.matrix_market import read_common_neighbors
from .services.graph_ops import sample_knowledge, square
from .utils.config import Config, get_config, set_config
from .utils.errors import GrandError, InconsistentInputsError
from .utils.logger import get_logger, run_context, setup_logger


def setup_cli_logger(verbose: bool = False):
    """Setup logger for CLI."""
    setup_logger(get_config().logging, level="DEBUG" if verbose else None, log_format="text")


def _banner(title: str, rows: Dict[str, object]) -> None:
    print(f"\n{'='*60}")
    print(title)
    print(f"{'='*60}")
    for key, value in rows.items():
        print(f"{key}: {value}")
    print(f"{'='*60}\n")


def _parse_beta(value: str):
    if value.strip().lower() == "auto":
        return "auto"
    try:
        beta = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"beta must be a number or 'auto', got {value!r}")
    if beta < 0:
        raise argparse.ArgumentTypeError("beta must be non-negative")
    return beta


def _parse_rhos(value: str) -> List[float]:
    try:
        rhos = [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"rhos must be comma-separated numbers, got {value!r}")
    if not rhos or any(not 0.0 <= rho <= 1.0 for rho in rhos):
        raise argparse.ArgumentTypeError("rhos must lie in [0, 1]")
    return rhos


def build_settings(args) -> PipelineSettings:
    """Pipeline settings from the loaded configuration, overridden by CLI flags."""
    settings = PipelineSettings.from_config(get_config())
    spectral_updates = {}
    if getattr(args, "alpha", None) is not None:
        spectral_updates["alpha"] = args.alpha
    beta = getattr(args, "beta", None)
    if beta is not None:
        spectral_updates["beta"] = None if beta == "auto" else beta
    if getattr(args, "threshold", None) is not None:
        spectral_updates["threshold"] = args.threshold

    updates = {}
    if spectral_updates:
        updates["spectral"] = settings.spectral.model_copy(update=spectral_updates)
    for flag, field in (
        ("max_combination_degree", "max_combination_degree"),
        ("cosquare_budget", "cosquare_budget"),
        ("spectral_rounds", "spectral_rounds"),
        ("fill", "fill"),
    ):
        if getattr(args, flag, None) is not None:
            updates[field] = getattr(args, flag)
    return settings.model_copy(update=updates) if updates else settings


def _manifest(command: str, inputs: Dict[str, Optional[str]], config: Dict, seed: Optional[int]) -> RunManifest:
    return RunManifest(
        command=command,
        inputs=inputs,
        config=config,
        seed=seed,
        tool_version=__version__,
    )


def _relative_error(reference: np.ndarray, other: np.ndarray) -> float:
    norm_sq = int(np.square(reference).sum())
    diff_sq = int(np.square(reference - other).sum())
    if norm_sq == 0:
        return 0.0 if diff_sq == 0 else math.inf
    return math.sqrt(diff_sq / norm_sq)


def square_command(args) -> int:
    """Write the common-neighbors matrix of a graph."""
    logger = get_logger({"module": "cli", "command": "square"})
    exporter = ExportService()

    graph, mapping = read_edge_list(args.graph, remap=args.remap)
    g2 = square(graph)
    exporter.write_common_neighbors(g2, args.out)
    if mapping is not None:
        exporter.write_mapping(mapping, mapping_path_for(args.out))

    logger.info("square_completed", vertices=graph.n, edges=graph.num_edges)
    _banner("GRAND - Common Neighbors", {
        "Graph": args.graph, "Vertices": graph.n, "Edges": graph.num_edges, "Output": args.out,
    })
    return 0


def reconstruct_command(args) -> int:
    """Reconstruct a graph from its common-neighbors matrix."""
    from .workflow.graph import run_grand

    logger = get_logger({"module": "cli", "command": "reconstruct"})
    exporter = ExportService()
    started_at = datetime.utcnow()

    g2 = read_common_neighbors(args.g2)
    knowledge = read_knowledge(args.knowledge) if args.knowledge else KnowledgeSet()
    settings = build_settings(args)

    truth = None
    if args.truth:
        truth, _ = read_edge_list(args.truth, num_vertices=g2.n)

    try:
        graph, trace = run_grand(g2, knowledge, settings=settings)
    except InconsistentInputsError as e:
        logger.error("reconstruction_inconsistent", error=str(e), cell=e.cell, attack=e.attack)
        print(f"Error: inputs are inconsistent: {e}", file=sys.stderr)
        return e.exit_code

    exporter.write_graph(graph, args.out, args.format)

    sections: Dict[str, object] = {
        "edges": graph.num_edges,
        "cne_input": _relative_error(g2.m, square(graph).m),
        "trace": trace.summary(),
        "timings": trace.timings,
    }
    if truth is not None:
        sections["metrics"] = evaluate(truth, graph).model_dump(mode="json")

    manifest = _manifest(
        "reconstruct",
        {"g2": args.g2, "knowledge": args.knowledge, "truth": args.truth},
        settings.model_dump(mode="json"),
        knowledge.seed if args.knowledge else None,
    )
    manifest.started_at = started_at
    manifest.finished_at = datetime.utcnow()
    if args.report:
        exporter.write_report(args.report, manifest, sections)

    _banner("GRAND - Reconstruction", {
        "Vertices": g2.n,
        "Edges": graph.num_edges,
        "CNE (input)": f"{sections['cne_input']:.6f}",
        "Path": trace.path,
        "Unresolved cells": trace.unresolved_cells,
        "Output": args.out,
    })

    if trace.unresolved_cells:
        logger.warning("reconstruction_partial", unresolved_cells=trace.unresolved_cells)
        return 4
    return 0


def sample_knowledge_command(args) -> int:
    """Sample prior knowledge from a ground-truth graph."""
    exporter = ExportService()
    graph, mapping = read_edge_list(args.graph, remap=args.remap)
    knowledge = sample_knowledge(graph, args.rho, args.seed)
    exporter.write_knowledge(knowledge, args.out)
    if mapping is not None:
        exporter.write_mapping(mapping, mapping_path_for(args.out))

    _banner("GRAND - Knowledge Sample", {
        "Graph": args.graph,
        "Rho": args.rho,
        "Seed": args.seed,
        "Known edges": len(knowledge.known_edges),
        "Known non-edges": len(knowledge.known_non_edges),
        "Output": args.out,
    })
    return 0


def evaluate_command(args) -> int:
    """Compare a reconstruction with the ground truth."""
    exporter = ExportService()
    graph, _ = read_edge_list(args.graph)
    recon, _ = read_edge_list(args.recon, num_vertices=graph.n)
    report = evaluate(graph, recon)

    if args.report:
        manifest = _manifest("evaluate", {"graph": args.graph, "recon": args.recon}, {}, None)
        exporter.write_report(args.report, manifest, {"metrics": report.model_dump(mode="json")})

    _banner("GRAND - Evaluation", {
        "FPR": f"{report.fpr:.6f}",
        "FNR": f"{report.fnr:.6f}",
        "RAE": f"{report.rae:.6f}",
        "CNE": f"{report.cne:.6f}",
    })
    return 0


def sweep_command(args) -> int:
    """Run GRAND and the baseline over knowledge proportions and seeds."""
    config = get_config()
    exporter = ExportService()
    graph, _ = read_edge_list(args.graph, remap=args.remap)
    settings = build_settings(args)

    rhos = args.rhos if args.rhos is not None else config.sweep.rhos
    n_seeds = args.seeds if args.seeds is not None else config.sweep.n_seeds
    base_seed = args.base_seed if args.base_seed is not None else config.sweep.base_seed
    seeds = list(range(base_seed, base_seed + n_seeds))

    workers = args.workers
    if workers is None:
        workers = config.performance.max_workers if config.performance.parallel_processing else 1

    result = sweep(
        graph, rhos, seeds, settings=settings, max_workers=workers,
        max_completions=config.sweep.max_completions,
    )
    exporter.write_csv(result.runs, args.out)
    if args.summary:
        exporter.write_csv(result.summary, args.summary)

    _banner("GRAND - Sweep", {
        "Graph": args.graph,
        "Rhos": ", ".join(f"{r:g}" for r in rhos),
        "Seeds": n_seeds,
        "Rows": len(result.runs),
        "Output": args.out,
    })
    return 0


def config_command(args) -> int:
    """Display the effective configuration."""
    config = get_config()
    _banner("Current Configuration", {
        "Name": config.app.name,
        "Version": config.app.version,
        "Environment": config.app.environment,
        "Max combination degree": config.topological.max_combination_degree,
        "Alpha": config.spectral.alpha if config.spectral.alpha is not None else "1 - beta",
        "Beta": config.spectral.beta,
        "Threshold": config.spectral.threshold,
        "Beta convention": config.spectral.beta_convention,
        "Co-square budget": config.cosquare.budget,
        "Spectral rounds": config.pipeline.spectral_rounds,
        "Fill": config.pipeline.fill,
        "Logging": f"{config.logging.level} ({config.logging.format})",
    })
    return 0


def _algorithm_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--alpha", type=float, help="Binariness weight (default: 1 - beta)")
    flags.add_argument("--beta", type=_parse_beta, help="Knowledge weight, a number or 'auto'")
    flags.add_argument("--threshold", type=float, help="Binarization threshold (default: 0.5)")
    flags.add_argument("--max-combination-degree", type=int, help="Degree bound of the subset attack (default: 2)")
    flags.add_argument("--cosquare-budget", type=int, help="Largest co-square component searched (default: 20)")
    flags.add_argument("--spectral-rounds", type=int, help="Spectral/refinement rounds (default: 1)")
    flags.add_argument("--fill", choices=["zero", "one"], help="Value of residual Unknown cells")
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grand",
        description="GRAND - reconstruct a graph from its common-neighbors matrix",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Common-neighbors matrix of a graph
  %(prog)s square --graph netscience.edges --out netscience.g2.mtx

  # Sample 20%% of the pairs as prior knowledge
  %(prog)s sample-knowledge --graph netscience.edges --rho 0.2 --seed 1 --out k.json

  # Reconstruct, with a report scored against the ground truth
  %(prog)s reconstruct --g2 netscience.g2.mtx --knowledge k.json --out recon.edges \\
      --report report.json --truth netscience.edges

  # Sweep knowledge proportions
  %(prog)s sweep --graph netscience.edges --rhos 0,0.2,0.4 --seeds 10 --out sweep.csv
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")
    parser.add_argument("--config", type=str, help="Path to configuration file (default: config/config.yaml)")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")
    algorithm = _algorithm_flags()

    square_parser = subparsers.add_parser("square", help="Write the common-neighbors matrix of a graph")
    square_parser.add_argument("--graph", required=True, help="Edge list of the graph")
    square_parser.add_argument("--out", "-o", required=True, help="MatrixMarket output path")
    square_parser.add_argument("--remap", action="store_true", help="Densify vertex ids in first-seen order")
    square_parser.set_defaults(func=square_command)

    reconstruct_parser = subparsers.add_parser(
        "reconstruct", parents=[algorithm], help="Reconstruct a graph from its common-neighbors matrix"
    )
    reconstruct_parser.add_argument("--g2", required=True, help="MatrixMarket common-neighbors matrix")
    reconstruct_parser.add_argument("--knowledge", help="Knowledge JSON from sample-knowledge")
    reconstruct_parser.add_argument("--truth", help="Ground-truth edge list for metrics")
    reconstruct_parser.add_argument("--out", "-o", required=True, help="Reconstructed graph path")
    reconstruct_parser.add_argument("--report", help="JSON report path")
    reconstruct_parser.add_argument("--format", choices=["edgelist", "mtx"], default="edgelist")
    reconstruct_parser.set_defaults(func=reconstruct_command)

    sample_parser = subparsers.add_parser("sample-knowledge", help="Sample prior knowledge from a graph")
    sample_parser.add_argument("--graph", required=True, help="Edge list of the ground truth")
    sample_parser.add_argument("--rho", type=float, required=True, help="Proportion of pairs to reveal")
    sample_parser.add_argument("--seed", type=int, default=0, help="Sampling seed")
    sample_parser.add_argument("--out", "-o", required=True, help="Knowledge JSON output path")
    sample_parser.add_argument("--remap", action="store_true", help="Densify vertex ids in first-seen order")
    sample_parser.set_defaults(func=sample_knowledge_command)

    evaluate_parser = subparsers.add_parser("evaluate", help="Score a reconstruction")
    evaluate_parser.add_argument("--graph", required=True, help="Ground-truth edge list")
    evaluate_parser.add_argument("--recon", required=True, help="Reconstructed edge list")
    evaluate_parser.add_argument("--report", help="JSON report path")
    evaluate_parser.set_defaults(func=evaluate_command)

    sweep_parser = subparsers.add_parser(
        "sweep", parents=[algorithm], help="Compare GRAND with the baseline over rho and seeds"
    )
    sweep_parser.add_argument("--graph", required=True, help="Ground-truth edge list")
    sweep_parser.add_argument("--rhos", type=_parse_rhos, help="Comma-separated proportions")
    sweep_parser.add_argument("--seeds", type=int, help="Number of seeds per proportion")
    sweep_parser.add_argument("--base-seed", type=int, help="First seed")
    sweep_parser.add_argument("--workers", type=int, help="Worker processes")
    sweep_parser.add_argument("--remap", action="store_true", help="Densify vertex ids in first-seen order")
    sweep_parser.add_argument("--out", "-o", required=True, help="CSV with one row per run")
    sweep_parser.add_argument("--summary", help="CSV with mean/min/max per method and rho")
    sweep_parser.set_defaults(func=sweep_command)

    config_parser = subparsers.add_parser("config", help="Show the effective configuration")
    config_parser.add_argument("--show", action="store_true", help="Show current configuration")
    config_parser.set_defaults(func=config_command)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.config:
        set_config(Config.load_from_yaml(args.config))

    setup_cli_logger(verbose=args.verbose)

    if not hasattr(args, "func"):
        parser.print_help()
        return 1

    try:
        with run_context(command=args.command, seed=getattr(args, "seed", None)):
            return args.func(args)
    except GrandError as e:
        get_logger({"module": "cli"}).error("command_failed", command=args.command, error=str(e))
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
