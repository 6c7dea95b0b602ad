"""Export module for reconstruction artifacts."""

from .export_service import ExportService, build_report, mapping_path_for

__all__ = [
    "ExportService",
    "build_report",
    "mapping_path_for",
]
