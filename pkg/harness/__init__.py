"""Replication studies over the built-in designs."""

from .designs import DESIGNS, Design, build_design, design_from_files
from .report import (
    REPORT_FORMATS,
    CellSummary,
    ExcludedReplicate,
    StudyReport,
    emit_report,
    read_report,
    render_text,
)
from .study import (
    ReplicateResult,
    StudyConfig,
    aggregate,
    load_study_config,
    resolve_design,
    run_replicate,
    run_study,
    summarize,
)

__all__ = [
    "DESIGNS",
    "REPORT_FORMATS",
    "CellSummary",
    "Design",
    "ExcludedReplicate",
    "ReplicateResult",
    "StudyConfig",
    "StudyReport",
    "aggregate",
    "build_design",
    "design_from_files",
    "emit_report",
    "load_study_config",
    "read_report",
    "render_text",
    "resolve_design",
    "run_replicate",
    "run_study",
    "summarize",
]
