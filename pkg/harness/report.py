"""Study reports: text tables, the structured document and its reader."""

import json
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from errors import ConfigError, UsageError

REPORT_FORMATS = ("text", "structured", "both")
TEXT_NAME = "report.txt"
STRUCTURED_NAME = "report.json"
TIMING_NAME = "timing.json"


class CellSummary(BaseModel):
    truth: float | None = None
    mean: float | None = None
    mse: float | None = None
    count: int = 0


class ExcludedReplicate(BaseModel):
    replicate: int = Field(
        description="0-based replicate index; also the index of its (seed, replicate) random streams"
    )
    error: str


class StudyReport(BaseModel):
    """Aggregated replicate results.

    `probs[j][a]` summarizes p-hat for item j and true class a; `pi[a]` the class weight.
    Wall-clock time is kept out of the structured document so that identical runs give
    identical files.
    """

    design: str = ""
    family: str = ""
    n: int = 0
    replicates: int = 0
    seed: int = 0
    oracle: bool = False
    method: str = "cluster"
    classes: list[str] = Field(default_factory=list)
    completed: int = 0
    excluded: list[ExcludedReplicate] = Field(default_factory=list)
    retained_classes: list[int] = Field(default_factory=list)
    discarded_mass_mean: float = 0.0
    discarded_max: float = 0.0
    accuracy: list[float] = Field(default_factory=list)
    accuracy_mean: float = 0.0
    pi: list[CellSummary] = Field(default_factory=list)
    probs: list[list[CellSummary]] = Field(default_factory=list)
    params: dict[str, CellSummary] = Field(default_factory=dict)
    elapsed_seconds: float | None = Field(default=None, exclude=True)


def _num(value: float | None, digits: int = 3) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def _mse(value: float | None) -> str:
    return "-" if value is None else f"{value:.1e}"


def render_text(report: StudyReport) -> str:
    """Plain-text tables: mixture proportions, item response probabilities, parameters."""
    lines = [
        f"Design {report.design} ({report.family}), n={report.n}, "
        f"R={report.replicates} ({report.completed} completed, {len(report.excluded)} excluded), "
        f"seed={report.seed}{', oracle' if report.oracle else ''}",
        f"Partial-information accuracy ({report.method}): {_num(report.accuracy_mean)}",
        f"Retained classes per replicate: {report.retained_classes}",
        f"Discarded mass: mean {_num(report.discarded_mass_mean, 4)}, largest class {_num(report.discarded_max, 4)}",
        "",
        "Mixture proportions",
        f"{'class':<8}{'truth':>8}{'mean':>8}{'mse':>10}",
    ]
    for name, cell in zip(report.classes, report.pi, strict=False):
        lines.append(f"{name:<8}{_num(cell.truth):>8}{_num(cell.mean):>8}{_mse(cell.mse):>10}")

    lines += ["", "Item response probabilities: mean (mse) by class"]
    lines.append(f"{'item':<6}" + "".join(f"{name:>20}" for name in report.classes))
    for j, row in enumerate(report.probs):
        cells = "".join(f"{_num(c.mean) + ' (' + _mse(c.mse) + ')':>20}" for c in row)
        lines.append(f"{j + 1:<6}{cells}")

    lines += ["", "Structural parameters", f"{'parameter':<20}{'truth':>8}{'mean':>8}{'mse':>10}"]
    for name, cell in report.params.items():
        lines.append(f"{name:<20}{_num(cell.truth):>8}{_num(cell.mean):>8}{_mse(cell.mse):>10}")

    for excluded in report.excluded:
        lines.append(f"excluded replicate {excluded.replicate}: {excluded.error}")
    return "\n".join(lines) + "\n"


def emit_report(report: StudyReport, out_dir: str | Path, format: str = "both") -> list[Path]:
    """Write the report; ``both`` writes the text tables and the structured document."""
    if format not in REPORT_FORMATS:
        raise UsageError(f"Unknown report format '{format}'; expected one of {', '.join(REPORT_FORMATS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if format in ("text", "both"):
        path = out_dir / TEXT_NAME
        path.write_text(render_text(report))
        written.append(path)
    if format in ("structured", "both"):
        path = out_dir / STRUCTURED_NAME
        path.write_text(report.model_dump_json(indent=2) + "\n")
        written.append(path)
    if report.elapsed_seconds is not None:
        path = out_dir / TIMING_NAME
        path.write_text(json.dumps({"elapsed_seconds": report.elapsed_seconds}) + "\n")
        written.append(path)
    return written


def read_report(path: str | Path) -> StudyReport:
    """Load a structured report from its file or from the directory holding it."""
    path = Path(path)
    if path.is_dir():
        path = path / STRUCTURED_NAME
    try:
        return StudyReport.model_validate_json(path.read_text())
    except (OSError, ValidationError) as e:
        raise ConfigError(f"Cannot read study report {path}: {e}") from e
