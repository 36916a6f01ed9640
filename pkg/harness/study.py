"""Replication studies: simulate, fit, truncate, align and evaluate over R seeds."""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import NDArray
from pydantic import BaseModel, Field, ValidationError, model_validator

from config import get_config
from errors import ConfigError, DegenerateFitError, PreconditionError, SamplerFault, SingularDesignError
from inference import (
    SUPPORTED,
    align_labels,
    back_solve_params,
    estimate_partial_info,
    named_parameters,
    oracle_estimate,
    partial_info_accuracy,
    posterior_mean,
    truncate_classes,
)
from logging_config import get_logger, run_context
from sampler import SamplerConfig, run_chain
from simulation import CHAIN, DATA, replicate_rng, simulate

from .designs import Design, build_design, design_from_files
from .report import CellSummary, ExcludedReplicate, StudyReport

log = get_logger(__name__)


class StudyConfig(BaseModel):
    """A replication study.

    Either `design` names a built-in design or `q`, `model` and `pi` point to files
    (paths relative to the config file). `workers` and `output_dir` default to the
    environment settings.
    """

    design: str | None = None
    q: Path | None = None
    model: Path | None = None
    pi: Path | None = None
    n: int = Field(default=2000, ge=1)
    replicates: int = Field(default=20, ge=1)
    seed: int = 0
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    oracle: bool = False
    method: Literal["cluster", "threshold"] = "cluster"
    backsolve: bool = True
    family: str | None = None
    workers: int | None = Field(default=None, ge=1)
    output_dir: Path | None = None

    @model_validator(mode="after")
    def _one_design(self) -> "StudyConfig":
        files = (self.q, self.model, self.pi)
        if self.design is None and not all(files):
            raise ValueError("give either a built-in design or all of q, model and pi")
        if self.design is not None and any(files):
            raise ValueError("a built-in design cannot be combined with q, model or pi files")
        return self


def load_study_config(path: str | Path) -> StudyConfig:
    """Read a study config and resolve its file references against the config's directory."""
    path = Path(path)
    try:
        cfg = StudyConfig.model_validate_json(path.read_text())
    except (OSError, ValidationError) as e:
        raise ConfigError(f"Cannot read study config {path}: {e}") from e
    updates = {}
    for name in ("q", "model", "pi"):
        value = getattr(cfg, name)
        if value is not None:
            resolved = value if value.is_absolute() else path.parent / value
            if not resolved.exists():
                raise ConfigError(f"{path}: referenced {name} file {resolved} does not exist")
            updates[name] = resolved
    return cfg.model_copy(update=updates)


def resolve_design(cfg: StudyConfig) -> Design:
    if cfg.design is not None:
        return build_design(cfg.design)
    return design_from_files(cfg.q, cfg.model, cfg.pi)


@dataclass
class ReplicateResult:
    index: int
    retained: int = 0
    discarded_mass: float = 0.0
    discarded_max: float = 0.0
    probs: NDArray | None = None
    weights: NDArray | None = None
    accuracy: float = 0.0
    params: dict[str, float] = field(default_factory=dict)
    error: str | None = None


def run_replicate(cfg: StudyConfig, design: Design, index: int) -> ReplicateResult:
    """One replicate on streams (seed, index, DATA) and (seed, index, CHAIN).

    Probabilities and weights come back indexed by true class: unmatched true classes
    get NaN probabilities and zero weight.
    """
    with run_context(design=design.name, replicate=index, seed=cfg.seed):
        return _replicate(cfg, design, index)


def _replicate(cfg: StudyConfig, design: Design, index: int) -> ReplicateResult:
    table, weights = design.table, design.weights
    try:
        if cfg.oracle:
            est = oracle_estimate(table, weights, cfg.n)
        else:
            data = simulate(table, weights, cfg.n, replicate_rng(cfg.seed, index, DATA))
            draws = run_chain(data, cfg.sampler, replicate_rng(cfg.seed, index, CHAIN))
            est = posterior_mean(draws)
        truncation = truncate_classes(est, cfg.n)
        kept = est.restrict(truncation.retained)
        alignment = align_labels(kept, table, weights)
        partitions = estimate_partial_info(kept, cfg.method, cfg.n)
        accuracy = partial_info_accuracy(partitions, design.true_partitions(), alignment)

        probs = np.full((table.n_items, table.n_classes), np.nan)
        pi = np.zeros(table.n_classes)
        success = kept.table().success()
        for estimated, true in enumerate(alignment.mapping):
            probs[:, true] = success[:, estimated]
            pi[true] = kept.weights[estimated]

        params: dict[str, float] = {}
        family = cfg.family or design.family
        if cfg.backsolve and design.model is not None and family in SUPPORTED:
            profiles = design.profiles()[list(alignment.mapping)]
            fitted = back_solve_params(kept, design.q, family, profiles)
            params = named_parameters(fitted.model, design.q)
    except (SamplerFault, DegenerateFitError, PreconditionError, SingularDesignError) as e:
        log.warning("replicate_excluded", error=str(e))
        return ReplicateResult(index=index, error=f"{type(e).__name__}: {e}")

    log.info("replicate_done", retained=truncation.n_retained, accuracy=round(accuracy, 4))
    return ReplicateResult(
        index=index,
        retained=truncation.n_retained,
        discarded_mass=truncation.discarded_mass,
        discarded_max=truncation.discarded_max,
        probs=probs,
        weights=pi,
        accuracy=accuracy,
        params=params,
    )


def _replicate_task(cfg: StudyConfig, index: int) -> ReplicateResult:
    return run_replicate(cfg, resolve_design(cfg), index)


def summarize(truth: float | None, values: list[float]) -> CellSummary:
    """Mean and MSE over the finite `values` (MSE needs a truth)."""
    finite = [v for v in values if np.isfinite(v)]
    if not finite:
        return CellSummary(truth=truth, mean=None, mse=None, count=0)
    mean = float(np.mean(finite))
    mse = float(np.mean([(v - truth) ** 2 for v in finite])) if truth is not None else None
    return CellSummary(truth=truth, mean=mean, mse=mse, count=len(finite))


def aggregate(cfg: StudyConfig, design: Design, results: list[ReplicateResult]) -> StudyReport:
    """Reduce replicate results in index order."""
    results = sorted(results, key=lambda r: r.index)
    done = [r for r in results if r.error is None]
    excluded = [ExcludedReplicate(replicate=r.index, error=r.error or "") for r in results if r.error]

    truth_p = design.table.success() if design.table.is_binary else None
    probs: list[list[CellSummary]] = []
    if truth_p is not None:
        for j in range(design.table.n_items):
            probs.append(
                [
                    summarize(float(truth_p[j, a]), [float(r.probs[j, a]) for r in done])
                    for a in range(design.table.n_classes)
                ]
            )
    pi = [
        summarize(float(design.weights[a]), [float(r.weights[a]) for r in done])
        for a in range(design.table.n_classes)
    ]

    params: dict[str, CellSummary] = {}
    if design.model is not None and any(r.params for r in done):
        truth = named_parameters(design.model, design.q)
        names = [name for name in done[0].params]
        for name in names:
            params[name] = summarize(truth.get(name, 0.0), [r.params.get(name, np.nan) for r in done])

    return StudyReport(
        design=design.name,
        family=cfg.family or design.family,
        n=cfg.n,
        replicates=cfg.replicates,
        seed=cfg.seed,
        oracle=cfg.oracle,
        method=cfg.method,
        classes=design.class_names(),
        completed=len(done),
        excluded=excluded,
        retained_classes=[r.retained for r in done],
        discarded_mass_mean=float(np.mean([r.discarded_mass for r in done])) if done else 0.0,
        discarded_max=max((r.discarded_max for r in done), default=0.0),
        accuracy=[r.accuracy for r in done],
        accuracy_mean=float(np.mean([r.accuracy for r in done])) if done else 0.0,
        pi=pi,
        probs=probs,
        params=params,
    )


def run_study(cfg: StudyConfig, workers: int | None = None) -> StudyReport:
    """Run every replicate (in parallel up to `workers`) and aggregate deterministically."""
    workers = workers or cfg.workers or get_config().workers
    design = resolve_design(cfg)
    log.info(
        "study_started",
        design=design.name,
        n=cfg.n,
        replicates=cfg.replicates,
        workers=workers,
        oracle=cfg.oracle,
    )
    started = time.perf_counter()
    if workers > 1:
        results = Parallel(n_jobs=workers)(
            delayed(_replicate_task)(cfg, r) for r in range(cfg.replicates)
        )
    else:
        results = [run_replicate(cfg, design, r) for r in range(cfg.replicates)]
    report = aggregate(cfg, design, list(results))
    report.elapsed_seconds = time.perf_counter() - started
    log.info(
        "study_finished",
        completed=report.completed,
        excluded=len(report.excluded),
        accuracy=round(report.accuracy_mean, 4),
        seconds=round(report.elapsed_seconds, 1),
    )
    return report
