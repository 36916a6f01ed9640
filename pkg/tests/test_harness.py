"""Tests for the replication harness and study reports."""

import json
import shutil
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

import harness.designs
import harness.study
from errors import ConfigError, DegenerateFitError, UsageError
from harness import (
    StudyConfig,
    build_design,
    emit_report,
    load_study_config,
    read_report,
    render_text,
    resolve_design,
    run_replicate,
    run_study,
    summarize,
)
from harness.report import STRUCTURED_NAME, ExcludedReplicate
from inference import load_partitions, named_parameters
from models import load_q_matrix
from sampler import SamplerConfig

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("design_name", ["nida", "ncrum", "lcdm"])
def test_oracle_replicate_recovers_the_design(design_name):
    design = build_design(design_name)
    cfg = StudyConfig(design=design_name, oracle=True, replicates=1)
    result = run_replicate(cfg, design, 0)
    support = design.weights.support()
    assert result.error is None
    assert result.accuracy == 1.0
    assert result.retained == len(support)
    assert np.allclose(result.probs[:, support], design.table.success()[:, support])
    assert np.allclose(result.weights, design.weights.weights)
    truth = named_parameters(design.model, design.q)
    assert result.params.keys() == truth.keys()
    for name, value in truth.items():
        assert result.params[name] == pytest.approx(value, abs=1e-6), name


def test_oracle_study_report():
    cfg = StudyConfig(design="ncrum", oracle=True, replicates=2, seed=3)
    report = run_study(cfg)
    assert report.completed == 2
    assert report.accuracy_mean == 1.0
    assert report.retained_classes == [5, 5]
    assert report.classes[7] == "111"
    assert report.pi[0].truth == 0.0 and report.pi[0].mse == 0.0
    # never-matched classes have no estimates
    assert report.probs[0][0].count == 0 and report.probs[0][0].mean is None
    assert report.params["phi[1]"].mse == pytest.approx(0.0, abs=1e-12)

    text = render_text(report)
    assert "Design ncrum (NC-RUM)" in text
    assert "Partial-information accuracy (cluster): 1.000" in text


def test_studies_are_deterministic():
    cfg = StudyConfig(design="nida", oracle=True, replicates=3)
    first, second = run_study(cfg), run_study(cfg)
    assert first.model_dump() == second.model_dump()


def test_parallel_workers_give_the_same_report():
    cfg = StudyConfig(design="lcdm", oracle=True, replicates=3)
    assert run_study(cfg, workers=2).model_dump() == run_study(cfg, workers=1).model_dump()


def test_failed_replicates_are_excluded(monkeypatch):
    def degenerate(*args, **kwargs):
        raise DegenerateFitError("no class survives")

    monkeypatch.setattr(harness.study, "oracle_estimate", degenerate)
    report = run_study(StudyConfig(design="nida", oracle=True, replicates=2))
    assert report.completed == 0
    assert [e.replicate for e in report.excluded] == [0, 1]
    assert report.excluded[0].error == "DegenerateFitError: no class survives"
    assert report.accuracy_mean == 0.0
    assert "excluded replicate 1" in render_text(report)


def test_excluded_replicates_keep_their_stream_index(monkeypatch):
    calls = []
    original = harness.study.oracle_estimate

    def fail_second(*args, **kwargs):
        calls.append(len(calls))
        if len(calls) == 2:
            raise DegenerateFitError("no class survives")
        return original(*args, **kwargs)

    monkeypatch.setattr(harness.study, "oracle_estimate", fail_second)
    report = run_study(StudyConfig(design="nida", oracle=True, replicates=3), workers=1)
    assert report.completed == 2
    assert [e.replicate for e in report.excluded] == [1]
    description = ExcludedReplicate.model_json_schema()["properties"]["replicate"]["description"]
    assert "0-based" in description


def test_short_sampler_study_accounts_for_every_replicate():
    cfg = StudyConfig(
        design="nida",
        n=300,
        replicates=1,
        sampler=SamplerConfig(iterations=40, burn_in=20, thin=2),
        backsolve=False,
    )
    report = run_study(cfg)
    assert report.completed + len(report.excluded) == 1
    assert report.params == {}


def test_reports_round_trip_without_timing(tmp_path):
    report = run_study(StudyConfig(design="lcdm", oracle=True, replicates=1))
    assert report.elapsed_seconds is not None
    written = emit_report(report, tmp_path / "out")
    assert sorted(p.name for p in written) == ["report.json", "report.txt", "timing.json"]
    document = json.loads((tmp_path / "out" / STRUCTURED_NAME).read_text())
    assert "elapsed_seconds" not in document
    assert read_report(tmp_path / "out").model_dump() == report.model_dump()

    with pytest.raises(UsageError):
        emit_report(report, tmp_path, format="html")
    with pytest.raises(ConfigError):
        read_report(tmp_path / "missing")


def test_summarize():
    cell = summarize(0.5, [0.4, 0.6, float("nan")])
    assert cell.mean == pytest.approx(0.5)
    assert cell.mse == pytest.approx(0.01)
    assert cell.count == 2
    empty = summarize(0.5, [])
    assert empty.mean is None and empty.count == 0
    assert summarize(None, [1.0]).mse is None


def test_study_config_needs_exactly_one_design():
    with pytest.raises(ValidationError):
        StudyConfig()
    with pytest.raises(ValidationError):
        StudyConfig(design="nida", q=Path("q.csv"))
    with pytest.raises(ValidationError):
        StudyConfig(design="nida", method="spectral")


def test_load_study_config_resolves_files():
    cfg = load_study_config(CONFIGS / "nida.json")
    assert cfg.q.exists() and cfg.model.exists() and cfg.pi.exists()
    assert cfg.replicates == 20
    design = resolve_design(cfg)
    assert design.name == "nida"
    assert np.allclose(design.table.success(), build_design("nida").table.success())
    assert np.allclose(design.weights.weights, build_design("nida").weights.weights)


def test_built_in_designs_are_read_from_their_directories(tmp_path, monkeypatch):
    root = tmp_path / "designs"
    shutil.copytree(harness.designs.DESIGN_ROOT, root)
    (root / "nida" / "pi.json").write_text(json.dumps({"pi": [0.125] * 8}))
    monkeypatch.setattr(harness.designs, "DESIGN_ROOT", root)
    assert np.allclose(build_design("nida").weights.weights, 0.125)

    (root / "lcdm" / "q.csv").unlink()
    with pytest.raises(ConfigError):
        build_design("lcdm")


def test_phobia_design_comes_from_its_files():
    design = build_design("phobia")
    directory = harness.designs.DESIGN_ROOT / "phobia"
    assert design.table.n_classes == 5
    assert design.table.n_items == design.q.n_items == 13
    assert design.model is None
    assert design.true_partitions() == load_partitions(directory / "partitions.json")
    assert design.q.to_list() == load_q_matrix(directory / "q.csv").to_list()


def test_load_study_config_errors(tmp_path):
    path = tmp_path / "study.json"
    path.write_text(json.dumps({"q": "q.csv", "model": "model.json", "pi": "pi.json"}))
    with pytest.raises(ConfigError, match="does not exist"):
        load_study_config(path)
    path.write_text("not json")
    with pytest.raises(ConfigError):
        load_study_config(path)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["nida", "ncrum", "lcdm"])
def test_replication_at_desk_scale(name):
    cfg = load_study_config(CONFIGS / f"{name}.json").model_copy(update={"replicates": 2})
    design = resolve_design(cfg)
    report = run_study(cfg)
    assert report.completed == 2
    support = design.weights.support()
    assert all(r == len(support) for r in report.retained_classes)
    for a in support:
        assert abs(report.pi[a].mean - design.weights[a]) <= 0.02
        for row in report.probs:
            assert abs(row[a].mean - row[a].truth) <= 0.03
