"""Tests for mixture weights, seeded streams, datasets and the generator."""

import json

import numpy as np
import pytest

from errors import ConfigError, DatasetFormatError, DomainError, SizeLimitError
from models import ResponseProbTable
from simulation import (
    CHAIN,
    DATA,
    Dataset,
    MixtureWeights,
    labels_path,
    load_dataset,
    load_weights,
    log_likelihood,
    marginal_pattern_probs,
    replicate_rng,
    replicate_seed,
    response_patterns,
    simulate,
    write_dataset,
    write_weights,
)


def test_point_mass_simulation_is_deterministic():
    table = ResponseProbTable.from_success(np.array([[1.0, 0.0], [0.0, 1.0]]))
    data = simulate(table, MixtureWeights(np.array([1.0, 0.0])), 50, seed=3)
    assert np.all(data.labels == 0)
    assert np.all(data.responses[:, 0] == 2)
    assert np.all(data.responses[:, 1] == 1)


def test_identical_seeds_give_identical_data(nida):
    first = simulate(nida.table, nida.weights, 300, seed=11)
    second = simulate(nida.table, nida.weights, 300, seed=11)
    other = simulate(nida.table, nida.weights, 300, seed=12)
    assert np.array_equal(first.responses, second.responses)
    assert np.array_equal(first.labels, second.labels)
    assert not np.array_equal(first.responses, other.responses)


def test_class_frequencies_follow_the_weights(ncrum):
    data = simulate(ncrum.table, ncrum.weights, 20000, seed=5)
    frequencies = np.bincount(data.labels, minlength=8) / data.n
    assert np.allclose(frequencies, ncrum.weights.weights, atol=0.02)
    # zero-weight classes never appear
    assert frequencies[0] == 0.0 and frequencies[3] == 0.0 and frequencies[5] == 0.0


def test_item_marginals_converge(nida):
    data = simulate(nida.table, nida.weights, 20000, seed=9)
    for j in (0, 9, 12):
        expected = marginal_pattern_probs(nida.table, nida.weights, [j])[1]
        assert np.mean(data.responses[:, j] == 2) == pytest.approx(expected, abs=0.02)


def test_simulate_rejects_bad_inputs(nida):
    with pytest.raises(DomainError):
        simulate(nida.table, nida.weights, 0, seed=1)
    with pytest.raises(DomainError):
        simulate(nida.table, MixtureWeights.uniform(4), 10, seed=1)


def test_response_patterns_first_item_slowest():
    assert response_patterns((2, 3)).tolist() == [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]]


def test_marginal_pattern_probs_sum_to_one(lcdm):
    probs = marginal_pattern_probs(lcdm.table, lcdm.weights, [0, 5, 10, 15])
    assert probs.shape == (16,)
    assert probs.sum() == pytest.approx(1.0)
    with pytest.raises(SizeLimitError):
        marginal_pattern_probs(lcdm.table, lcdm.weights, cap=100)


def test_log_likelihood_matches_brute_force(nida):
    data = simulate(nida.table, nida.weights, 25, seed=2)
    success = nida.table.success()
    expected = 0.0
    for row in data.responses:
        total = 0.0
        for a in range(8):
            p = nida.weights[a]
            for j, y in enumerate(row):
                p *= success[j, a] if y == 2 else 1.0 - success[j, a]
            total += p
        expected += np.log(total)
    assert log_likelihood(nida.table, nida.weights, data) == pytest.approx(expected)
    assert log_likelihood(nida.table, nida.weights, Dataset.empty(data.categories)) == 0.0


def test_replicate_streams():
    a = replicate_rng(7, 0, DATA).random(5)
    assert np.array_equal(a, replicate_rng(7, 0, DATA).random(5))
    assert not np.array_equal(a, replicate_rng(7, 0, CHAIN).random(5))
    assert not np.array_equal(a, replicate_rng(7, 1, DATA).random(5))
    assert not np.array_equal(a, replicate_rng(8, 0, DATA).random(5))
    assert replicate_seed(7, 3, CHAIN) == replicate_seed(7, 3, CHAIN)
    assert replicate_seed(7, 3, CHAIN) != replicate_seed(7, 3, DATA)


@pytest.mark.parametrize(
    "weights",
    [[0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0], []],
)
def test_mixture_weights_validation(weights):
    with pytest.raises(DomainError):
        MixtureWeights(np.array(weights, dtype=float))


def test_mixture_weights_support_and_restrict():
    w = MixtureWeights.normalized([0.0, 1 / 3, 0.0, 2 / 3])
    assert w.support() == [1, 3]
    assert w.restrict([1, 3]).to_list() == pytest.approx([1 / 3, 2 / 3])
    with pytest.raises(DomainError):
        MixtureWeights.normalized([0.2, 0.2])


def test_weights_documents(tmp_path):
    path = tmp_path / "pi.json"
    path.write_text(json.dumps({"pi": [1 / 6, 1 / 6, 1 / 6, 1 / 2]}))
    assert load_weights(path).n_classes == 4
    write_weights(MixtureWeights.uniform(2), path)
    assert load_weights(path).to_list() == [0.5, 0.5]
    path.write_text("{}")
    with pytest.raises(ConfigError):
        load_weights(path)


def test_dataset_files_keep_labels_in_a_sidecar(tmp_path, nida):
    data = simulate(nida.table, nida.weights, 40, seed=1)
    path = tmp_path / "data.csv"
    write_dataset(data, path)
    header = path.read_text().splitlines()[0]
    assert header.startswith("Y1:k2,Y2:k2")
    assert "class" not in header
    assert labels_path(path).name == "data.labels.csv"

    loaded = load_dataset(path)
    assert np.array_equal(loaded.responses, data.responses)
    assert np.array_equal(loaded.labels, data.labels)
    assert loaded.categories == (2,) * 13
    assert loaded.without_labels().labels is None


def test_dataset_categories_from_data(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("a,b\n1,3\n2,1\n1,1\n")
    data = load_dataset(path)
    assert data.categories == (2, 3)
    assert data.labels is None
    assert data.one_hot.tolist()[0] == [1.0, 0.0, 0.0, 0.0, 1.0]


@pytest.mark.parametrize(
    ("body", "line"),
    [
        ("Y1:k2,Y2:k2\n1,2\n2,1,1\n", 3),
        ("Y1:k2,Y2:k2\n1,2\n2\n", 3),
        ("Y1:k2,Y2:k2\n1,2\n0,1\n", 3),
        ("Y1:k2,Y2:k2\n1,2\n2,1\n1,1.5\n", 4),
        ("Y1:k2,Y2:k2\nx,2\n", 2),
        ("Y1:k2,Y2:k2\n1,3\n", 2),
    ],
)
def test_malformed_datasets_report_the_line(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(DatasetFormatError) as info:
        load_dataset(path)
    assert info.value.line == line


def test_dataset_validation():
    with pytest.raises(DomainError):
        Dataset(np.array([[1, 3]]), (2, 2))
    with pytest.raises(DomainError):
        Dataset(np.array([[1, 2]]), (2, 2), labels=np.array([0, 1]))
