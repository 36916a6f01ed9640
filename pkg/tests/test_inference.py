"""Tests for point estimates, partial information, alignment, Q reconstruction and back-solving."""

import itertools
from pathlib import Path

import numpy as np
import pytest

from config import get_config
from errors import (
    DegenerateFitError,
    DomainError,
    InconsistentCodingError,
    PreconditionError,
    SingularDesignError,
    UnsupportedModelError,
)
from inference import (
    PointEstimate,
    align_labels,
    back_solve_params,
    cluster_partial_info,
    estimate_partial_info,
    lcdm_terms,
    load_coding,
    load_partitions,
    merge_partial_info_threshold,
    named_parameters,
    oracle_estimate,
    partial_info_accuracy,
    posterior_mean,
    reconstruct_q,
    truncate_classes,
    truncation_threshold,
    tv_cost,
    write_coding,
    write_partitions,
)
from models import (
    CRUM,
    DINA,
    DINO,
    AttributeSpace,
    ClassPartition,
    QMatrix,
    ResponseProbTable,
    load_q_matrix,
    table_for,
)
from sampler import PosteriorDraws
from simulation import MixtureWeights

PHOBIA = Path(__file__).resolve().parent.parent / "designs" / "phobia"


def _ragged_draws() -> PosteriorDraws:
    return PosteriorDraws(
        categories=(2,),
        iterations=np.array([0, 1]),
        weights=(np.array([0.3, 0.7]), np.array([0.5, 0.3, 0.2])),
        probs=(
            (np.array([[0.9, 0.1], [0.2, 0.8]]),),
            (np.array([[0.8, 0.2], [0.3, 0.7], [0.5, 0.5]]),),
        ),
        n_observations=25,
    )


def test_posterior_mean_sorts_and_pads_draws():
    est = posterior_mean(_ragged_draws())
    assert est.weights.tolist() == pytest.approx([0.6, 0.3, 0.1])
    assert est.probs[0].tolist() == pytest.approx([[0.5, 0.5], [0.6, 0.4], [0.5, 0.5]])
    assert est.n == 25


def test_truncation_keeps_classes_above_the_threshold():
    est = posterior_mean(_ragged_draws())
    truncation = truncate_classes(est)
    assert truncation.threshold == pytest.approx(0.2)
    assert truncation.retained == (0, 1)
    assert truncation.discarded_mass == pytest.approx(0.1)
    assert truncation.discarded_max == pytest.approx(0.1)
    with pytest.raises(DegenerateFitError):
        truncate_classes(est, threshold=0.9)


def test_truncation_threshold_override(monkeypatch):
    assert truncation_threshold(400) == pytest.approx(0.05)
    monkeypatch.setenv("DCMLAB_TRUNCATION_THRESHOLD", "0.01")
    get_config.cache_clear()
    assert truncation_threshold(400) == 0.01


def test_posterior_mean_needs_draws():
    empty = PosteriorDraws(
        categories=(2,), iterations=np.array([], dtype=int), weights=(), probs=(), n_observations=5
    )
    with pytest.raises(PreconditionError):
        posterior_mean(empty)


@pytest.mark.parametrize("method", ["cluster", "threshold"])
def test_oracle_partitions_equal_the_truth(nida, method):
    est = oracle_estimate(nida.table, nida.weights, 10000)
    assert estimate_partial_info(est, method, 10000) == nida.true_partitions()


def test_cluster_partitions_on_ncrum(ncrum):
    est = oracle_estimate(ncrum.table, ncrum.weights, 2000)
    partitions = estimate_partial_info(est)
    assert partitions == ncrum.true_partitions()
    # item 10 requires attributes 1 and 2 with distinct penalties: four blocks of two
    assert partitions[9].n_blocks == 4


def test_cluster_partial_info_on_noisy_estimates():
    vectors = np.array([[0.9, 0.1], [0.88, 0.12], [0.91, 0.09], [0.2, 0.8], [0.22, 0.78], [0.5, 0.5]])
    est = PointEstimate((vectors,), np.full(6, 1 / 6), 1000)
    partition = cluster_partial_info(est, 0)
    assert (0, 1, 2) in partition.blocks
    assert partition.block_of(3) == partition.block_of(4)


def test_flat_items_form_a_single_block():
    est = PointEstimate((np.array([[0.5, 0.5], [0.5005, 0.4995], [0.4998, 0.5002]]),), np.full(3, 1 / 3), 1000)
    assert cluster_partial_info(est, 0).n_blocks == 1


def test_threshold_merge_links_close_classes():
    vectors = np.array([[0.9, 0.1], [0.89, 0.11], [0.5, 0.5], [0.1, 0.9]])
    est = PointEstimate((vectors,), np.full(4, 0.25), 100)
    # tau = 100^(-1/2) = 0.1: only the first two classes are within reach
    assert merge_partial_info_threshold(est, 0) == ClassPartition(((0, 1), (2,), (3,)))
    assert merge_partial_info_threshold(est, 0, threshold=0.31) == ClassPartition(((0, 1, 2), (3,)))


def test_alignment_recovers_a_permutation(nida):
    perm = [3, 0, 7, 5, 1, 6, 2, 4]
    est = oracle_estimate(nida.table, nida.weights, 2000).restrict(perm)
    alignment = align_labels(est, nida.table)
    assert alignment.mapping == tuple(perm)
    assert alignment.cost == pytest.approx(0.0)
    partitions = estimate_partial_info(est)
    assert partial_info_accuracy(partitions, nida.true_partitions(), alignment) == 1.0


def test_alignment_with_fewer_estimated_classes(ncrum):
    est = oracle_estimate(ncrum.table, ncrum.weights, 2000).restrict(ncrum.weights.support())
    alignment = align_labels(est, ncrum.table, ncrum.weights)
    assert alignment.mapping == tuple(ncrum.weights.support())
    with pytest.raises(PreconditionError):
        align_labels(ncrum.table, est.table())


def test_tv_cost():
    a = table_for(DINA(np.array([0.1]), np.array([0.2])), QMatrix(np.array([[1]])))
    cost = tv_cost(a, a)
    assert np.allclose(np.diag(cost), 0.0)
    assert cost[0, 1] == pytest.approx(0.7)


@pytest.mark.parametrize(("n_estimated", "n_true"), [(2, 2), (3, 3), (4, 5), (5, 5), (3, 6), (6, 6)])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_alignment_cost_matches_exhaustive_search(n_estimated, n_true, seed):
    rng = np.random.default_rng(seed)
    truth = ResponseProbTable.from_success(rng.uniform(0.05, 0.95, (5, n_true)))
    estimated = ResponseProbTable.from_success(rng.uniform(0.05, 0.95, (5, n_estimated)))
    cost = tv_cost(estimated, truth)
    best = min(
        sum(cost[a, b] for a, b in enumerate(assignment))
        for assignment in itertools.permutations(range(n_true), n_estimated)
    )
    alignment = align_labels(estimated, truth)
    assert alignment.cost == pytest.approx(best)
    assert sum(cost[a, b] for a, b in enumerate(alignment.mapping)) == pytest.approx(best)


def test_reconstruct_q_with_the_phobia_coding():
    partitions = load_partitions(PHOBIA / "partitions.json")
    coding = load_coding(PHOBIA / "coding.json")
    result = reconstruct_q(partitions, AttributeSpace.binary(3), coding)
    assert result.q.to_list() == load_q_matrix(PHOBIA / "q.csv").to_list()
    assert result.uninformative == ()
    assert result.to_document()["coding"]["4"] == [0, 0, 0]


def test_reconstruct_q_recovers_nida_from_its_true_partitions(nida):
    coding = {a: tuple(int(v) for v in p) for a, p in enumerate(nida.space.profiles())}
    result = reconstruct_q(nida.true_partitions(), nida.space, coding)
    assert result.q.to_list() == nida.q.to_list()
    assert result.uninformative == ()


def test_reconstruct_q_searches_for_a_coding():
    partitions = load_partitions(PHOBIA / "partitions.json")
    result = reconstruct_q(partitions, AttributeSpace.binary(3))
    known = load_q_matrix(PHOBIA / "q.csv")
    assert result.q.entries.sum() <= known.entries.sum()
    again = reconstruct_q(partitions, AttributeSpace.binary(3), result.coding)
    assert again.q.to_list() == result.q.to_list()


def test_reconstruct_q_flags_uninformative_items():
    partitions = [ClassPartition(((0,), (1,))), ClassPartition(((0, 1),))]
    result = reconstruct_q(partitions, AttributeSpace.binary(1), {0: (0,), 1: (1,)})
    assert result.q.to_list() == [[1], [0]]
    assert result.uninformative == (1,)


def test_reconstruct_q_rejects_inconsistent_codings():
    partitions = [ClassPartition(((0,), (1,)))]
    with pytest.raises(InconsistentCodingError) as info:
        reconstruct_q(partitions, AttributeSpace.binary(2), {0: (0, 0), 1: (1, 1)})
    assert info.value.items == [1]
    with pytest.raises(DomainError):
        reconstruct_q(partitions, AttributeSpace.binary(2), {0: (1, 0), 1: (1, 0)})
    with pytest.raises(PreconditionError):
        reconstruct_q(partitions, AttributeSpace.binary(4))


def test_coding_files(tmp_path):
    path = tmp_path / "coding.json"
    write_coding({0: (1, 0), 1: (0, 1)}, path)
    assert load_coding(path) == {0: (1, 0), 1: (0, 1)}


def test_partition_files(tmp_path, nida):
    path = tmp_path / "partitions.json"
    write_partitions(nida.true_partitions(), path)
    assert load_partitions(path) == nida.true_partitions()


@pytest.mark.parametrize("design_name", ["nida", "ncrum", "lcdm"])
def test_back_solve_recovers_the_design(design_name, request):
    design = request.getfixturevalue(design_name)
    est = oracle_estimate(design.table, design.weights, 2000)
    result = back_solve_params(est, design.q, design.family, design.space.profiles())
    truth = named_parameters(design.model, design.q)
    fitted = named_parameters(result.model, design.q)
    assert fitted.keys() == truth.keys()
    for name, value in truth.items():
        assert fitted[name] == pytest.approx(value, abs=1e-6), name
    assert result.residual_norm < 1e-6


@pytest.mark.parametrize(
    "model",
    [
        DINA(np.full(7, 0.1), np.full(7, 0.2)),
        DINO(np.full(7, 0.15), np.full(7, 0.25)),
        CRUM(np.full(7, -1.0), np.array([[2.0, 0.0], [0.0, 1.5]] * 3 + [[1.0, 1.0]])),
    ],
)
def test_back_solve_other_families(model, dina_q):
    table = table_for(model, dina_q)
    est = oracle_estimate(table, MixtureWeights.uniform(4), 500)
    result = back_solve_params(est, dina_q, model.family, AttributeSpace.binary(2).profiles())
    assert named_parameters(result.model, dina_q) == pytest.approx(named_parameters(model, dina_q))


def test_back_solve_singular_designs(dina_q):
    table = table_for(DINA(np.full(7, 0.1), np.full(7, 0.2)), dina_q)
    est = oracle_estimate(table, MixtureWeights.uniform(4), 500).restrict([0, 3])
    with pytest.raises(SingularDesignError) as info:
        back_solve_params(est, dina_q, "NC-RUM", np.array([[0, 0], [1, 1]]))
    assert info.value.item == 6
    with pytest.raises(SingularDesignError):
        back_solve_params(est.restrict([0]), dina_q, "DINA", np.array([[0, 0]]))
    with pytest.raises(UnsupportedModelError):
        back_solve_params(est, dina_q, "GDINA", np.array([[0, 0], [1, 1]]))
    with pytest.raises(DomainError):
        back_solve_params(est, dina_q, "DINA", np.array([[0, 0]]))


def test_lcdm_terms():
    assert lcdm_terms((0, 2)) == [(0,), (2,), (0, 2)]
    assert len(lcdm_terms((0, 1, 2))) == 7
