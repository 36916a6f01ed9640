"""Tests for Q-matrices, attribute spaces and the DCM parameterizations."""

import json

import numpy as np
import pytest

from errors import ConfigError, DomainError, SizeLimitError, UnsupportedModelError
from models import (
    CRUM,
    DINA,
    DINO,
    LCDM,
    NIDA,
    AttributeSpace,
    ClassPartition,
    QMatrix,
    ReducedNCRUM,
    ResponseProbTable,
    ResponseSpec,
    Saturated,
    build_prob_table,
    dump_model,
    ideal_response_dina,
    ideal_response_dino,
    load_model,
    load_q_matrix,
    parse_model,
    table_for,
    true_partial_info,
)
from models.families import _SlipGuess


@pytest.mark.parametrize(
    ("profile", "qrow", "expected"),
    [
        ((1, 1, 0), (1, 1, 0), 1),
        ((1, 0, 0), (1, 1, 0), 0),
        ((1, 1, 1), (0, 0, 0), 1),
    ],
)
def test_ideal_response_dina(profile, qrow, expected):
    assert ideal_response_dina(profile, qrow) == expected


@pytest.mark.parametrize(
    ("profile", "qrow", "expected"),
    [
        ((1, 0, 0), (1, 1, 0), 1),
        ((0, 0, 1), (1, 1, 0), 0),
        ((0, 0, 0), (0, 0, 0), 0),
    ],
)
def test_ideal_response_dino(profile, qrow, expected):
    assert ideal_response_dino(profile, qrow) == expected


def test_ideal_response_rejects_polytomous_profiles():
    with pytest.raises(UnsupportedModelError):
        ideal_response_dina((2, 0), (1, 0))


def test_q_matrix_rejects_empty_rows_and_non_binary_entries():
    with pytest.raises(DomainError, match="rows \\[2\\]"):
        QMatrix(np.array([[1, 0], [0, 0]]))
    with pytest.raises(DomainError):
        QMatrix(np.array([[1, 2]]))
    assert QMatrix(np.array([[1, 0], [0, 0]]), allow_empty_rows=True).empty_rows() == [1]


def test_attribute_space_enumerates_last_attribute_fastest():
    space = AttributeSpace((2, 3))
    assert space.size == 6
    assert space.profiles().tolist() == [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]]
    assert all(space.index_of(space.profile(i)) == i for i in range(space.size))
    assert space.index_of((1, 2)) == 5


def test_attribute_space_validation():
    with pytest.raises(DomainError):
        AttributeSpace((2, 1))
    with pytest.raises(DomainError):
        AttributeSpace.binary(2).index_of((0, 2))
    with pytest.raises(SizeLimitError) as info:
        AttributeSpace.binary(5).check_size(cap=16)
    assert info.value.size == 32


def test_nida_item_ten(nida):
    """Item 10 loads on attributes 1 and 2 with s = 0.1 and g = 0.5."""
    model, q = nida.model, nida.q
    p = {a: model.response_prob(q, 9, a)[1] for a in [(1, 1, 0), (1, 0, 1), (0, 0, 1)]}
    assert p[(1, 1, 0)] == pytest.approx(0.81)
    assert p[(1, 0, 1)] == pytest.approx(0.45)
    assert p[(0, 0, 1)] == pytest.approx(0.25)


def test_ncrum_item_ten(ncrum):
    p = ncrum.model.response_prob(ncrum.q, 9, (0, 0, 1))
    assert p[1] == pytest.approx(0.9 * 0.5 * 0.7)
    assert p.sum() == pytest.approx(1.0)


def test_lcdm_uses_additive_intercept(lcdm):
    assert lcdm.model.response_prob(lcdm.q, 0, (1, 0, 0))[1] == pytest.approx(0.8808, abs=1e-4)
    assert lcdm.model.response_prob(lcdm.q, 0, (0, 1, 1))[1] == pytest.approx(0.1192, abs=1e-4)


def test_dina_with_equal_slip_and_guess_is_flat():
    q = QMatrix(np.array([[1]]))
    table = build_prob_table(DINA(np.array([0.5]), np.array([0.5])), q, AttributeSpace.binary(1), ResponseSpec.binary(1))
    assert np.allclose(table.item(0), 0.5)
    assert true_partial_info(table, 0).n_blocks == 1


def test_dino_is_dual_to_dina_on_complement_profiles():
    """DINO(s, g) at alpha equals 1 - DINA(g, s) at 1 - alpha."""
    rng = np.random.default_rng(3)
    q = QMatrix(np.array([[1, 0, 1, 0], [1, 1, 0, 0], [0, 1, 1, 1], [1, 1, 1, 1]]))
    slip, guess = rng.uniform(0.05, 0.3, 4), rng.uniform(0.05, 0.3, 4)
    profiles = AttributeSpace.binary(4).profiles()
    dino = DINO(slip, guess).success_probs(q, profiles)
    dina = DINA(guess, slip).success_probs(q, 1 - profiles)
    assert np.allclose(dino, 1.0 - dina)


def test_slip_guess_base_needs_an_ideal_response():
    with pytest.raises(TypeError, match="_ideal"):
        _SlipGuess(np.array([0.1]), np.array([0.2]))


@pytest.mark.parametrize("design_name", ["nida", "ncrum", "lcdm"])
def test_response_depends_only_on_required_attributes(design_name, request):
    design = request.getfixturevalue(design_name)
    profiles = design.space.profiles()
    p = design.table.success()
    for j in range(design.q.n_items):
        free = [k for k in range(3) if design.q.entries[j, k] == 0]
        for k in free:
            flipped = profiles.copy()
            flipped[:, k] = 1 - flipped[:, k]
            partner = [design.space.index_of(row) for row in flipped]
            assert np.array_equal(p[j], p[j, partner])


@pytest.mark.parametrize(
    "model",
    [
        DINA(np.full(3, 0.2), np.full(3, 0.1)),
        DINO(np.full(3, 0.2), np.full(3, 0.1)),
        NIDA.per_attribute([0.1, 0.2], [0.2, 0.3], 3),
        ReducedNCRUM(np.full(3, 0.9), np.array([[0.3, np.nan], [np.nan, 0.4], [0.5, 0.6]])),
        CRUM(np.full(3, -1.0), np.array([[2.0, np.nan], [np.nan, 2.0], [1.0, 1.5]])),
        LCDM(np.full(3, -2.0), ({(0,): 3.0}, {(1,): 3.0}, {(0,): 1.0, (1,): 1.0, (0, 1): 2.0})),
    ],
)
def test_every_family_yields_valid_distributions(model):
    q = QMatrix(np.array([[1, 0], [0, 1], [1, 1]]))
    table = table_for(model, q)
    for p in table.probs:
        assert p.min() >= 0
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)


def test_out_of_range_parameters_are_rejected():
    q = QMatrix(np.array([[1]]))
    with pytest.raises(DomainError):
        DINA(np.array([1.2]), np.array([0.1])).success_probs(q, np.array([[1]]))
    with pytest.raises(DomainError):
        ReducedNCRUM(np.array([0.9]), np.array([[1.0]])).validate(q)


def test_lcdm_rejects_effects_outside_the_q_row():
    q = QMatrix(np.array([[1, 0]]))
    with pytest.raises(DomainError, match="not permitted"):
        LCDM(np.array([0.0]), ({(1,): 1.0},)).validate(q)


def test_saturated_table_is_copied():
    probs = (np.array([[0.2, 0.3, 0.5], [0.6, 0.2, 0.2]]), np.array([[0.9, 0.1], [0.4, 0.6]]))
    table = table_for(Saturated(probs), QMatrix(np.array([[1], [1]])))
    assert table.spec.categories == (3, 2)
    assert np.array_equal(table.item(0), probs[0])


def test_polytomous_responses_need_the_saturated_family():
    q = QMatrix(np.array([[1]]))
    with pytest.raises(UnsupportedModelError):
        build_prob_table(DINA(np.array([0.1]), np.array([0.2])), q, AttributeSpace.binary(1), ResponseSpec((3,)))


def test_response_table_validation():
    with pytest.raises(DomainError, match="do not sum"):
        ResponseProbTable((np.array([[0.5, 0.6]]),))
    with pytest.raises(DomainError, match="classes"):
        ResponseProbTable((np.array([[0.5, 0.5]]), np.array([[0.5, 0.5], [0.1, 0.9]])))


def test_true_partial_info_nida_single_attribute_item(nida):
    partition = true_partial_info(nida.table, 0)
    assert partition.blocks == ((0, 1, 2, 3), (4, 5, 6, 7))


def test_true_partial_info_dina_splits_on_ideal_response():
    q = QMatrix(np.array([[1, 1, 0]]))
    table = table_for(DINA(np.array([0.1]), np.array([0.2])), q)
    assert true_partial_info(table, 0).blocks == ((0, 1, 2, 3, 4, 5), (6, 7))


def test_true_partial_info_is_a_partition_under_relabeling(ncrum):
    order = np.random.default_rng(0).permutation(8)
    for j in range(ncrum.table.n_items):
        partition = true_partial_info(ncrum.table, j)
        assert partition.classes == tuple(range(8))
        permuted = true_partial_info(ncrum.table.permute(order), j)
        assert permuted.relabel({i: int(order[i]) for i in range(8)}) == partition


def test_class_partition_canonical_form():
    a = ClassPartition(((3, 1), (2,), (0,)))
    b = ClassPartition.from_labels(["x", "y", "z", "y"])
    assert a.blocks == ((0,), (1, 3), (2,))
    assert a == b
    assert a.block_of(3) == 1
    with pytest.raises(ValueError):
        ClassPartition(((0, 1), (1,)))


def test_model_documents(tmp_path, lcdm):
    path = tmp_path / "model.json"
    dump_model(lcdm.model, path)
    reloaded = load_model(path, lcdm.q)
    assert np.allclose(table_for(reloaded, lcdm.q).success(), lcdm.table.success())

    nida = parse_model({"family": "NIDA", "slip": [0.1, 0.1], "guess": [0.2, 0.3]}, QMatrix(np.eye(2, dtype=int)))
    assert isinstance(nida, NIDA)
    assert nida.slip.shape == (2, 2)

    with pytest.raises(ConfigError):
        parse_model({"family": "GDINA"}, QMatrix(np.eye(2, dtype=int)))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "DINA", "slip": [0.1]}))
    with pytest.raises(ConfigError):
        load_model(bad, QMatrix(np.eye(2, dtype=int)))


def test_q_matrix_files(tmp_path):
    good = tmp_path / "q.csv"
    good.write_text("# items by attributes\n1,0\n0,1\n1,1\n")
    assert load_q_matrix(good).to_list() == [[1, 0], [0, 1], [1, 1]]
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,0\n1\n")
    with pytest.raises(ConfigError):
        load_q_matrix(ragged)
