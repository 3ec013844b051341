import json

import numpy as np
from pytest import approx, mark, raises

from cv_models.exceptions import StateFormatError
from cv_models.fock.states import FockDensity, FockVector, extremal_passive_state, haar_random_state
from uncertainty_lab.utils.state_io import load_pairs, load_state, save_state, state_from_dict, state_to_dict


def test_vector_round_trip(tmp_path):
    state = haar_random_state(3, 4, seed=5, hbar=2.0)
    loaded = load_state(save_state(state, tmp_path / "psi.json"))
    assert isinstance(loaded, FockVector)
    assert loaded.hbar == 2.0
    assert np.allclose(loaded.amplitudes, state.amplitudes, atol=1e-15)


def test_density_round_trip(tmp_path):
    state = extremal_passive_state(2, 3)
    loaded = load_state(save_state(state, tmp_path / "rho.json"))
    assert isinstance(loaded, FockDensity)
    assert np.allclose(loaded.matrix, state.matrix)


def test_real_amplitudes_are_normalized_and_padded():
    state = state_from_dict({"amplitudes": [1, 0, 1], "nmax": 6})
    assert state.nmax == 6
    assert state.hbar == 1.0
    assert abs(state.amplitudes[0]) == approx(1 / np.sqrt(2))


def test_layout_uses_re_im_pairs():
    document = state_to_dict(state_from_dict({"hbar": 1.0, "amplitudes": [[0, 1], [0, 0]]}))
    assert document["amplitudes"] == [[0.0, 1.0], [0.0, 0.0]]


@mark.parametrize(
    "document",
    [
        [],
        {"hbar": 1.0},
        {"amplitudes": []},
        {"amplitudes": [[1, 2, 3]]},
        {"amplitudes": ["one"]},
        {"matrix": [1, 0]},
    ],
)
def test_malformed_documents(document):
    with raises(StateFormatError):
        state_from_dict(document)


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with raises(StateFormatError):
        load_state(path)


def test_pairs_file(tmp_path):
    path = tmp_path / "pairs.json"
    pair = [{"amplitudes": [1, 0]}, {"amplitudes": [0, 1]}]
    path.write_text(json.dumps([pair, pair]))
    pairs = load_pairs(path)
    assert len(pairs) == 2
    assert np.allclose(pairs[0][1].amplitudes, [0, 1])


def test_pairs_file_needs_pairs(tmp_path):
    path = tmp_path / "pairs.json"
    path.write_text(json.dumps([[{"amplitudes": [1, 0]}]]))
    with raises(StateFormatError):
        load_pairs(path)
