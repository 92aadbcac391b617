"""Model loading, validation, and structural queries."""

import json
from fractions import Fraction

import numpy as np
import pytest

from divmax import (
    InvalidModelError,
    StructuralError,
    dim_family,
    facial_support,
    kernel_basis,
    load_model,
    make_model,
    moment_map,
    symmetry_group,
)

MINIMAL = {
    "name": "toy",
    "states": ["a", "b", "c"],
    "A": [[1, 1, 1], [1, 0, 0]],
    "r": [1, 1, 2],
}


def test_make_model_minimal():
    m = make_model(MINIMAL)
    assert m.n_states == 3
    assert m.r == (Fraction(1), Fraction(1), Fraction(2))
    assert m.A == ((1, 1, 1), (1, 0, 0))
    assert m.symmetry_generators == ()


@pytest.mark.parametrize(
    "patch",
    [
        {"states": []},
        {"A": [[1, 1]]},
        {"A": [[1, 1, 0.5]]},
        {"A": []},
        {"r": [1, 1]},
        {"r": [1, 0, 1]},
        {"r": [1, -1, 1]},
        {"r": [1, "x", 1]},
        {"symmetry_generators": [[0, 0, 1]]},
    ],
)
def test_make_model_rejects(patch):
    data = dict(MINIMAL, **patch)
    with pytest.raises(InvalidModelError):
        make_model(data)


def test_make_model_requires_ones_row():
    data = dict(MINIMAL, A=[[1, 0, 0], [0, 1, 0]])
    with pytest.raises(StructuralError):
        make_model(data)


def test_load_model_round_trip(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(MINIMAL))
    m = load_model(path)
    assert m.name == "toy"
    with pytest.raises(InvalidModelError):
        load_model(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidModelError):
        load_model(bad)


def test_bundled_dimensions(golden):
    expect = {
        "binary_independence": (3, 1, 2),
        "four_two": (11, 5, 10),
        "two_three_three": (6, 12, 5),
        "three_state_toy": (2, 1, 1),
    }
    for name, (rank_a, dim_ker, dim_e) in expect.items():
        model = golden[name].model
        basis = kernel_basis(model)
        assert basis.rank_a == rank_a
        assert basis.dim == dim_ker
        assert dim_family(model) == dim_e
        a = np.array(model.A, dtype=int)
        for vec in basis.vectors:
            assert not np.any(a @ np.array(vec, dtype=int))


def test_symmetry_group_orders(golden):
    orders = {
        "binary_independence": 8,
        "four_two": 384,
        "two_three_three": 144,
        "three_state_toy": 1,
    }
    for name, order in orders.items():
        group = symmetry_group(golden[name].model)
        assert len(group) == order
        n = golden[name].model.n_states
        assert tuple(range(n)) in group
        # closed under composition
        a = np.array(golden[name].model.A, dtype=int)
        rank = np.linalg.matrix_rank(a)
        for g in group[:8]:
            stacked = np.vstack([a, a[:, list(g)]])
            assert np.linalg.matrix_rank(stacked) == rank


def test_moment_map_uniform(golden):
    model = golden["binary_independence"].model
    p = np.full(4, 0.25)
    b = moment_map(model, p)
    assert np.allclose(b, [0.5, 0.5, 0.5, 0.5])


def test_facial_support_interior_and_face():
    model = make_model(MINIMAL)
    # interior moment: everything can carry mass
    assert facial_support(model, [Fraction(1), Fraction(1, 2)]) == (0, 1, 2)
    # moment pinned to state a
    assert facial_support(model, [Fraction(1), Fraction(1)]) == (0,)
    # the a-mass 0 face keeps b and c
    assert facial_support(model, [Fraction(1), Fraction(0)]) == (1, 2)
    with pytest.raises(ValueError):
        facial_support(model, [Fraction(1), Fraction(2)])
