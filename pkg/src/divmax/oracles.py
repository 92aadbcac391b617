"""Independent oracles and bundled golden models, for tests and acceptance runs."""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import _exact
from .divergence import h_r
from .model import kernel_basis, make_model, r_array
from .objective import decompose

_BUNDLED = (
    "binary_independence",
    "four_two",
    "two_three_three",
    "three_state_toy",
)


@dataclass(frozen=True)
class GoldenModel:
    model: object
    expected: dict


def bundled_models():
    """Models shipped in the data directory, keyed by name, with expected values."""
    out = {}
    for name in _BUNDLED:
        raw = resources.files(__package__).joinpath(f"data/{name}.json").read_text()
        data = json.loads(raw)
        out[name] = GoldenModel(model=make_model(data), expected=data.get("expected", {}))
    return out


def codim1_oracle(model):
    """Closed-form answer for a one-dimensional kernel.

    With kernel generator u = P+ - P-, oriented so the positive part has the
    smaller r-entropy, dbar_max = H_r(P-) - H_r(P+) and
    div_max = log(1 + exp(dbar_max)).  An entropy tie means both
    orientations maximize; all maximizing decompositions are returned.
    """
    basis = kernel_basis(model)
    if basis.dim != 1:
        raise ValueError(f"codim1_oracle needs a 1-dimensional kernel, got {basis.dim}")
    u = np.array(basis.vectors[0], dtype=float)
    point = decompose(model, u / (0.5 * np.abs(u).sum()))
    hp = h_r(model, point.p_plus)
    hm = h_r(model, point.p_minus)
    if hp > hm:
        point = decompose(model, -point.u)
        hp, hm = hm, hp
    dbar_max = hm - hp
    div_max = float(np.logaddexp(0.0, dbar_max))
    maximizers = [point]
    if abs(dbar_max) <= 1e-12:
        maximizers.append(decompose(model, -point.u))
    return dbar_max, div_max, maximizers


def grid_oracle(model, resolution):
    """Exhaustive grid lower bound for max dbar over {d_u <= 1}.

    Evaluates dbar1 on a lattice of kernel coefficients in [-1, 1]^dim
    (dbar is homogeneous, so the max over d_u <= 1 is a max over
    directions).  Nondecreasing in resolution whenever the grids nest,
    e.g. resolution -> 2*resolution - 1.
    """
    basis = kernel_basis(model)
    if basis.dim > 3:
        raise ValueError(f"grid_oracle guard: kernel dimension {basis.dim} > 3")
    if basis.dim == 0:
        return 0.0
    b = np.array(basis.vectors, dtype=float)
    log_r = np.log(r_array(model))
    axis = np.linspace(-1.0, 1.0, resolution)
    total = resolution**basis.dim
    chunk = max(1, 2**21 // model.n_states)
    best = -np.inf
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        lam = axis[np.stack(np.unravel_index(idx, (resolution,) * basis.dim), axis=1)]
        u = lam @ b
        deg = 0.5 * np.abs(u).sum(axis=1)
        ok = deg > 1e-12
        if not ok.any():
            continue
        u = u[ok]
        safe = np.where(u == 0.0, 1.0, np.abs(u))
        vals = (u * (np.log(safe) - log_r)).sum(axis=1) / deg[ok]
        best = max(best, float(vals.max()))
    return best


def random_codim_model(rng, n_states, codim, max_entry=3, name="random"):
    """Small random integer model with dim ker A == codim (rank checked exactly).

    The ones row is always included; draws are rejected until the rank is
    exactly n_states - codim.
    """
    if not 1 <= codim < n_states:
        raise ValueError("codim must be in [1, n_states)")
    target = n_states - codim
    while True:
        rows = [[1] * n_states]
        for _ in range(target - 1):
            rows.append([int(v) for v in rng.integers(-max_entry, max_entry + 1, n_states)])
        if _exact.rank(rows) != target:
            continue
        r = [int(v) for v in rng.integers(1, 5, n_states)]
        return make_model(
            {
                "name": name,
                "A": rows,
                "r": r,
                "states": [f"x{i}" for i in range(n_states)],
            }
        )
