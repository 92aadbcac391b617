"""Per-orthant solves, quasi-criticality checks, and the global search."""

import math

import numpy as np
import pytest

from divmax import (
    SearchOptions,
    SignVector,
    build_candidate,
    build_orthant_problem,
    global_search,
    gradient_check,
    kernel_basis,
    restricted_kernel_basis,
    solve_orthant,
    verify_quasi_critical,
)

FOUR_TWO_SIGMA = "-++-+---+------+"
FOUR_TWO_U = np.array(
    [-5, 3, 3, -1, 3, -1, -1, -1, 3, -1, -1, -1, -1, -1, -1, 3], dtype=float
) / 15.0
TTT_SIGMA = "".join("+" if x in (5, 7, 9) else "-" for x in range(18))


def test_restricted_kernel_basis(golden):
    model = golden["four_two"].model
    full = restricted_kernel_basis(model, tuple(range(16)))
    assert len(full) == kernel_basis(model).dim
    sub = restricted_kernel_basis(model, SignVector.from_string(FOUR_TWO_SIGMA).support)
    a = np.array(model.A, dtype=int)
    for w in sub:
        assert not np.any(a @ np.array(w, dtype=int))
    none = restricted_kernel_basis(model, (0, 1, 2))
    assert none == ()


def test_solve_orthant_recovers_four_two_maximizer(golden):
    model = golden["four_two"].model
    basis = kernel_basis(model)
    prob = build_orthant_problem(model, basis, FOUR_TWO_SIGMA)
    roots = solve_orthant(model, prob, starts=16, seed=0)
    assert roots
    best = max(roots, key=lambda r: abs(r.dbar_value))
    u = best.point.u
    if u[0] > 0:
        u = -u
    assert np.abs(u - FOUR_TWO_U).max() < 1e-9
    assert abs(abs(best.dbar_value) - (math.log(3) - math.log(5) / 3)) < 1e-12


def test_solve_orthant_recovers_two_three_three_maximizer(golden):
    model = golden["two_three_three"].model
    basis = kernel_basis(model)
    prob = build_orthant_problem(model, basis, TTT_SIGMA)
    roots = solve_orthant(model, prob, starts=16, seed=0)
    assert roots
    best = max(roots, key=lambda r: abs(r.dbar_value))
    a = 1 - math.sqrt(2) / 2
    b = math.sqrt(2) - 1
    expected = np.zeros(18)
    expected[[5, 7]] = a
    expected[9] = b
    pt = best.point if best.dbar_value > 0 else None
    assert pt is not None
    assert np.abs(pt.p_plus - expected).max() < 1e-9
    assert abs(best.dbar_value - math.log(2 + 2 * math.sqrt(2))) < 1e-12


def test_verify_quasi_critical_on_maximizer(golden):
    model = golden["four_two"].model
    basis = kernel_basis(model)
    report = verify_quasi_critical(model, basis, FOUR_TWO_U)
    assert report["var0"] and report["var1"]
    assert report["var0_residual"] == 0.0
    assert report["var1_residual"] < 1e-12
    assert report["sigma"] == FOUR_TWO_SIGMA
    # a perturbed point in the same orthant is no longer quasi-critical
    w = np.array(
        restricted_kernel_basis(model, SignVector.from_string(FOUR_TWO_SIGMA).support)[0],
        dtype=float,
    )
    report = verify_quasi_critical(model, basis, FOUR_TWO_U + 0.05 * w)
    assert report["var0"]
    assert not report["var1"]


def _interior_lams(model, prob, rng, count, floor=8e-3):
    """Draw lam vectors whose point keeps a safe distance from the walls."""
    rb = np.array(restricted_kernel_basis(model, prob.sigma.support), dtype=float)
    rb /= np.abs(rb).max(axis=1, keepdims=True)
    active = np.array(prob.sigma.support, dtype=int)
    sigma_arr = np.array(prob.sigma.sigma, dtype=float)
    out = []
    while len(out) < count:
        lam = rng.normal(scale=0.015, size=rb.shape[0])
        u = prob.u0 + lam @ rb
        if np.min(sigma_arr[active] * u[active]) >= floor:
            out.append(lam)
    return out


def test_gradient_check_interior(golden):
    model = golden["four_two"].model
    basis = kernel_basis(model)
    prob = build_orthant_problem(model, basis, FOUR_TWO_SIGMA)
    rng = np.random.default_rng(0)
    for lam in _interior_lams(model, prob, rng, 50):
        assert gradient_check(model, prob, lam) < 1e-6


def test_gradient_check_rejects_boundary(golden):
    model = golden["four_two"].model
    basis = kernel_basis(model)
    prob = build_orthant_problem(model, basis, FOUR_TWO_SIGMA)
    k = len(restricted_kernel_basis(model, prob.sigma.support))
    with pytest.raises(ValueError):
        gradient_check(model, prob, np.full(k, 10.0))


def test_build_candidate_cross_checks(golden):
    model = golden["four_two"].model
    basis = kernel_basis(model)
    cand, _ = build_candidate(model, basis, FOUR_TWO_U)
    assert cand.sigma == FOUR_TWO_SIGMA
    assert cand.verified["var0"] and cand.verified["var1"]
    assert cand.verified["phat_is_projection"]
    assert cand.divergence_pair == pytest.approx(cand.divergence_projected, abs=1e-8)
    assert cand.mu == pytest.approx(1 / (1 + 3 * 5 ** (-1 / 3)), abs=1e-9)


def test_global_search_binary_independence(golden):
    model = golden["binary_independence"].model
    stats = {}
    cands = global_search(model, SearchOptions(starts=8), stats)
    assert stats["sign_vector_classes"] == 1
    assert len(cands) == 2
    for c in cands:
        assert c.dbar == pytest.approx(0.0, abs=1e-12)
        assert c.divergence_pair == pytest.approx(math.log(2), abs=1e-12)
    halves = {tuple(np.round(c.p_plus, 9)) for c in cands}
    assert halves == {(0.5, 0.0, 0.0, 0.5), (0.0, 0.5, 0.5, 0.0)}


def test_global_search_toy(golden):
    model = golden["three_state_toy"].model
    cands = global_search(model, SearchOptions(starts=8))
    assert [c.divergence_pair for c in cands] == pytest.approx(
        [math.log(3), math.log(3) - math.log(2)], abs=1e-12
    )
    assert cands[0].dbar == pytest.approx(math.log(2), abs=1e-12)
    assert tuple(cands[0].p_plus) == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)


def test_global_search_stats_pipeline(golden):
    model = golden["binary_independence"].model
    stats = {}
    global_search(model, SearchOptions(starts=4), stats)
    assert stats["circuits"] == 1
    assert stats["post_var0"] == stats["post_bound"] == 1
    assert stats["orthants_solved"] == 1
    assert "timing" in stats
