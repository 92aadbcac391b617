"""Per-orthant solution of the first-order conditions for dbar, and the search pipeline."""

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import _exact
from .divergence import ConvergenceError, kl, ri_project
from .model import dim_family, kernel_basis, r_array
from .objective import decompose, dbar, dbar1, divergence_via_pair, optimal_mixture
from .signvectors import (
    CapExceeded,
    as_sign_vector,
    circuits,
    enumerate_sign_vectors,
    filter_support_bound,
    filter_var0,
    is_sign_vector,
)


class FlatOrthantError(ValueError):
    """The restricted kernel has no full-degree direction."""


@dataclass(frozen=True)
class OrthantProblem:
    sigma: object
    u0: np.ndarray
    k_basis: tuple


@dataclass(frozen=True)
class QuasiCriticalPoint:
    point: object
    residual: float
    dbar_value: float


@dataclass(frozen=True)
class CandidateReport:
    sigma: str
    u: np.ndarray
    dbar: float
    divergence_pair: float
    divergence_projected: object
    mu: float
    p_plus: np.ndarray
    p_minus: np.ndarray
    p_e: object
    verified: dict
    residuals: dict
    alpha: object = None


@dataclass(frozen=True)
class SearchOptions:
    method: str = "auto"
    starts: int = 32
    tol: float = 1e-10
    seed: int = 0
    threads: int = 1
    max_signvectors: int = 20000
    filters: tuple = ("var0", "bound")
    mode: str = "closure"


def restricted_kernel_basis(model, support):
    """Integer basis of {v in ker A : supp(v) within support}, embedded full-length."""
    rows = [[row[x] for x in support] for row in model.A]
    small = _exact.integer_kernel_basis(rows)
    out = []
    for vec in small:
        full = [0] * model.n_states
        for x, v in zip(support, vec):
            full[x] = v
        out.append(tuple(full))
    return tuple(out)


def _degree_sigma(sigma, vec):
    return sum(vec[x] for x in sigma.plus)


def build_orthant_problem(model, basis, sigma):
    """Set up the orthant slice: witness point u0 and an integer basis of K^sigma.

    K^sigma drops the degree direction from the restricted kernel via the
    integer combination v_i = (d(u_k)/g) u_i - (d(u_i)/g) u_k, g = gcd.
    """
    sigma = as_sign_vector(sigma)
    ok, witness = is_sign_vector(model, sigma)
    if not ok:
        raise ValueError(f"{sigma} is not realizable in ker A")
    restricted = restricted_kernel_basis(model, sigma.support)
    degrees = [_degree_sigma(sigma, v) for v in restricted]
    full_idx = [i for i, d in enumerate(degrees) if d != 0]
    if not full_idx:
        raise FlatOrthantError(f"{sigma} admits no full-degree direction")
    k = full_idx[-1]
    dk = degrees[k]
    k_basis = []
    for i, (vec, di) in enumerate(zip(restricted, degrees)):
        if i == k:
            continue
        g = gcd(abs(dk), abs(di)) if di else abs(dk)
        comb = tuple(
            (dk // g) * vi - (di // g) * wi for vi, wi in zip(vec, restricted[k])
        )
        content = 0
        for v in comb:
            content = gcd(content, abs(v))
        if content > 1:
            comb = tuple(v // content for v in comb)
        k_basis.append(comb)
    u0 = np.array(witness, dtype=float)
    u0 /= 0.5 * np.abs(u0).sum()
    return OrthantProblem(sigma=sigma, u0=u0, k_basis=tuple(k_basis))


def _orthant_seed(sigma, seed, tag=""):
    digest = hashlib.sha256(f"{tag}:{seed}:{sigma}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _clip_factor(u, du, active, sigma_arr):
    shrink = sigma_arr[active] * du[active] < 0
    if not shrink.any():
        return 1.0
    idx = active[shrink]
    return float(np.min(-u[idx] / du[idx]))


def solve_orthant(model, prob, starts=32, tol=1e-10, seed=0, counters=None):
    """Multi-start damped Newton for the critical equations inside one orthant.

    F_i(lambda) = sum_x v_i(x) log(|u(x)|/r(x)) on u = u0 + sum lambda_j v_j,
    with steps clipped to keep sgn(u) fixed; converged roots are rescaled
    to degree 1 (which leaves F unchanged) and deduplicated.
    """
    sigma = prob.sigma
    active = np.array(sigma.support, dtype=int)
    sigma_arr = np.array(sigma.sigma, dtype=float)
    log_r = np.log(r_array(model))
    m = len(prob.k_basis)
    if m == 0:
        u = prob.u0.copy()
        return [
            QuasiCriticalPoint(
                point=decompose(model, u), residual=0.0, dbar_value=dbar(model, u)
            )
        ]
    v = np.array(prob.k_basis, dtype=float)
    v_act = v[:, active]

    def f_of(u):
        return v_act @ (np.log(np.abs(u[active])) - log_r[active])

    rng = np.random.default_rng(_orthant_seed(sigma, seed, "orthant"))
    n_plus, n_minus = len(sigma.plus), len(sigma.minus)
    roots = []

    def start_point(k):
        if k == 0:
            return np.zeros(m)
        w = np.zeros(model.n_states)
        w[list(sigma.plus)] = rng.dirichlet(np.ones(n_plus))
        w[list(sigma.minus)] = -rng.dirichlet(np.ones(n_minus))
        lam = np.linalg.lstsq(v.T, w - prob.u0, rcond=None)[0]
        du = lam @ v
        t = min(1.0, 0.9 * _clip_factor(prob.u0, du, active, sigma_arr))
        return t * lam

    for k in range(starts):
        lam = start_point(k)
        u = prob.u0 + lam @ v
        fv = f_of(u)
        norm = np.abs(fv).max()
        converged = norm <= tol
        for _ in range(80):
            if converged:
                break
            jac = (v_act / u[active]) @ v_act.T
            try:
                step = np.linalg.solve(jac, -fv)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(jac, -fv, rcond=None)[0]
            du = step @ v
            t = min(1.0, 0.9 * _clip_factor(u, du, active, sigma_arr))
            accepted = False
            while t >= 2.0**-25:
                u_new = u + t * du
                f_new = f_of(u_new)
                n_new = np.abs(f_new).max()
                if n_new < norm:
                    u, fv, norm = u_new, f_new, n_new
                    accepted = True
                    break
                t /= 2.0
            if not accepted:
                break
            converged = norm <= tol
        if not converged:
            if counters is not None:
                counters["nonconverged_starts"] = counters.get("nonconverged_starts", 0) + 1
            continue
        u = u / (0.5 * np.abs(u).sum())
        if np.min(sigma_arr[active] * u[active]) < 1e-8:
            if counters is not None:
                counters["boundary_rejected"] = counters.get("boundary_rejected", 0) + 1
            continue
        if any(np.abs(u - r.point.u).max() <= 1e-6 for r in roots):
            continue
        roots.append(
            QuasiCriticalPoint(
                point=decompose(model, u),
                residual=float(np.abs(f_of(u)).max()),
                dbar_value=dbar(model, u),
            )
        )
    roots.sort(key=lambda r: (-r.dbar_value, tuple(r.point.u)))
    return roots


def verify_quasi_critical(model, basis, u, tol=1e-8):
    """Check the zero-set condition exactly and the on-support condition numerically.

    The on-support residual is evaluated on a basis of the kernel restricted
    to supp(u): for each basis vector w the identity
    sum_x w(x) log(|u(x)|/r(x)) = d^sigma(w) * dbar(u) must hold at degree 1.
    """
    u = np.asarray(u, dtype=float)
    degree = 0.5 * np.abs(u).sum()
    if degree == 0:
        raise ValueError("zero vector cannot be verified")
    u = u / degree
    ztol = 1e-12
    zero = [x for x in range(model.n_states) if abs(u[x]) <= ztol]
    support = [x for x in range(model.n_states) if abs(u[x]) > ztol]
    sums = [sum(vec[x] for x in zero) for vec in basis.vectors]
    var0_residual = float(max((abs(s) for s in sums), default=0))
    log_r = np.log(r_array(model))
    value = dbar(model, u)
    var1_residual = 0.0
    for w in restricted_kernel_basis(model, tuple(support)):
        w_arr = np.array(w, dtype=float)
        lhs = float(
            np.sum(w_arr[support] * (np.log(np.abs(u[support])) - log_r[support]))
        )
        dsig = float(sum(w[x] for x in support if u[x] > 0))
        var1_residual = max(var1_residual, abs(lhs - dsig * value))
    sigma = as_sign_vector(tuple(int(np.sign(u[x])) if abs(u[x]) > ztol else 0
                                 for x in range(model.n_states)))
    return {
        "sigma": str(sigma),
        "dbar": value,
        "var0": var0_residual == 0.0,
        "var0_residual": var0_residual,
        "var1": var1_residual <= tol,
        "var1_residual": var1_residual,
    }


def gradient_check(model, prob, lam, h=1e-5):
    """Max mismatch between analytic and central-difference directional derivatives.

    The point is u0 + lam @ B where B is the restricted kernel basis of the
    orthant's support, scaled to unit max-norm per row; the same rows serve
    as directions, so both terms of the analytic derivative of dbar1 along a
    kernel vector v at interior u,
    (sum_x v log(|u|/r)) / d_u - dbar(u) d^sigma(v) / d_u^2,
    are exercised (full-degree directions change d_u).
    """
    lam = np.asarray(lam, dtype=float)
    rb = restricted_kernel_basis(model, prob.sigma.support)
    if len(rb) == 0:
        return 0.0
    v = np.array(rb, dtype=float)
    v /= np.abs(v).max(axis=1, keepdims=True)
    u = prob.u0 + lam @ v
    active = np.array(prob.sigma.support, dtype=int)
    sigma_arr = np.array(prob.sigma.sigma, dtype=float)
    margin = np.min(sigma_arr[active] * u[active])
    if margin <= 10.0 * h:
        raise ValueError("point too close to the orthant boundary for this step")
    log_r = np.log(r_array(model))
    degree = 0.5 * np.abs(u).sum()
    value = dbar(model, u)
    worst = 0.0
    for vec in v:
        s = float(np.sum(vec[active] * (np.log(np.abs(u[active])) - log_r[active])))
        dsig = float(vec[u > 0].sum())
        analytic = s / degree - value * dsig / degree**2
        fd = (dbar1(model, u + h * vec) - dbar1(model, u - h * vec)) / (2.0 * h)
        worst = max(worst, abs(analytic - fd))
    return worst


def _merge_counters(total, part):
    for key, val in part.items():
        total[key] = total.get(key, 0) + val


def build_candidate(model, basis, u, alpha=None, proj=None, tol=1e-8):
    """Assemble the report entry for one oriented root."""
    point = decompose(model, u)
    check = verify_quasi_critical(model, basis, u, tol=tol)
    mix = optimal_mixture(model, point)
    entry = {
        "sigma": check["sigma"],
        "u": point.u,
        "dbar": dbar(model, point.u),
        "divergence_pair": divergence_via_pair(model, point),
        "mu": mix.mu,
        "p_plus": point.p_plus,
        "p_minus": point.p_minus,
        "alpha": alpha,
    }
    if proj is None:
        try:
            proj = ri_project(model, point.p_plus)
        except ConvergenceError:
            proj = None
    if proj is None:
        entry.update(
            divergence_projected=None,
            p_e=None,
            verified={"var0": check["var0"], "var1": check["var1"], "phat_is_projection": False},
            residuals={
                "var0": check["var0_residual"],
                "var1": check["var1_residual"],
                "phat": None,
                "projection_moment": None,
            },
        )
        return CandidateReport(**entry), proj
    # p_e is shared by both orientations (equal moments); the divergence is not.
    phat_residual = float(np.abs(mix.p_hat - proj.p_e).max())
    entry.update(
        divergence_projected=kl(point.p_plus, proj.p_e),
        p_e=proj.p_e,
        verified={
            "var0": check["var0"],
            "var1": check["var1"],
            "phat_is_projection": phat_residual <= 1e-8,
        },
        residuals={
            "var0": check["var0_residual"],
            "var1": check["var1_residual"],
            "phat": phat_residual,
            "projection_moment": proj.residual,
        },
    )
    return CandidateReport(**entry), proj


def global_search(model, options=None, stats=None):
    """Full pipeline: circuits, enumeration, filters, per-orthant solve, ranking.

    Both orientations of every root are reported (dbar is antisymmetric,
    so ties at the top mean several global maximizer candidates); the list
    is sorted by dbar descending with a lexicographic tie-break.
    """
    from .projection import FacialRejectionError, canonical_alpha, solve_projection_points

    if options is None:
        options = SearchOptions()
    if stats is None:
        stats = {}
    timing = stats.setdefault("timing", {})
    tick = time.perf_counter()
    basis = kernel_basis(model)
    stats["dim_kernel"] = basis.dim
    if basis.dim == 0:
        stats.update(circuits=0, sign_vector_classes=0, post_var0=0, post_bound=0,
                     orthants_solved=0, roots_found=0)
        return []
    circs = circuits(model, basis)
    stats["circuits"] = len(circs)
    timing["circuits"] = time.perf_counter() - tick
    tick = time.perf_counter()
    try:
        classes = enumerate_sign_vectors(
            model, circs, mode=options.mode, cap=options.max_signvectors
        )
    except CapExceeded as exc:
        stats["sign_vector_classes"] = exc.count
        timing["enumeration"] = time.perf_counter() - tick
        raise
    stats["sign_vector_classes"] = len(classes)
    timing["enumeration"] = time.perf_counter() - tick
    tick = time.perf_counter()
    if "var0" in options.filters:
        classes = [s for s in classes if filter_var0(model, basis, s)]
    stats["post_var0"] = len(classes)
    if "bound" in options.filters:
        classes = [s for s in classes if filter_support_bound(model, s)]
    stats["post_bound"] = len(classes)
    timing["filters"] = time.perf_counter() - tick
    tick = time.perf_counter()
    method = options.method
    if method == "auto":
        method = "orthant" if basis.dim <= dim_family(model) else "projection"
    stats["method"] = method

    def solve_class(sigma):
        counters = {}
        candidates = []
        try:
            if method == "orthant":
                prob = build_orthant_problem(model, basis, sigma)
                roots = solve_orthant(
                    model, prob, starts=options.starts, tol=options.tol,
                    seed=options.seed, counters=counters,
                )
                oriented = [(r.point.u, None) for r in roots]
            else:
                roots = solve_projection_points(
                    model, sigma, starts=options.starts, tol=options.tol,
                    seed=options.seed, counters=counters,
                )
                oriented = [(r.point.u, r.alpha) for r in roots]
        except FacialRejectionError:
            counters["skipped_nonfacial"] = 1
            return [], counters
        except FlatOrthantError:
            counters["flat_orthants"] = 1
            return [], counters
        counters["roots_found"] = len(oriented)
        for u, alpha in oriented:
            cand, proj = build_candidate(model, basis, u, alpha=alpha)
            candidates.append(cand)
            alpha_neg = None
            if alpha is not None:
                try:
                    alpha_neg = canonical_alpha(model, as_sign_vector(cand.sigma).negate(), -u)
                except (ValueError, FacialRejectionError):
                    alpha_neg = None
            neg, _ = build_candidate(model, basis, -u, alpha=alpha_neg, proj=proj)
            candidates.append(neg)
            if proj is None:
                counters["projection_errors"] = counters.get("projection_errors", 0) + 1
        return candidates, counters

    all_candidates = []
    totals = {}
    if options.threads > 1 and len(classes) > 1:
        with ThreadPoolExecutor(max_workers=options.threads) as pool:
            results = list(pool.map(solve_class, classes))
    else:
        results = [solve_class(s) for s in classes]
    for cands, counters in results:
        all_candidates.extend(cands)
        _merge_counters(totals, counters)
    stats["orthants_solved"] = len(classes)
    stats["roots_found"] = totals.pop("roots_found", 0)
    for key in ("nonconverged_starts", "boundary_rejected", "skipped_nonfacial",
                "flat_orthants", "projection_errors"):
        stats[key] = totals.pop(key, 0)
    timing["solve"] = time.perf_counter() - tick
    all_candidates.sort(key=lambda c: (-c.dbar, c.sigma, tuple(c.u)))
    return all_candidates
