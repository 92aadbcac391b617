"""Projection-point solver via the monomial parameterization of the sign-split family."""

import hashlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _exact
from .divergence import ConvergenceError, ri_project
from .model import a_array, r_array
from .objective import decompose
from .signvectors import as_sign_vector


class FacialRejectionError(ValueError):
    """The support of sigma is not a facial support set of the family closure."""


@dataclass(frozen=True)
class SigmaExtendedModel:
    sigma: object
    a_sigma: tuple
    restricted_states: tuple
    r_y: np.ndarray


@dataclass(frozen=True)
class ProjectionRoot:
    point: object
    alpha: tuple
    mu: float


def build_sigma_model(model, sigma):
    """Extended matrix with the sign-split row and the restricted reference measure.

    Row 0 stores 1 - sigma_x (0 on the positive part, 2 on the negative);
    the magnitude parameter enters with exponent row0/2 while the sign of
    u is carried explicitly by sigma. For partial supports the reference
    is the projection of the uniform distribution on supp(sigma), and the
    support must come out facial.
    """
    sigma = as_sign_vector(sigma)
    y = sigma.support
    if not y:
        raise ValueError("zero sign vector has no extended model")
    if len(y) == model.n_states:
        r_y = r_array(model).copy()
    else:
        uniform = np.zeros(model.n_states)
        uniform[list(y)] = 1.0 / len(y)
        proj = ri_project(model, uniform)
        if proj.support != y:
            raise FacialRejectionError(
                f"support of {sigma} is not facial (projection support {proj.support})"
            )
        r_y = proj.p_e[list(y)]
    a_sigma = [tuple(1 - sigma.sigma[x] for x in y)]
    for row in model.A:
        a_sigma.append(tuple(row[x] for x in y))
    return SigmaExtendedModel(
        sigma=sigma, a_sigma=tuple(a_sigma), restricted_states=y, r_y=np.asarray(r_y, dtype=float)
    )


def monomial_param(sm, alpha):
    """Evaluate u on the restricted states for parameters (alpha_0, ..., alpha_h).

    u(x) = sigma_x * r_y(x) * |alpha_0|^(row0(x)/2) * prod_i alpha_i^(A_ix),
    requiring alpha_0 < 0 and alpha_i > 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha[0] >= 0 or np.any(alpha[1:] <= 0):
        raise ValueError("alpha_0 must be negative and the remaining parameters positive")
    sigma_y = np.array([sm.sigma.sigma[x] for x in sm.restricted_states], dtype=float)
    exps = np.array(sm.a_sigma, dtype=float)
    exps[0] /= 2.0
    logs = np.log(np.abs(alpha)) @ exps
    return sigma_y * sm.r_y * np.exp(logs)


def canonical_alpha(model, sigma, u, sm=None):
    """Minimal-norm parameters reproducing a root: least-squares in log space.

    Solves exps^T t = log(|u|/r_y) for t = (log(-alpha_0), log alpha_i).
    """
    sigma = as_sign_vector(sigma)
    if sm is None:
        sm = build_sigma_model(model, sigma)
    u = np.asarray(u, dtype=float)
    y = list(sm.restricted_states)
    target = np.log(np.abs(u[y])) - np.log(sm.r_y)
    exps = np.array(sm.a_sigma, dtype=float)
    exps[0] /= 2.0
    t, *_ = np.linalg.lstsq(exps.T, target, rcond=None)
    alpha = np.exp(t)
    alpha[0] = -alpha[0]
    return tuple(float(a) for a in alpha)


def _projection_seed(sigma, seed):
    digest = hashlib.sha256(f"projection:{seed}:{sigma}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def solve_projection_points(model, sigma, starts=32, tol=1e-10, seed=0, counters=None):
    """Multi-start Newton in log-parameters on the moment equations A u(alpha) = 0.

    The scale gauge is pinned by appending the normalization
    sum_{sigma+} u = 1, and steps are least-squares solves so redundant
    moment equations are harmless. Verified roots are returned with
    canonical parameters and the mixture weight.
    """
    sigma = as_sign_vector(sigma)
    sm = build_sigma_model(model, sigma)
    y = list(sm.restricted_states)
    sigma_y = np.array([sigma.sigma[x] for x in y], dtype=float)
    plus_mask = sigma_y > 0
    a_y = a_array(model)[:, y]
    exps = np.array(sm.a_sigma, dtype=float)
    exps[0] /= 2.0
    log_r = np.log(sm.r_y)
    n_par = exps.shape[0]

    def u_of(t):
        return sigma_y * np.exp(log_r + t @ exps)

    def f_of(u):
        return np.concatenate([a_y @ u, [u[plus_mask].sum() - 1.0]])

    rng = np.random.default_rng(_projection_seed(sigma, seed))
    roots = []
    for k in range(starts):
        t = np.zeros(n_par) if k == 0 else rng.normal(0.0, 1.0, n_par)
        u = u_of(t)
        fv = f_of(u)
        norm = np.abs(fv).max()
        converged = norm <= tol
        for _ in range(120):
            if converged:
                break
            du_dt = u[None, :] * exps
            jac = np.vstack([a_y @ du_dt.T, du_dt[:, plus_mask].sum(axis=1)])
            step, *_ = np.linalg.lstsq(jac, -fv, rcond=None)
            scale = np.abs(step).max()
            if scale > 20.0:
                step *= 20.0 / scale
            accepted = False
            damp = 1.0
            while damp >= 2.0**-25:
                t_new = t + damp * step
                u_new = u_of(t_new)
                f_new = f_of(u_new)
                n_new = np.abs(f_new).max()
                if n_new < norm:
                    t, u, fv, norm = t_new, u_new, f_new, n_new
                    accepted = True
                    break
                damp /= 2.0
            if not accepted:
                break
            converged = norm <= tol
        if not converged:
            if counters is not None:
                counters["nonconverged_starts"] = counters.get("nonconverged_starts", 0) + 1
            continue
        full = np.zeros(model.n_states)
        full[y] = u
        full /= 0.5 * np.abs(full).sum()
        if any(np.abs(full - r.point.u).max() <= 1e-6 for r in roots):
            continue
        try:
            report = verify_projection_property(model, np.clip(full, 0.0, None))
            deviation = report["deviation"]
        except ConvergenceError:
            deviation = float("inf")
        if deviation > 1e-7:
            if counters is not None:
                counters["unverified_roots"] = counters.get("unverified_roots", 0) + 1
            continue
        point = decompose(model, full)
        alpha = canonical_alpha(model, sigma, full, sm=sm)
        mu_val = -alpha[0] / (1.0 - alpha[0])
        roots.append(ProjectionRoot(point=point, alpha=alpha, mu=float(mu_val)))
    roots.sort(key=lambda r: tuple(r.point.u))
    return roots


def verify_projection_property(model, p, tol=1e-8):
    """Does p equal its projection conditioned on supp(p)?

    Returns the projection, the max deviation on the support, and a flag.
    """
    p = np.asarray(p, dtype=float)
    proj = ri_project(model, p)
    support = p > 1e-12
    mass = proj.p_e[support].sum()
    if mass <= 0:
        return {"ok": False, "deviation": float("inf"), "projection": proj}
    deviation = float(np.abs(p[support] - proj.p_e[support] / mass).max())
    return {"ok": deviation <= tol, "deviation": deviation, "projection": proj}


def verify_parallel_hyperplanes(model, p_e, ztol=1e-12):
    """Exact separation test for the zero set of a projection candidate.

    True when some rational theta gives theta . A_x = c1 on the support
    and = c2 off it with c1 != c2 (vacuous for full support).
    """
    p_e = np.asarray(p_e, dtype=float)
    inside = [x for x in range(model.n_states) if p_e[x] > ztol]
    outside = [x for x in range(model.n_states) if p_e[x] <= ztol]
    if not outside:
        return True
    cols = [[Fraction(model.A[i][x]) for i in range(model.h)] for x in range(model.n_states)]
    rows = []
    for group in (inside, outside):
        first = group[0]
        for x in group[1:]:
            rows.append([a - b for a, b in zip(cols[x], cols[first])])
    sep = [a - b for a, b in zip(cols[inside[0]], cols[outside[0]])]
    base_rank = _exact.rank(rows) if rows else 0
    return _exact.rank(rows + [sep]) > base_rank
