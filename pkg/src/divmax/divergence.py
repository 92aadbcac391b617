"""Divergence, negative relative entropy, and the rI-projection."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import a_array, facial_support, r_array


class ConvergenceError(RuntimeError):
    """A Newton solve did not reach the requested residual."""


@dataclass(frozen=True)
class ProjectionResult:
    p_e: np.ndarray
    support: tuple
    theta: np.ndarray
    divergence: float
    iterations: int
    residual: float


_NEG_TOL = 1e-12


def h_r(model, q):
    """Negative relative entropy -sum q log(q/r), with 0 log 0 = 0."""
    q = np.asarray(q, dtype=float)
    if q.shape != (model.n_states,):
        raise ValueError(f"expected a vector of length {model.n_states}")
    if np.any(q < -_NEG_TOL):
        raise ValueError("negative entry in measure")
    r = r_array(model)
    mask = q > 0
    return float(-np.sum(q[mask] * (np.log(q[mask]) - np.log(r[mask]))))


def kl(p, q):
    """Kullback-Leibler divergence sum p log(p/q); +inf off-support."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def family_member(model, theta):
    """The distribution of the family with dual parameters theta."""
    theta = np.asarray(theta, dtype=float)
    logits = np.log(r_array(model)) + a_array(model).T @ theta
    logits -= logits.max()
    q = np.exp(logits)
    return q / q.sum()


def _exact_moments(model, p):
    """A.p with the float entries of p treated as exact rationals."""
    p_ex = [Fraction(float(v)) for v in p]
    return [sum(a * pv for a, pv in zip(row, p_ex)) for row in model.A]


def ri_project(model, p, tol=1e-12, max_iter=500):
    """rI-projection of p: the moment-matching maximizer of H_r on the fiber.

    Detects the facial support of the moment vector first, then runs a
    damped Newton iteration on the dual parameters of the restricted
    family, stopping on the moment residual.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (model.n_states,):
        raise ValueError(f"expected a vector of length {model.n_states}")
    if np.any(p < -_NEG_TOL) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("input is not a probability vector")
    p = np.clip(p, 0.0, None)
    a = a_array(model)
    r = r_array(model)
    b = a @ p
    if p.min() > 0:
        support = tuple(range(model.n_states))
    else:
        support = facial_support(model, _exact_moments(model, p))
    y = np.array(support, dtype=int)
    a_y = a[:, y]
    log_r_y = np.log(r[y])
    theta = np.zeros(model.h)

    def dist(th):
        logits = log_r_y + a_y.T @ th
        m = logits.max()
        w = np.exp(logits - m)
        z = w.sum()
        return w / z, np.log(z) + m

    q_y, log_z = dist(theta)
    psi = log_z - theta @ b
    it = 0
    while True:
        grad = a_y @ q_y - b
        res = np.abs(grad).max()
        if res <= tol:
            break
        if it >= max_iter:
            raise ConvergenceError(
                f"projection stalled at residual {res:.3e} after {it} iterations"
            )
        cov = (a_y * q_y) @ a_y.T - np.outer(a_y @ q_y, a_y @ q_y)
        step = np.linalg.lstsq(cov, -grad, rcond=None)[0]
        if res <= 1e-6:
            # local regime: the Armijo test stalls on roundoff once psi
            # decrements fall below machine precision, so take the plain
            # Newton step as long as the residual keeps shrinking
            cand = theta + step
            q_cand, log_z_cand = dist(cand)
            if np.abs(a_y @ q_cand - b).max() < res:
                theta, q_y = cand, q_cand
                psi = log_z_cand - cand @ b
                it += 1
                continue
        t = 1.0
        while t >= 2.0**-30:
            cand = theta + t * step
            q_cand, log_z_cand = dist(cand)
            psi_cand = log_z_cand - cand @ b
            if psi_cand <= psi + 1e-4 * t * (grad @ step):
                theta, q_y, psi = cand, q_cand, psi_cand
                break
            t /= 2.0
        else:
            raise ConvergenceError("projection line search failed")
        it += 1

    p_e = np.zeros(model.n_states)
    p_e[y] = q_y
    return ProjectionResult(
        p_e=p_e,
        support=support,
        theta=theta,
        divergence=kl(p, p_e),
        iterations=it,
        residual=float(np.abs(a @ p_e - b).max()),
    )


def pythagorean_check(model, p, q_in_family):
    """|D(P||Q) - D(P||P_E) - D(P_E||Q)| for Q from the family."""
    proj = ri_project(model, p)
    total = kl(p, q_in_family)
    legs = proj.divergence + kl(proj.p_e, q_in_family)
    return abs(total - legs)
