"""Kernel objective: the function dbar and the two-point mixture identities."""

from dataclasses import dataclass

import numpy as np

from .divergence import h_r, kl
from .model import a_array, r_array


class DegenerateKernelPoint(ValueError):
    """Raised for u = 0, which has no positive/negative decomposition."""


@dataclass(frozen=True)
class KernelPoint:
    u: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    degree: float


@dataclass(frozen=True)
class MixtureResult:
    mu: float
    p_hat: np.ndarray


def decompose(model, u):
    """Split u into degree and the normalized positive/negative parts."""
    u = np.asarray(u, dtype=float)
    if u.shape != (model.n_states,):
        raise ValueError(f"expected a vector of length {model.n_states}")
    pos = np.clip(u, 0.0, None)
    neg = np.clip(-u, 0.0, None)
    degree = 0.5 * (pos.sum() + neg.sum())
    if degree == 0.0:
        raise DegenerateKernelPoint("zero vector has no decomposition")
    if abs(u.sum()) > 1e-9 * max(1.0, degree):
        raise ValueError("entries do not sum to zero")
    return KernelPoint(u=u, p_plus=pos / pos.sum(), p_minus=neg / neg.sum(), degree=float(degree))


def dbar(model, u):
    """sum_x u(x) log(|u(x)|/r(x)) over the support of u."""
    u = np.asarray(u, dtype=float)
    r = r_array(model)
    mask = u != 0.0
    return float(np.sum(u[mask] * (np.log(np.abs(u[mask])) - np.log(r[mask]))))


def dbar1(model, u):
    """Degree-normalized objective dbar(u) / d_u; scale invariant."""
    u = np.asarray(u, dtype=float)
    degree = 0.5 * np.abs(u).sum()
    if degree == 0.0:
        raise DegenerateKernelPoint("zero vector has no decomposition")
    return dbar(model, u) / float(degree)


def optimal_mixture(model, point):
    """Mixture weight mu and P-hat = mu P+ + (1-mu) P- maximizing closeness.

    mu solves mu/(1-mu) = exp(H_r(P+) - H_r(P-)).
    """
    hp = h_r(model, point.p_plus)
    hm = h_r(model, point.p_minus)
    mu = 1.0 / (1.0 + np.exp(hm - hp))
    return MixtureResult(mu=float(mu), p_hat=mu * point.p_plus + (1.0 - mu) * point.p_minus)


def lemma_identities(model, point):
    """Residuals of the three two-point mixture identities.

    Returns (entropy_sum, mu_ratio, divergence_form):
      exp H_r(P-hat) = exp H_r(P+) + exp H_r(P-),
      mu/(1-mu) = exp(H_r(P+) - H_r(P-)),
      D(P+||P-hat) = log(1 + exp(H_r(P-) - H_r(P+))).
    """
    hp = h_r(model, point.p_plus)
    hm = h_r(model, point.p_minus)
    mix = optimal_mixture(model, point)
    h_hat = h_r(model, mix.p_hat)
    entropy_sum = abs(np.exp(h_hat) - np.exp(hp) - np.exp(hm))
    mu_ratio = abs(mix.mu / (1.0 - mix.mu) - np.exp(hp - hm))
    divergence_form = abs(kl(point.p_plus, mix.p_hat) - np.logaddexp(0.0, hm - hp))
    return float(entropy_sum), float(mu_ratio), float(divergence_form)


def divergence_via_pair(model, point):
    """D(P+||E) = log(1 + exp(H_r(P-) - H_r(P+))) for kernel points."""
    residual = np.abs(a_array(model) @ point.u).max()
    if residual > 1e-8 * max(1.0, point.degree):
        raise ValueError("u is not in the kernel of the design matrix")
    hp = h_r(model, point.p_plus)
    hm = h_r(model, point.p_minus)
    return float(np.logaddexp(0.0, hm - hp))
