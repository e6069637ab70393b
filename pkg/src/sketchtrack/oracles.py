"""Independent numerical oracles for the core closed forms.

Each oracle recomputes a quantity by a different route than the shipped code:
adaptive quadrature for the marginalized sketch likelihood, explicit path
enumeration for the filter recursion, and Monte Carlo for mixture moments.
They back both the test suite and the `verify` CLI subcommand. Nothing here
is imported by the tracking path itself.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln


def quadrature_marginal(alpha: float, beta: float, w_h: float, n_enclosed: int,
                        inside: bool) -> float:
    """Numerically integrate the reliability-marginalized sketch likelihood.

    integral_0^1 (a^d (1-a)^(M-d))^w_h * a^(alpha-1) (1-a)^(beta-1) / B(alpha, beta) da
    """
    d = 1 if inside else 0
    m = int(n_enclosed)
    log_b = gammaln(alpha) + gammaln(beta) - gammaln(alpha + beta)

    def integrand(a: float) -> float:
        if a <= 0.0 or a >= 1.0:
            return 0.0
        log_f = (w_h * (d * math.log(a) + (m - d) * math.log1p(-a))
                 + (alpha - 1.0) * math.log(a) + (beta - 1.0) * math.log1p(-a) - log_b)
        return math.exp(log_f)

    value, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=300)
    return value


def closed_form_marginal(alpha: float, beta: float, w_h: float, n_enclosed: int,
                         inside: bool) -> float:
    """Beta-function closed form, written directly from Gamma functions."""
    d = 1 if inside else 0
    m = int(n_enclosed)
    a1 = w_h * d + alpha
    b1 = w_h * (m - d) + beta
    log_val = (gammaln(a1) + gammaln(b1) - gammaln(a1 + b1)
               - (gammaln(alpha) + gammaln(beta) - gammaln(alpha + beta)))
    return math.exp(log_val)


def brute_force_posterior(initial: np.ndarray, kernel: np.ndarray,
                          step_likelihoods: list[np.ndarray]) -> np.ndarray:
    """Filter marginal at the final step by explicit path enumeration.

    Sums the joint probability of every state path x_0..x_T (prior times
    transition factors times per-step fused likelihoods) and bins the result
    onto x_T. Exponential in T; intended for tiny grids only.
    """
    n = len(initial)
    horizon = len(step_likelihoods)
    n_paths = n ** (horizon + 1)
    if n_paths > 2_000_000:
        raise ValueError(f"{n_paths} paths is too many for brute force")
    idx = np.indices((n,) * (horizon + 1)).reshape(horizon + 1, n_paths)
    p = initial[idx[0]].astype(float)
    for t in range(1, horizon + 1):
        p = p * kernel[idx[t - 1], idx[t]] * step_likelihoods[t - 1][idx[t]]
    total = np.bincount(idx[-1], weights=p, minlength=n)
    s = total.sum()
    if s <= 0:
        raise ValueError("all paths have zero probability")
    return total / s


def gaussian_range_vector(positions: np.ndarray, camera: np.ndarray,
                          measured: float, sigma: float) -> np.ndarray:
    """Plain-math range likelihood used by the brute-force oracle."""
    out = np.empty(len(positions))
    for i, (x, y) in enumerate(positions):
        r = math.sqrt((x - camera[0]) ** 2 + (y - camera[1]) ** 2 + camera[2] ** 2)
        out[i] = math.exp(-0.5 * ((measured - r) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return out


def beta_marginal_vector(mask: np.ndarray, alpha: float, beta: float,
                         w_h: float) -> np.ndarray:
    """Plain-math marginalized sketch vector used by the brute-force oracle."""
    m = int(mask.sum())
    inside = closed_form_marginal(alpha, beta, w_h, m, True)
    outside = closed_form_marginal(alpha, beta, w_h, m, False)
    return np.where(mask, inside, outside)


def monte_carlo_mixture_moments(q_s: float, alpha_in: float, beta_in: float,
                                alpha_out: float, beta_out: float,
                                n_samples: int, rng: np.random.Generator
                                ) -> tuple[float, float, float]:
    """Sample the two-component Beta mixture; returns (mean, var, se_mean)."""
    pick_in = rng.random(n_samples) < q_s
    draws = np.where(pick_in,
                     rng.beta(alpha_in, beta_in, n_samples),
                     rng.beta(alpha_out, beta_out, n_samples))
    mean = float(draws.mean())
    var = float(draws.var())
    return mean, var, float(draws.std(ddof=1) / np.sqrt(n_samples))
