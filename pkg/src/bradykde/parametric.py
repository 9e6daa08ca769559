"""Gaussian parametric baselines: MLE of the mean and the known-variance conjugate update.

Diagnostic only; the prediction pipeline is nonparametric and never calls this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import as_sample_1d

__all__ = ["GaussPrior", "GaussPosterior", "mle_mean", "bayes_posterior", "posterior_predictive"]


@dataclass(frozen=True)
class GaussPrior:
    """Prior N(mu0, sigma0_sq) on the mean; ``sigma_sq`` is the known likelihood variance."""

    mu0: float
    sigma0_sq: float
    sigma_sq: float

    def __post_init__(self):
        if not (self.sigma0_sq > 0 and self.sigma_sq > 0):
            raise ValueError("prior and likelihood variances must be positive")


@dataclass(frozen=True)
class GaussPosterior:
    mu_n: float
    sigma_n_sq: float

    def as_prior(self, sigma_sq: float) -> GaussPrior:
        """Reuse this posterior as the prior for a further batch."""
        return GaussPrior(self.mu_n, self.sigma_n_sq, sigma_sq)


def mle_mean(data) -> float:
    return float(np.mean(as_sample_1d(data)))


def bayes_posterior(data, prior: GaussPrior) -> GaussPosterior:
    x = as_sample_1d(data)
    n = x.size
    s0, s = prior.sigma0_sq, prior.sigma_sq
    denom = n * s0 + s
    mu_n = (n * s0 / denom) * float(np.mean(x)) + (s / denom) * prior.mu0
    return GaussPosterior(mu_n, s0 * s / denom)


def posterior_predictive(post: GaussPosterior, sigma_sq: float) -> tuple[float, float]:
    """Mean and variance of p(x | D) = N(mu_n, sigma^2 + sigma_n^2)."""
    if sigma_sq <= 0:
        raise ValueError("sigma_sq must be positive")
    return post.mu_n, sigma_sq + post.sigma_n_sq
