"""Pointwise bias/variance of the KDE against the leading-order formulas,
and the Gaussian parametric baselines for comparison."""

import numpy as np
from scipy import stats

from bradykde.bandwidth import SingularBandwidthError, asymptotic_bias, asymptotic_variance, h_opt_pointwise
from bradykde.density import kde_univariate
from bradykde.parametric import GaussPrior, bayes_posterior, mle_mean, posterior_predictive

rng = np.random.default_rng(1)
n, reps = 5000, 200
p0, p2 = stats.norm.pdf(0.0), -stats.norm.pdf(0.0)  # p''(0) = -phi(0) for N(0, 1)

print("   h    bias(emp)  bias(asym)   var(emp)   var(asym)")
for h in (0.1, 0.2, 0.4):
    est = np.array([kde_univariate(rng.normal(size=n), "gaussian", h, 0.0) for _ in range(reps)])
    print(
        f"{h:5.2f}  {est.mean() - p0: .5f}   {asymptotic_bias('gaussian', h, p2): .5f}"
        f"   {est.var(ddof=1):.2e}   {asymptotic_variance('gaussian', n, h, p0):.2e}"
    )

print(f"\nMSE-optimal h at x=0, n={n}: {h_opt_pointwise('gaussian', n, p0, p2):.4f}")
try:
    h_opt_pointwise("gaussian", n, stats.norm.pdf(1.0), 0.0)  # inflection point of the normal
except SingularBandwidthError as exc:
    print("at x=1:", exc)

data = rng.normal(2.0, 1.0, 25)
post = bayes_posterior(data, GaussPrior(mu0=0.0, sigma0_sq=1.0, sigma_sq=1.0))
print(f"\nMLE mean {mle_mean(data):.3f}; posterior N({post.mu_n:.3f}, {post.sigma_n_sq:.4f})")
print("predictive mean, variance:", tuple(round(v, 4) for v in posterior_predictive(post, 1.0)))
