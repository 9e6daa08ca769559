"""Leave-one-out cross-validated bandwidth selection and asymptotic diagnostics.

The CV score is the closed-form least-squares cross-validation criterion

    CV(h) = 1/n^2  sum_i sum_j   Kbar_h(X_i, X_j)
          - 2/(n(n-1)) sum_i sum_{j != i} K_h(X_i, X_j)

with K_h = prod_s k(./h_s)/h_s and Kbar_h the same product built from the
twofold convolution kernel. The i == j terms are part of the first sum and
excluded from the second.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .density import as_bandwidth, as_sample_1d, as_sample_qd
from .kernels import KernelKind, as_kind, eval_convolution, eval_kernel, profile

__all__ = [
    "SingularBandwidthError",
    "CvCurve",
    "bandwidth_grid",
    "default_bandwidth_grid",
    "cv_score_1d",
    "cv_score_qd",
    "select_bandwidth",
    "asymptotic_bias",
    "asymptotic_variance",
    "h_opt_pointwise",
]

DEFAULT_GRID_STEPS = 40

_CHUNK_PAIRS = 2_000_000


class SingularBandwidthError(ValueError):
    """The pointwise optimal bandwidth is undefined (vanishing second derivative)."""


@dataclass(frozen=True)
class CvCurve:
    """CV score per candidate, in grid order. ``h`` has shape (m,) or (m, q)."""

    h: np.ndarray
    score: np.ndarray

    def __len__(self) -> int:
        return len(self.score)


def bandwidth_grid(h_min: float, h_max: float, steps: int = DEFAULT_GRID_STEPS, log: bool = True) -> np.ndarray:
    """Strictly ascending candidate grid on ``[h_min, h_max]``."""
    if not (0 < h_min <= h_max) or not math.isfinite(h_max):
        raise ValueError(f"need 0 < h_min <= h_max, got {h_min}, {h_max}")
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1 or h_min == h_max:
        return np.array([float(h_min)])
    if log:
        return np.geomspace(h_min, h_max, steps)
    return np.linspace(h_min, h_max, steps)


def default_bandwidth_grid(data, steps: int = DEFAULT_GRID_STEPS) -> np.ndarray:
    """40 log-spaced values on [0.01 R, R], R = the largest per-axis data range."""
    X = as_sample_qd(data)
    r = float(np.max(X.max(axis=0) - X.min(axis=0)))
    if r <= 0:
        raise ValueError("data has zero range; cannot build a default bandwidth grid")
    return bandwidth_grid(0.01 * r, r, steps, log=True)


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim == 1:
        if g.size == 0:
            raise ValueError("bandwidth grid is empty")
        if np.any(g <= 0) or np.any(np.diff(g) <= 0):
            raise ValueError("bandwidth grid must be positive and strictly ascending")
    return g


def cv_score_qd(data, kind: KernelKind | str, h) -> float:
    """Multivariate LOOCV score with per-axis bandwidths ``h``."""
    kind = as_kind(kind)
    X = as_sample_qd(data)
    n, q = X.shape
    if n < 2:
        raise ValueError("cross-validation needs at least 2 observations")
    hv = as_bandwidth(h, q)
    cut = profile(kind).cutoff
    conv_total = 0.0
    kern_total = 0.0
    step = max(1, _CHUNK_PAIRS // n)
    for start in range(0, n, step):
        rows = slice(start, min(n, start + step))
        conv = np.ones((rows.stop - rows.start, n))
        kern = np.ones_like(conv)
        for s in range(q):
            u = (X[rows, s][:, None] - X[:, s][None, :]) / hv[s]
            conv *= eval_convolution(kind, u) / hv[s]
            ku = eval_kernel(kind, u)
            if math.isfinite(cut):
                ku = np.where(np.abs(u) <= cut, ku, 0.0)
            kern *= ku / hv[s]
        # Drop the i == j terms from the leave-one-out sum.
        idx = np.arange(rows.start, rows.stop)
        kern[idx - rows.start, idx] = 0.0
        conv_total += conv.sum()
        kern_total += kern.sum()
    return float(conv_total / n**2 - 2.0 * kern_total / (n * (n - 1)))


def cv_score_1d(data, kind: KernelKind | str, h: float) -> float:
    """Univariate LOOCV score."""
    x = as_sample_1d(data)
    return cv_score_qd(x[:, None], kind, h)


def select_bandwidth(data, kind: KernelKind | str, grid=None, per_axis: bool = False):
    """Grid-search the CV score. Returns ``(h_cv, CvCurve)``.

    With a 1D grid and ``per_axis=False`` the same h is used on every axis.
    With ``per_axis=True`` the grid is either a 1D grid shared by all axes or a
    sequence of per-axis 1D grids, searched over their Cartesian product; h_cv is
    then a q-vector. Ties go to the smallest h (first in grid order).
    """
    X = as_sample_qd(data)
    n, q = X.shape
    if n < 2:
        raise ValueError("cross-validation needs at least 2 observations")
    if grid is None:
        grid = default_bandwidth_grid(X)
    if per_axis:
        if np.ndim(grid) == 1 and not isinstance(grid[0], (list, tuple, np.ndarray)):
            axes = [_check_grid(grid)] * q
        else:
            axes = [_check_grid(g) for g in grid]
            if len(axes) != q:
                raise ValueError(f"got {len(axes)} per-axis grids for dimension {q}")
        cands = np.array(list(itertools.product(*axes)), dtype=float)
    else:
        cands = _check_grid(grid)
        if cands.ndim != 1:
            raise ValueError("shared-bandwidth search needs a 1D grid")
    scores = np.array([cv_score_qd(X, kind, c) for c in cands])
    if not np.all(np.isfinite(scores)):
        raise ValueError("non-finite CV score on the bandwidth grid")
    best = int(np.argmin(scores))
    h_cv = cands[best] if per_axis else float(cands[best])
    return h_cv, CvCurve(cands, scores)


def asymptotic_bias(kind: KernelKind | str, h: float, p2x: float) -> float:
    """Leading-order pointwise bias (h^2 / 2) p''(x) kappa2."""
    if h <= 0:
        raise ValueError("h must be positive")
    return 0.5 * h * h * p2x * profile(kind).kappa2


def asymptotic_variance(kind: KernelKind | str, n: int, h: float, px: float) -> float:
    """Leading-order pointwise variance kappa p(x) / (n h)."""
    if n < 1 or h <= 0:
        raise ValueError("need n >= 1 and h > 0")
    return profile(kind).kappa * px / (n * h)


def h_opt_pointwise(kind: KernelKind | str, n: int, px: float, p2x: float) -> float:
    """Pointwise MSE-optimal bandwidth c(x) n^(-1/5), c(x) = {kappa p / (kappa2 p'')^2}^(1/5)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if px <= 0:
        raise ValueError("p(x) must be positive")
    if p2x == 0:
        raise SingularBandwidthError("p''(x) = 0: the leading bias vanishes and h_opt is undefined")
    prof = profile(kind)
    c = (prof.kappa * px / (prof.kappa2 * p2x) ** 2) ** 0.2
    return c * n ** -0.2
