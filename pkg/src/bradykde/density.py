"""Kernel density estimation: univariate, product-kernel multivariate, 2D grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import KernelKind, as_kind, eval_kernel, profile

__all__ = [
    "DensityGrid",
    "as_sample_1d",
    "as_sample_qd",
    "as_bandwidth",
    "kde_univariate",
    "kde_product",
    "kde_product_many",
    "kde_grid",
]

DEFAULT_GRID_SIZE = 128
DEFAULT_MARGIN_FACTOR = 3.0

# Upper bound on the number of (point, sample) pairs materialised at once.
_CHUNK_PAIRS = 2_000_000


@dataclass(frozen=True)
class DensityGrid:
    """Density values on a rectangular grid; ``values[i, j]`` is at ``(x_axis[i], y_axis[j])``."""

    x_axis: np.ndarray
    y_axis: np.ndarray
    values: np.ndarray
    h: np.ndarray
    kind: KernelKind

    def nodes(self) -> np.ndarray:
        """All grid nodes as an ``(nx * ny, 2)`` array in row-major order."""
        xx, yy = np.meshgrid(self.x_axis, self.y_axis, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])


def as_sample_1d(data) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty data")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contains non-finite values")
    return x


def as_sample_qd(data) -> np.ndarray:
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise ValueError(f"expected an (n, q) array with n, q >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contains non-finite values")
    return x


def as_bandwidth(h, q: int) -> np.ndarray:
    """Broadcast ``h`` to a length-``q`` vector of positive reals."""
    hv = np.atleast_1d(np.asarray(h, dtype=float)).ravel()
    if hv.size == 1 and q > 1:
        hv = np.repeat(hv, q)
    if hv.size != q:
        raise ValueError(f"bandwidth has {hv.size} entries, data has dimension {q}")
    if not np.all(np.isfinite(hv)) or np.any(hv <= 0):
        raise ValueError(f"bandwidth must be positive, got {hv.tolist()}")
    return hv


def kde_univariate(data, kind: KernelKind | str, h: float, x: float) -> float:
    """(1 / (n h)) * sum_i k((X_i - x) / h)."""
    xs = as_sample_1d(data)
    h = float(as_bandwidth(h, 1)[0])
    u = (xs - float(x)) / h
    cut = profile(kind).cutoff
    u = u[np.abs(u) <= cut]
    return float(np.sum(eval_kernel(kind, u)) / (xs.size * h))


def _factor_matrix(kind, data_col: np.ndarray, points_col: np.ndarray, h: float) -> np.ndarray:
    """k((X_i - x_m) / h) for every evaluation point m (rows) and sample i (cols)."""
    u = (data_col[None, :] - points_col[:, None]) / h
    cut = profile(kind).cutoff
    k = eval_kernel(kind, u)
    if math.isfinite(cut):
        k = np.where(np.abs(u) <= cut, k, 0.0)
    return k


def kde_product_many(data, kind: KernelKind | str, h, points) -> np.ndarray:
    """Product-kernel KDE evaluated at each row of ``points``."""
    kind = as_kind(kind)
    X = as_sample_qd(data)
    n, q = X.shape
    hv = as_bandwidth(h, q)
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[None, :] if q > 1 else P[:, None]
    if P.shape[1] != q:
        raise ValueError(f"points have dimension {P.shape[1]}, data has dimension {q}")
    norm = n * float(np.prod(hv))
    out = np.empty(P.shape[0])
    step = max(1, _CHUNK_PAIRS // n)
    for start in range(0, P.shape[0], step):
        block = P[start : start + step]
        prod = np.ones((block.shape[0], n))
        for s in range(q):
            prod *= _factor_matrix(kind, X[:, s], block[:, s], hv[s])
        out[start : start + step] = prod.sum(axis=1) / norm
    return out


def kde_product(data, kind: KernelKind | str, h, x) -> float:
    """(1 / (n h_1...h_q)) * sum_i prod_s k((X_is - x_s) / h_s) at a single point."""
    X = as_sample_qd(data)
    xv = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if xv.size != X.shape[1]:
        raise ValueError(f"point has dimension {xv.size}, data has dimension {X.shape[1]}")
    return float(kde_product_many(X, kind, h, xv[None, :])[0])


def kde_grid(
    data,
    kind: KernelKind | str,
    h,
    grid_size: int = DEFAULT_GRID_SIZE,
    margin_factor: float = DEFAULT_MARGIN_FACTOR,
) -> DensityGrid:
    """Evaluate a 2D product-kernel KDE on a ``grid_size`` x ``grid_size`` grid.

    Each axis spans ``[min - margin_factor * h, max + margin_factor * h]``.
    Because the kernel is separable, the grid is the matrix product of the two
    per-axis factor matrices, which is the same double sum as ``kde_product``.
    """
    kind = as_kind(kind)
    X = as_sample_qd(data)
    if X.shape[1] != 2:
        raise ValueError(f"kde_grid needs 2D data, got dimension {X.shape[1]}")
    grid_size = int(grid_size)
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    hv = as_bandwidth(h, 2)
    lo = X.min(axis=0) - margin_factor * hv
    hi = X.max(axis=0) + margin_factor * hv
    x_axis = np.linspace(lo[0], hi[0], grid_size)
    y_axis = np.linspace(lo[1], hi[1], grid_size)
    fx = _factor_matrix(kind, X[:, 0], x_axis, hv[0])
    fy = _factor_matrix(kind, X[:, 1], y_axis, hv[1])
    values = (fx @ fy.T) / (X.shape[0] * hv[0] * hv[1])
    # Round-off in the product can leave -0.0 or tiny negatives; the true sum is >= 0.
    values = np.maximum(values, 0.0)
    return DensityGrid(x_axis, y_axis, values, hv, kind)
