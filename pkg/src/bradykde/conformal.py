"""Conformal prediction sets from a 2D kernel density estimate.

With H = h^2 I_2 the estimate at x is (1/N) sum_n K_H(x - x_n), where
K_H(u) = h^-2 k(u_1/h) k(u_2/h). Given training densities y_1 <= ... <= y_N,
the prediction set is the upper level set {x : p(x) >= C_k} with

    C_k = y_k - k(0)^2 / (N h^2),   k = max(1, floor((N + 1) p_fa)).

This set contains the exact conformal set {x : eta_x >= p_fa}, where eta_x is
the rank p-value of the augmented-data density at x (see ``p_value_field``).
A test point is flagged as an onset when it falls outside the convex hull of
the level-set grid nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .density import DensityGrid, as_bandwidth, as_sample_qd, kde_product_many
from .geometry import DEFAULT_TOL, convex_hull, points_in_hull
from .kernels import KernelKind, as_kind, eval_kernel

__all__ = [
    "PredictionSet",
    "threshold_rank",
    "compute_threshold",
    "build_prediction_set",
    "fit_prediction_set",
    "test_onset",
    "test_onsets",
    "p_value_field",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredictionSet:
    c_k: float
    mask: np.ndarray
    hull: np.ndarray
    p_fa: float
    n_train: int
    grid: DensityGrid | None = None

    @property
    def is_empty(self) -> bool:
        return self.hull.shape[0] == 0


def threshold_rank(n: int, p_fa: float) -> int:
    """k = max(1, floor((n + 1) p_fa)); raises if k exceeds n."""
    if n < 1:
        raise ValueError("need at least one training density")
    if not 0.0 < p_fa < 1.0:
        raise ValueError(f"p_fa must lie in (0, 1), got {p_fa}")
    # Guard floor() against products such as 20 * 0.05 landing just below 1.
    k = max(1, math.floor((n + 1) * p_fa + 1e-9))
    if k > n:
        raise ValueError(f"p_fa={p_fa} gives rank k={k} > n={n}; too few training points")
    return k


def compute_threshold(train_densities, n: int, p_fa: float, kind: KernelKind | str, h) -> float:
    """C_k = y_(k) - k(0)^2 / (n h^2) for the isotropic 2D bandwidth H = h^2 I_2.

    A per-axis bandwidth ``(h_1, h_2)`` gives the correction k(0)^2 / (n h_1 h_2).
    """
    y = np.sort(np.asarray(train_densities, dtype=float).ravel())
    if y.size != n:
        raise ValueError(f"got {y.size} training densities for n={n}")
    hv = as_bandwidth(h, 2)
    k = threshold_rank(n, p_fa)
    k0 = float(eval_kernel(kind, 0.0))
    return float(y[k - 1] - k0 * k0 / (n * hv[0] * hv[1]))


def _mask_hull(grid: DensityGrid, mask: np.ndarray) -> np.ndarray:
    # Only the lowest and highest true node of each column can be hull vertices.
    cols = np.flatnonzero(mask.any(axis=1))
    if cols.size == 0:
        return np.empty((0, 2))
    sub = mask[cols]
    lo = sub.argmax(axis=1)
    hi = sub.shape[1] - 1 - sub[:, ::-1].argmax(axis=1)
    xs = grid.x_axis[cols]
    pts = np.concatenate(
        [np.column_stack([xs, grid.y_axis[lo]]), np.column_stack([xs, grid.y_axis[hi]])]
    )
    return convex_hull(pts)


def build_prediction_set(grid: DensityGrid, c_k: float, p_fa: float, n_train: int) -> PredictionSet:
    mask = grid.values >= c_k
    hull = _mask_hull(grid, mask)
    if hull.shape[0] == 0:
        log.warning("prediction set is empty (C_k=%g above grid maximum); every point will be flagged", c_k)
    return PredictionSet(float(c_k), mask, hull, float(p_fa), int(n_train), grid)


def fit_prediction_set(
    train,
    kind: KernelKind | str,
    h,
    p_fa: float = 0.05,
    grid_size: int = 128,
    margin_factor: float = 3.0,
) -> PredictionSet:
    """Density grid, threshold and hull from normalised 2D training points."""
    from .density import kde_grid

    X = as_sample_qd(train)
    grid = kde_grid(X, kind, h, grid_size, margin_factor)
    y = kde_product_many(X, kind, h, X)
    c_k = compute_threshold(y, X.shape[0], p_fa, kind, h)
    return build_prediction_set(grid, c_k, p_fa, X.shape[0])


def test_onsets(pset: PredictionSet, points, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Boolean array, True where the point lies outside the hull (predicted onset)."""
    return ~points_in_hull(pset.hull, points, tol)


def test_onset(pset: PredictionSet, x_m, tol: float = DEFAULT_TOL) -> bool:
    return bool(test_onsets(pset, np.asarray(x_m, dtype=float).reshape(1, 2), tol)[0])


# Not a pytest test despite the name.
test_onset.__test__ = False
test_onsets.__test__ = False


def p_value_field(train, nodes, kind: KernelKind | str, h) -> np.ndarray:
    """Exact conformal p-values at each evaluation node.

    For a node x the augmented sample is X_N + {x}; with S_n = N y_n the
    unnormalised training densities,

        eta_x = 1/(N+1) * #{n : S_n + K_H(x_n - x) <= N p(x) + K_H(0)}.

    ``nodes`` is an (m, 2) array or a ``DensityGrid`` (result then has the grid's
    shape). Cost is O(N) per node after an O(N^2) setup; meant for small N.
    """
    kind = as_kind(kind)
    X = as_sample_qd(train)
    if X.shape[1] != 2:
        raise ValueError("p_value_field needs 2D training data")
    hv = as_bandwidth(h, 2)
    N = X.shape[0]
    shape = None
    if isinstance(nodes, DensityGrid):
        shape = nodes.values.shape
        nodes = nodes.nodes()
    Q = np.asarray(nodes, dtype=float).reshape(-1, 2)
    scale = 1.0 / (hv[0] * hv[1])

    def pair_kernel(A, B):
        return (
            eval_kernel(kind, (A[:, None, 0] - B[None, :, 0]) / hv[0])
            * eval_kernel(kind, (A[:, None, 1] - B[None, :, 1]) / hv[1])
            * scale
        )

    S = pair_kernel(X, X).sum(axis=1)
    k0 = float(eval_kernel(kind, 0.0)) ** 2 * scale
    out = np.empty(Q.shape[0])
    step = max(1, 2_000_000 // N)
    for start in range(0, Q.shape[0], step):
        block = Q[start : start + step]
        cross = pair_kernel(block, X)  # (m, N): K_H(x - x_n)
        px_unnorm = cross.sum(axis=1)
        aug_train = S[None, :] + cross
        aug_x = px_unnorm + k0
        out[start : start + step] = (aug_train <= aug_x[:, None]).sum(axis=1) / (N + 1)
    return out.reshape(shape) if shape is not None else out
