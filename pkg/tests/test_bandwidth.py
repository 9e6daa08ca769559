import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bradykde.bandwidth import (
    SingularBandwidthError,
    asymptotic_bias,
    asymptotic_variance,
    bandwidth_grid,
    cv_score_1d,
    cv_score_qd,
    default_bandwidth_grid,
    h_opt_pointwise,
    select_bandwidth,
)
from bradykde.kernels import KernelKind, eval_convolution, eval_kernel

KINDS = list(KernelKind)


def naive_cv(X, kind, h):
    X = np.asarray(X, float)
    if X.ndim == 1:
        X = X[:, None]
    n, q = X.shape
    h = np.broadcast_to(np.asarray(h, float), (q,))
    conv = 0.0
    loo = 0.0
    for i in range(n):
        for j in range(n):
            c = 1.0
            k = 1.0
            for s in range(q):
                v = (X[i, s] - X[j, s]) / h[s]
                c *= eval_convolution(kind, v) / h[s]
                k *= eval_kernel(kind, v) / h[s]
            conv += c
            if i != j:
                loo += k
    return conv / n**2 - 2 * loo / (n * (n - 1))


@pytest.mark.parametrize("kind", KINDS)
def test_cv_matches_naive_loops(kind):
    rng = np.random.default_rng(11)
    for _ in range(3):
        n = int(rng.integers(2, 30))
        x = rng.normal(size=n)
        X = rng.normal(size=(n, 2))
        assert cv_score_1d(x, kind, 0.5) == pytest.approx(naive_cv(x, kind, 0.5), abs=1e-12)
        assert cv_score_qd(X, kind, (0.4, 0.9)) == pytest.approx(naive_cv(X, kind, (0.4, 0.9)), abs=1e-12)


def test_cv_chunking_is_invisible(monkeypatch):
    import bradykde.bandwidth as bw

    X = np.random.default_rng(5).normal(size=(37, 2))
    whole = cv_score_qd(X, "epanechnikov", 0.6)
    monkeypatch.setattr(bw, "_CHUNK_PAIRS", 50)
    assert cv_score_qd(X, "epanechnikov", 0.6) == pytest.approx(whole, abs=1e-14)


def test_grid_shapes():
    g = bandwidth_grid(0.1, 10.0, 5)
    np.testing.assert_allclose(g, [0.1, 10**-0.5, 1.0, 10**0.5, 10.0])
    np.testing.assert_allclose(bandwidth_grid(1, 2, 3, log=False), [1, 1.5, 2])
    assert bandwidth_grid(2, 2, 10).tolist() == [2.0]
    d = default_bandwidth_grid(np.array([[0, 0], [4, 1]]))
    assert d.size == 40 and d[0] == pytest.approx(0.04) and d[-1] == pytest.approx(4.0)
    for bad in ((0, 1), (2, 1), (1, math.inf)):
        with pytest.raises(ValueError):
            bandwidth_grid(*bad)
    with pytest.raises(ValueError):
        default_bandwidth_grid([[1.0, 1.0], [1.0, 1.0]])


def test_select_is_grid_argmin_with_ties_to_smallest(monkeypatch):
    import bradykde.bandwidth as bw

    X = np.random.default_rng(0).normal(size=20)
    monkeypatch.setattr(bw, "cv_score_qd", lambda data, kind, h: 1.0 if float(np.ravel(h)[0]) < 0.25 else 0.0)
    h, curve = select_bandwidth(X, "gaussian", [0.1, 0.2, 0.3, 0.4])
    assert h == 0.3
    assert curve.score.tolist() == [1.0, 1.0, 0.0, 0.0]


def test_select_matches_brute_force_argmin():
    X = np.random.default_rng(8).normal(size=(40, 2))
    grid = bandwidth_grid(0.05, 2.0, 15)
    h, curve = select_bandwidth(X, "cosine", grid)
    scores = [naive_cv(X, "cosine", g) for g in grid]
    assert h == grid[int(np.argmin(scores))]
    np.testing.assert_allclose(curve.score, scores, atol=1e-12)


def test_per_axis_search_uses_cartesian_grid():
    rng = np.random.default_rng(9)
    X = np.column_stack([rng.normal(size=60), 20 * rng.normal(size=60)])
    h, curve = select_bandwidth(X, "gaussian", [np.geomspace(0.05, 2, 8), np.geomspace(1, 40, 8)], per_axis=True)
    assert curve.h.shape == (64, 2)
    assert h.shape == (2,)
    assert h[1] > h[0]


def test_select_rejects_tiny_or_bad_input():
    with pytest.raises(ValueError):
        select_bandwidth([1.0], "gaussian")
    with pytest.raises(ValueError):
        select_bandwidth([1.0, 2.0], "gaussian", [0.5, 0.4])
    with pytest.raises(ValueError):
        select_bandwidth([1.0, 2.0], "gaussian", [])


def test_asymptotic_formulas():
    assert asymptotic_bias("epanechnikov", 0.5, -2.0) == pytest.approx(0.5 * 0.25 * -2.0 * 0.2)
    assert asymptotic_variance("uniform", 100, 0.1, 0.3) == pytest.approx(0.5 * 0.3 / 10)
    p, p2 = 1 / math.sqrt(2 * math.pi), -1 / math.sqrt(2 * math.pi)
    kappa = 1 / (2 * math.sqrt(math.pi))
    expected = (kappa * p / p2**2) ** 0.2 * 1000 ** -0.2
    assert h_opt_pointwise("gaussian", 1000, p, p2) == pytest.approx(expected)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10**6), st.floats(1e-3, 10), st.floats(-10, 10).filter(lambda v: abs(v) > 1e-6))
def test_h_opt_minimises_the_asymptotic_mse(n, p, p2):
    h = h_opt_pointwise("gaussian", n, p, p2)

    def mse(hh):
        return asymptotic_bias("gaussian", hh, p2) ** 2 + asymptotic_variance("gaussian", n, hh, p)

    assert mse(h) <= mse(1.05 * h) * (1 + 1e-12)
    assert mse(h) <= mse(0.95 * h) * (1 + 1e-12)


def test_h_opt_singular():
    with pytest.raises(SingularBandwidthError):
        h_opt_pointwise("gaussian", 100, 0.3, 0.0)
