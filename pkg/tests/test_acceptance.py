"""Acceptance criteria 1-13, one test each.

Every test prints (and records for the terminal summary) a single line
``criterion N: PASS|FAIL <name> (<details>, <seconds>s)``.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy import integrate, stats

from bradykde.bandwidth import asymptotic_bias, cv_score_1d, cv_score_qd, default_bandwidth_grid, select_bandwidth
from bradykde.cli import main
from bradykde.conformal import compute_threshold, fit_prediction_set, p_value_field
from bradykde.conformal import test_onsets as onsets_of
from bradykde.density import kde_grid, kde_product_many, kde_univariate
from bradykde.ecg import EcgSignal, remove_baseline_wander
from bradykde.evaluation import ConfusionMatrix, SplitSpec, compute_epe, compute_metrics, run_trial
from bradykde.kernels import KernelKind, eval_convolution, eval_kernel, profile
from bradykde.qrs import detect_r_peaks
from bradykde.synthetic import SyntheticSpec, generate_synthetic

from conftest import ACCEPTANCE_LINES

KINDS = list(KernelKind)


@contextmanager
def criterion(number, name, budget_s):
    info = {}
    t0 = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        dt = time.perf_counter() - t0
        within = dt <= budget_s
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        status = "PASS" if ok and within else "FAIL"
        line = f"criterion {number}: {status} {name} ({detail}{', ' if detail else ''}{dt:.2f}s of {budget_s}s)"
        print(line)
        ACCEPTANCE_LINES.append(line)
    assert within, f"criterion {number} took {dt:.1f}s, budget {budget_s}s"


def test_c01_metric_regression():
    with criterion(1, "metric regression", 1) as info:
        m = compute_metrics(ConfusionMatrix(tp=18, fp=26, fn=9, tn=415))
        expected = dict(precision=0.4091, fdr=0.5909, for_rate=0.0212, accuracy=0.9252, f1=0.5070, sensitivity=0.6667)
        for key, want in expected.items():
            got = getattr(m, key)
            info[key] = f"{got:.4f}"
            assert abs(got - want) <= 5e-5, key
        # Sensitivity is TP / (TP + FN) = 18 / 27 on these counts, not 0.75.
        info["note"] = "sensitivity=18/27"


def test_c02_epe_regression():
    with criterion(2, "EPE regression", 1) as info:
        epe = compute_epe(ConfusionMatrix(tp=18, fp=26, fn=9, tn=415), 468)
        info["epe_pct"] = f"{100 * epe:.4f}"
        assert abs(100 * epe - 7.478) <= 0.001


def _conv_quad(kind, v):
    r = profile(kind).support_radius
    if math.isfinite(r):
        lo, hi = max(-r, v - r), min(r, v + r)
        if lo >= hi:
            return 0.0
    else:
        lo, hi = -np.inf, np.inf
    return integrate.quad(lambda u: eval_kernel(kind, u) * eval_kernel(kind, v - u), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]


def test_c03_convolution_kernels():
    with criterion(3, "convolution kernels vs quadrature", 5) as info:
        for kind in KINDS:
            reach = 2 * profile(kind).support_radius
            span = reach + 0.5 if math.isfinite(reach) else 6.0
            v = np.linspace(-span, span, 400)
            err = max(abs(eval_convolution(kind, vi) - _conv_quad(kind, vi)) for vi in v)
            info[kind.value] = f"{err:.1e}"
            assert err <= 1e-6, kind
        v = np.linspace(-6, 6, 400)
        g = np.max(np.abs(eval_convolution("gaussian", v) - np.exp(-v * v / 4) / math.sqrt(4 * math.pi)))
        info["gauss_closed_form"] = f"{g:.1e}"
        assert g <= 1e-12


def test_c04_kernel_normalization():
    with criterion(4, "kernel normalization", 1) as info:
        for kind in KINDS:
            r = profile(kind).support_radius
            lim = (-r, r) if math.isfinite(r) else (-np.inf, np.inf)
            lim2 = (-2 * r, 2 * r) if math.isfinite(r) else (-np.inf, np.inf)
            a = integrate.quad(lambda u: eval_kernel(kind, u), *lim)[0]
            b = integrate.quad(lambda u: eval_convolution(kind, u), *lim2)[0]
            info[kind.value] = f"{max(abs(a - 1), abs(b - 1)):.1e}"
            assert abs(a - 1) <= 1e-6 and abs(b - 1) <= 1e-6, kind


def _naive_cv(X, kind, h):
    n, q = X.shape
    conv = loo = 0.0
    for i in range(n):
        for j in range(n):
            c = k = 1.0
            for s in range(q):
                v = (X[i, s] - X[j, s]) / h
                c *= eval_convolution(kind, v) / h
                k *= eval_kernel(kind, v) / h
            conv += c
            if i != j:
                loo += k
    return conv / n**2 - 2 * loo / (n * (n - 1))


def test_c05_cv_brute_force():
    with criterion(5, "LOOCV vs naive loops", 5) as info:
        worst = 0.0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(5, 51))
            kind = KINDS[seed % 4]
            h = float(rng.uniform(0.2, 1.5))
            x = rng.normal(size=n)
            X = rng.normal(size=(n, 2))
            worst = max(
                worst,
                abs(cv_score_1d(x, kind, h) - _naive_cv(x[:, None], kind, h)),
                abs(cv_score_qd(X, kind, h) - _naive_cv(X, kind, h)),
            )
        info["max_abs_err"] = f"{worst:.1e}"
        assert worst <= 1e-10


def _exact_mise_gauss(n, h):
    """MISE of the Gaussian-kernel KDE under N(0,1) truth, by quadrature of bias^2 + variance."""
    s = math.sqrt(1 + h * h)

    def integrand(x):
        mean = stats.norm.pdf(x, scale=s)
        second = stats.norm.pdf(x, scale=math.sqrt(1 + h * h / 2)) / (2 * math.sqrt(math.pi) * h)
        return (mean - stats.norm.pdf(x)) ** 2 + (second - mean**2) / n

    return integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-14)[0]


def test_c06_bandwidth_sanity():
    with criterion(6, "bandwidth sanity", 30) as info:
        x = np.random.default_rng(2024).normal(size=200)
        grid = default_bandwidth_grid(x)
        h_cv, _ = select_bandwidth(x, "gaussian", grid)
        ref = 1.06 * x.std(ddof=1) * 200 ** -0.2
        mise = {h: _exact_mise_gauss(200, h) for h in (grid[0], h_cv, grid[-1])}
        info["h_cv"] = f"{h_cv:.4f}"
        info["ratio"] = f"{h_cv / ref:.3f}"
        info["mise"] = "/".join(f"{mise[h]:.2e}" for h in (grid[0], h_cv, grid[-1]))
        assert 0.3 * ref <= h_cv <= 3 * ref
        assert mise[h_cv] < mise[grid[0]] and mise[h_cv] < mise[grid[-1]]


def test_c07_conformal_superset():
    with criterion(7, "conformal superset", 60) as info:
        violations = 0
        nodes = 0
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            n = int(rng.integers(20, 51))
            kind = KINDS[seed % 4]
            X = rng.normal(size=(n, 2))
            h = float(rng.uniform(0.3, 1.0))
            grid = kde_grid(X, kind, h, grid_size=64)
            c_k = compute_threshold(kde_product_many(X, kind, h, X), n, 0.05, kind, h)
            eta = p_value_field(X, grid, kind, h)
            violations += int(np.sum((eta >= 0.05) & (grid.values < c_k)))
            nodes += eta.size
        info["violations"] = f"{violations}/{nodes}"
        assert violations == 0


def test_c08_coverage():
    with criterion(8, "coverage on held-out points", 60) as info:
        rates = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            cov = np.array([[1.0, 0.4], [0.4, 0.5]])
            draw = lambda m: rng.multivariate_normal([0, 0], cov, size=m)
            train, val, held = draw(500), draw(200), draw(1000)
            h, _ = select_bandwidth(val, "gaussian")
            pset = fit_prediction_set(train, "gaussian", h, p_fa=0.05)
            rates.append(onsets_of(pset, held).mean())
        info["mean_flagged"] = f"{np.mean(rates):.4f}"
        assert np.mean(rates) <= 0.10


def test_c09_planted_anomalies():
    with criterion(9, "planted-anomaly detection", 120) as info:
        spec = SyntheticSpec(n_points=1000, n_anomalies=25, displacement=6.0)
        pooled = ConfusionMatrix(0, 0, 0, 0)
        epes = []
        for seed in range(20):
            r = run_trial(generate_synthetic(spec, seed), SplitSpec(0.6, 0.2, 0.2), seed)
            pooled = pooled + r.cm
            epes.append(r.epe)
        sens = compute_metrics(pooled).sensitivity
        info["sensitivity"] = f"{sens:.3f}"
        info["mean_epe"] = f"{np.mean(epes):.4f}"
        assert sens >= 0.9 and np.mean(epes) <= 0.15


def test_c10_pan_tompkins():
    with criterion(10, "Pan-Tompkins pulse train", 5) as info:
        fs = 500
        idx = np.arange(12 * fs)
        truth = np.array([fs // 2 + i * fs for i in range(12)])
        x = sum(np.exp(-0.5 * ((idx - p) / 4.0) ** 2) for p in truth)
        found = np.array([p.t for p in detect_r_peaks(x, fs)])
        hits = sum(np.min(np.abs(found - t)) <= 2 for t in truth) if found.size else 0
        flat = detect_r_peaks(np.zeros(12 * fs), fs)
        info["hits"] = f"{hits}/12"
        info["flat"] = len(flat)
        assert hits >= 10 and len(flat) == 0


def test_c11_dsp_filter():
    with criterion(11, "baseline-wander filter", 5) as info:
        fs = 500.0
        t = np.arange(int(60 * fs)) / fs
        dc = remove_baseline_wander(EcgSignal(np.full(t.size, 2.5), fs, True)).samples
        mid = slice(int(10 * fs), -int(10 * fs))

        def gain(f):
            y = remove_baseline_wander(EcgSignal(np.sin(2 * np.pi * f * t), fs, True)).samples
            return np.sqrt(np.mean(y[mid] ** 2) / 0.5)

        g01, g10 = gain(0.1), gain(10.0)
        info["dc_mean"] = f"{abs(dc.mean()):.1e}"
        info["gain_0.1Hz"] = f"{g01:.2e}"
        info["gain_10Hz"] = f"{g10:.4f}"
        assert abs(dc.mean()) <= 1e-6 and g01 <= 0.1 and abs(g10 - 1) <= 0.05


def test_c12_asymptotic_bias():
    with criterion(12, "asymptotic bias", 120) as info:
        rng = np.random.default_rng(12)
        h = 0.2
        est = np.array([kde_univariate(rng.normal(size=50_000), "gaussian", h, 0.0) for _ in range(200)])
        empirical = est.mean() - stats.norm.pdf(0.0)
        predicted = asymptotic_bias("gaussian", h, -stats.norm.pdf(0.0))
        rel = abs(empirical - predicted) / abs(predicted)
        info["empirical"] = f"{empirical:.5f}"
        info["predicted"] = f"{predicted:.5f}"
        info["rel_err"] = f"{rel:.3f}"
        assert rel <= 0.20


def test_c13_determinism(tmp_path):
    with criterion(13, "evaluate determinism", 120) as info:
        peaks, labels = tmp_path / "p.csv", tmp_path / "l.csv"
        assert main(["synth", "--seed", "3", "--n", "500", "--anomalies", "10", "--out-peaks", str(peaks), "--out-labels", str(labels)]) == 0
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"report_{run}.csv"
            assert main(["evaluate", "--peaks", str(peaks), "--labels", str(labels), "--trials", "20", "--seed", "5", "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        info["bytes"] = len(outs[0])
        assert outs[0] == outs[1]
