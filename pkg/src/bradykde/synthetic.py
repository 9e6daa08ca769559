"""Synthetic data: Gaussian-mixture R-tuples with planted anomalies, and raw ECG records."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ecg import DEFAULT_PRE
from .evaluation import PeakTable

__all__ = ["SyntheticSpec", "generate_synthetic", "SyntheticEcg", "synthetic_ecg"]


@dataclass(frozen=True)
class SyntheticSpec:
    """Mixture over (t_sample, amplitude) plus planted anomalies.

    Anomalies sit at ``displacement`` mixture standard deviations from the
    mixture mean, in a uniformly random direction (per-axis scaled).
    """

    weights: tuple[float, ...] = (1.0,)
    means: tuple[tuple[float, float], ...] = ((3750.0, 1.0),)
    stds: tuple[tuple[float, float], ...] = ((1500.0, 0.1),)
    n_points: int = 500
    n_anomalies: int = 0
    displacement: float = 6.0
    fs: float = 500.0
    peaks_per_event: int = 20

    def __post_init__(self):
        w = np.asarray(self.weights, float)
        if w.size == 0 or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("mixture weights must be positive and sum to 1")
        if np.shape(self.means) != (w.size, 2) or np.shape(self.stds) != (w.size, 2):
            raise ValueError("means and stds need one (t, amplitude) pair per component")
        if np.any(np.asarray(self.stds, float) <= 0):
            raise ValueError("component standard deviations must be positive")
        if self.n_points < 0 or self.n_anomalies < 0 or self.n_points + self.n_anomalies < 1:
            raise ValueError("need a positive number of points")
        if self.displacement < 0 or self.peaks_per_event < 1 or not self.fs > 0:
            raise ValueError("invalid displacement, peaks_per_event or fs")

    def moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Overall mixture mean and standard deviation per axis."""
        w = np.asarray(self.weights, float)[:, None]
        mu = np.asarray(self.means, float)
        sd = np.asarray(self.stds, float)
        mean = (w * mu).sum(axis=0)
        var = (w * (sd**2 + mu**2)).sum(axis=0) - mean**2
        return mean, np.sqrt(var)


def generate_synthetic(spec: SyntheticSpec, seed: int) -> PeakTable:
    """Draw the mixture sample and planted anomalies; labels mark the anomalies."""
    rng = np.random.default_rng(seed)
    comp = rng.choice(len(spec.weights), size=spec.n_points, p=np.asarray(spec.weights, float))
    mu = np.asarray(spec.means, float)[comp]
    sd = np.asarray(spec.stds, float)[comp]
    bulk = mu + sd * rng.standard_normal((spec.n_points, 2))
    mean, std = spec.moments()
    theta = rng.uniform(0.0, 2.0 * math.pi, spec.n_anomalies)
    anom = mean + spec.displacement * std * np.column_stack([np.cos(theta), np.sin(theta)])
    pts = np.vstack([bulk, anom])
    labels = np.r_[np.zeros(spec.n_points, bool), np.ones(spec.n_anomalies, bool)]
    order = rng.permutation(pts.shape[0])
    pts, labels = pts[order], labels[order]
    event_id = np.arange(pts.shape[0]) // spec.peaks_per_event
    return PeakTable(event_id, pts[:, 0], pts[:, 1], spec.fs, DEFAULT_PRE, labels)


@dataclass(frozen=True)
class SyntheticEcg:
    raw: np.ndarray  # integer ADC counts
    header_text: str
    onsets: np.ndarray
    r_peaks: np.ndarray  # true R-peak sample indices
    fs: float
    gain: float
    base: int


def synthetic_ecg(
    n_events: int = 6,
    fs: float = 500.0,
    gain: float = 800.6597,
    base: int = 16,
    seed: int = 0,
    normal_rr: float = 0.42,
    brady_rr: float = 1.1,
    pre: int = DEFAULT_PRE,
    post: int = 2500,
) -> SyntheticEcg:
    """Raw ECG-like record with slowed-rhythm episodes after each onset.

    Beats are narrow Gaussian R-waves with small T-waves, on top of a 0.15 Hz
    baseline drift and white noise. Each onset is followed by ``post`` samples
    of slow rhythm (RR ~ ``brady_rr`` s) and preceded by ``pre`` samples of
    normal rhythm.
    """
    rng = np.random.default_rng(seed)
    seg = pre + post + 1
    n = n_events * seg + pre
    onsets = np.array([pre + i * seg for i in range(n_events)])
    beats = []
    t = 0.2 * fs
    while t < n - 0.2 * fs:
        in_brady = any(o < t <= o + post for o in onsets)
        rr = (brady_rr if in_brady else normal_rr) * (1.0 + 0.05 * rng.standard_normal())
        beats.append(int(round(t)))
        t += rr * fs
    beats = np.array(beats)
    idx = np.arange(n)
    x = np.zeros(n)
    r_sd = 0.008 * fs
    t_sd = 0.04 * fs
    for b in beats:
        amp = 1.0 + 0.08 * rng.standard_normal()
        lo, hi = max(0, b - int(6 * r_sd)), min(n, b + int(6 * r_sd) + 1)
        x[lo:hi] += amp * np.exp(-0.5 * ((idx[lo:hi] - b) / r_sd) ** 2)
        tc = b + int(0.25 * fs)
        lo, hi = max(0, tc - int(4 * t_sd)), min(n, tc + int(4 * t_sd) + 1)
        x[lo:hi] += 0.2 * amp * np.exp(-0.5 * ((idx[lo:hi] - tc) / t_sd) ** 2)
    x += 0.3 * np.sin(2 * math.pi * 0.15 * idx / fs) + 0.02 * rng.standard_normal(n)
    raw = np.round(x * gain + base).astype(np.int64)
    header = f"synth 1 {fs:g} {n}\nsynth.dat 16 {gain:.4f}/mV 12 0 base={base}\n"
    return SyntheticEcg(raw, header, onsets, beats, fs, gain, base)
