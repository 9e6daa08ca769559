"""Pan-Tompkins R-peak detection and normalisation of R-tuples.

Pipeline per event: 5-15 Hz band-pass (two zero-phase Butterworth biquads),
five-point derivative, squaring, 150 ms moving-window integration, then
adaptive dual thresholds on the integrated signal with a 200 ms refractory
period, T-wave rejection inside 360 ms and search-back after 1.66 x the running
RR average. Each accepted integrated peak is localised on the input event
(largest sample within +/- 75 ms) to give the R-tuple (t, r).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import find_peaks

from .ecg import Event, butter2_highpass, butter2_lowpass, zero_phase

__all__ = [
    "RTuple",
    "PanTompkinsParams",
    "NormalizeTransform",
    "detect_r_peaks",
    "pan_tompkins_stages",
    "peaks_to_array",
    "normalize_peaks",
]


class RTuple(NamedTuple):
    t: int
    r: float


@dataclass(frozen=True)
class PanTompkinsParams:
    band_low: float = 5.0
    band_high: float = 15.0
    mwi_ms: float = 150.0
    refractory_ms: float = 200.0
    twave_ms: float = 360.0
    searchback_factor: float = 1.66
    learning_s: float = 2.0
    localize_ms: float = 75.0
    rr_history: int = 8


def _samples(ms: float, fs: float) -> int:
    return max(1, int(round(ms * 1e-3 * fs)))


def pan_tompkins_stages(x, fs: float, params: PanTompkinsParams = PanTompkinsParams()) -> dict:
    """Intermediate signals: ``bandpass``, ``derivative``, ``squared``, ``integrated``."""
    x = np.asarray(x, dtype=float)
    b, a = butter2_highpass(params.band_low, fs)
    bp = zero_phase(b, a, x, min_settles=1)
    b, a = butter2_lowpass(params.band_high, fs)
    bp = zero_phase(b, a, bp, min_settles=1)
    # Centred five-point derivative: (-x[n-2] - 2x[n-1] + 2x[n+1] + x[n+2]) * fs / 8.
    padded = np.pad(bp, 2, mode="edge")
    deriv = (-padded[:-4] - 2 * padded[1:-3] + 2 * padded[3:-1] + padded[4:]) * (fs / 8.0)
    sq = deriv * deriv
    w = _samples(params.mwi_ms, fs)
    mwi = np.convolve(sq, np.ones(w) / w, mode="same")
    return {"bandpass": bp, "derivative": deriv, "squared": sq, "integrated": mwi}


def detect_r_peaks(ev: Event | np.ndarray, fs: float, params: PanTompkinsParams = PanTompkinsParams()) -> list[RTuple]:
    """Detect R-peaks in one event; returns R-tuples in ascending ``t``."""
    x = np.asarray(ev.samples if isinstance(ev, Event) else ev, dtype=float)
    if x.size < 2 * fs:
        raise ValueError(f"event of {x.size} samples is shorter than 2 s at fs={fs}")
    st = pan_tompkins_stages(x, fs, params)
    mwi, deriv = st["integrated"], st["derivative"]
    if not np.any(mwi > 0):
        return []
    learn = mwi[: int(params.learning_s * fs)]
    if not np.any(learn > 0):
        learn = mwi

    refractory = _samples(params.refractory_ms, fs)
    twave = _samples(params.twave_ms, fs)
    slope_w = _samples(params.localize_ms, fs)
    cand, _ = find_peaks(mwi, distance=refractory)
    cand = cand[mwi[cand] > 0]
    if cand.size == 0:
        return []

    spki = float(learn.max()) / 3.0
    npki = float(learn.mean()) / 2.0
    thr1 = npki + 0.25 * (spki - npki)

    def slope(p):
        return float(np.max(np.abs(deriv[max(0, p - slope_w) : p + 1])))

    qrs: list[int] = []
    qrs_slope = 0.0
    noise: list[int] = []  # candidates rejected so far, for search-back
    rr: list[int] = []

    def accept(p, weight):
        nonlocal spki, qrs_slope
        spki = weight * mwi[p] + (1 - weight) * spki
        if qrs:
            rr.append(p - qrs[-1])
            del rr[: -params.rr_history]
        qrs.append(p)
        qrs_slope = slope(p)

    for p in cand:
        p = int(p)
        # Search back for a missed beat when the gap since the last QRS is too long.
        while qrs and rr and p - qrs[-1] > params.searchback_factor * np.mean(rr):
            thr2 = 0.5 * thr1
            pool = [q for q in noise if q > qrs[-1] + refractory and mwi[q] > thr2]
            if not pool:
                break
            best = max(pool, key=lambda q: mwi[q])
            noise.remove(best)
            accept(best, 0.25)
            thr1 = npki + 0.25 * (spki - npki)
        v = float(mwi[p])
        is_qrs = v >= thr1
        if is_qrs and qrs and p - qrs[-1] < twave and slope(p) < 0.5 * qrs_slope:
            is_qrs = False  # T-wave
        if is_qrs:
            accept(p, 0.125)
        else:
            npki = 0.125 * v + 0.875 * npki
            noise.append(p)
        thr1 = npki + 0.25 * (spki - npki)

    loc = _samples(params.localize_ms, fs)
    out = []
    for p in sorted(qrs):
        lo, hi = max(0, p - loc), min(x.size, p + loc + 1)
        i = lo + int(np.argmax(x[lo:hi]))
        out.append(RTuple(i, float(x[i])))
    return out


def peaks_to_array(peaks) -> np.ndarray:
    """R-tuples (or an (n, 2) array of ``(t, r)``) as a float (n, 2) array."""
    arr = np.asarray([tuple(p) for p in peaks] if not isinstance(peaks, np.ndarray) else peaks, dtype=float)
    return arr.reshape(-1, 2)


@dataclass(frozen=True)
class NormalizeTransform:
    """Affine map (t, r) -> ((t / fs - center_0) / scale_0, (r - center_1) / scale_1)."""

    fs: float
    center: tuple[float, float]
    scale: tuple[float, float]
    method: str = "zscore"

    def apply(self, peaks) -> np.ndarray:
        P = peaks_to_array(peaks)
        out = np.column_stack([P[:, 0] / self.fs, P[:, 1]])
        return (out - np.asarray(self.center)) / np.asarray(self.scale)

    def inverse(self, coords) -> np.ndarray:
        C = np.asarray(coords, dtype=float).reshape(-1, 2) * np.asarray(self.scale) + np.asarray(self.center)
        return np.column_stack([C[:, 0] * self.fs, C[:, 1]])

    def to_dict(self) -> dict:
        return {"fs": self.fs, "center": list(self.center), "scale": list(self.scale), "method": self.method}

    @classmethod
    def from_dict(cls, d: dict) -> NormalizeTransform:
        return cls(float(d["fs"]), tuple(map(float, d["center"])), tuple(map(float, d["scale"])), str(d["method"]))


def normalize_peaks(peaks, fs: float, stats: NormalizeTransform | None = None, method: str = "zscore"):
    """Scale time to seconds and standardise both axes.

    Without ``stats`` the transform is fitted on ``peaks`` (use the training
    set only); with ``stats`` it is applied unchanged. Returns ``(coords, transform)``.
    """
    if stats is None:
        P = peaks_to_array(peaks)
        if P.shape[0] == 0:
            raise ValueError("cannot fit a normalisation on zero peaks")
        sec = np.column_stack([P[:, 0] / fs, P[:, 1]])
        if method == "zscore":
            center, scale = sec.mean(axis=0), sec.std(axis=0)
        elif method == "minmax":
            center, scale = sec.min(axis=0), sec.max(axis=0) - sec.min(axis=0)
        else:
            raise ValueError(f"unknown normalisation {method!r}; expected zscore or minmax")
        if np.any(scale <= 0):
            raise ValueError("degenerate training peaks: zero spread on an axis")
        stats = NormalizeTransform(float(fs), tuple(map(float, center)), tuple(map(float, scale)), method)
    return stats.apply(peaks), stats
