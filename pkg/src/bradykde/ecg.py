"""ECG calibration, baseline-wander removal and onset-centred segmentation.

Header grammar (whitespace separated, ``#`` starts a comment line, blank lines
ignored)::

    <record> <n_signals> <fs> [<n_samples>]
    <file> <fmt> <gain>[/<units>] [<token> ...] base=<int> [<token> ...]
    ... one signal line per signal ...

``n_signals`` signal lines must follow. ``gain`` is a decimal number, optionally
followed by ``/units``. Exactly one ``base=<int>`` token is required per signal
line. Anything else raises ``HeaderError``.

Baseline wander is removed by a second-order Butterworth high-pass biquad
designed by the bilinear transform with frequency prewarping. With
K = tan(pi * fc / fs) and norm = 1 / (1 + sqrt(2) K + K^2)::

    y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]

    b0 = norm,  b1 = -2 norm,  b2 = norm
    a1 = 2 (K^2 - 1) norm,     a2 = (1 - sqrt(2) K + K^2) norm

The filter runs forward then backward (zero phase).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sps

__all__ = [
    "HeaderError",
    "EcgHeader",
    "EcgSignal",
    "Event",
    "parse_header",
    "calibrate",
    "butter2_highpass",
    "butter2_lowpass",
    "settling_length",
    "zero_phase",
    "remove_baseline_wander",
    "segment_events",
    "DEFAULT_PRE",
    "DEFAULT_POST",
    "DEFAULT_HP_CUTOFF",
]

DEFAULT_PRE = 5000
DEFAULT_POST = 2500
DEFAULT_HP_CUTOFF = 0.5


class HeaderError(ValueError):
    pass


@dataclass(frozen=True)
class EcgHeader:
    fs: float
    gain: float
    base: int
    record: str = ""
    n_samples: int | None = None


@dataclass(frozen=True)
class EcgSignal:
    samples: np.ndarray
    fs: float
    calibrated: bool = True


@dataclass(frozen=True)
class Event:
    samples: np.ndarray
    onset_offset: int
    onset: int = -1  # onset index in the source signal


_DECIMAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_GAIN_RE = re.compile(rf"^({_DECIMAL})(?:/\S+)?$")
_BASE_RE = re.compile(r"^base=([+-]?\d+)$")


def _number(tok: str, what: str, lineno: int) -> float:
    if not re.fullmatch(_DECIMAL, tok):
        raise HeaderError(f"line {lineno}: {what} {tok!r} is not a number")
    return float(tok)


def parse_header(text: str, channel: int = 0) -> EcgHeader:
    """Parse the simplified header text and return the header of ``channel``."""
    lines = [
        (i, ln.split())
        for i, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise HeaderError("empty header")
    lineno, rec = lines[0]
    if len(rec) not in (3, 4):
        raise HeaderError(f"line {lineno}: expected '<record> <n_signals> <fs> [<n_samples>]'")
    if not rec[1].isdigit() or int(rec[1]) < 1:
        raise HeaderError(f"line {lineno}: n_signals {rec[1]!r} must be a positive integer")
    n_signals = int(rec[1])
    fs = _number(rec[2], "fs", lineno)
    if not fs > 0:
        raise HeaderError(f"line {lineno}: fs must be positive, got {fs}")
    n_samples = None
    if len(rec) == 4:
        if not rec[3].isdigit():
            raise HeaderError(f"line {lineno}: n_samples {rec[3]!r} must be a nonnegative integer")
        n_samples = int(rec[3])
    sig_lines = lines[1:]
    if len(sig_lines) != n_signals:
        raise HeaderError(f"header declares {n_signals} signal line(s), found {len(sig_lines)}")
    if not 0 <= channel < n_signals:
        raise HeaderError(f"channel {channel} out of range for {n_signals} signal(s)")

    parsed = []
    for lineno, toks in sig_lines:
        if len(toks) < 4:
            raise HeaderError(f"line {lineno}: expected '<file> <fmt> <gain> ... base=<int>'")
        m = _GAIN_RE.match(toks[2])
        if not m:
            raise HeaderError(f"line {lineno}: malformed gain {toks[2]!r}")
        gain = float(m.group(1))
        if not gain > 0:
            raise HeaderError(f"line {lineno}: gain {gain} is not positive (uncalibrated signal)")
        bases = [b for b in (_BASE_RE.match(t) for t in toks[3:]) if b]
        if len(bases) != 1:
            raise HeaderError(f"line {lineno}: expected exactly one 'base=<int>' token")
        parsed.append((gain, int(bases[0].group(1))))
    gain, base = parsed[channel]
    return EcgHeader(fs=fs, gain=gain, base=base, record=rec[0], n_samples=n_samples)


def calibrate(raw, header: EcgHeader) -> EcgSignal:
    """Physical units: (raw - base) / gain."""
    x = np.asarray(raw, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty signal")
    return EcgSignal((x - header.base) / header.gain, float(header.fs), True)


def _bilinear_k(fc: float, fs: float) -> float:
    if not (fs > 0 and 0 < fc < fs / 2):
        raise ValueError(f"cutoff {fc} Hz must lie in (0, fs/2) for fs={fs}")
    return math.tan(math.pi * fc / fs)


def butter2_highpass(fc: float, fs: float) -> tuple[np.ndarray, np.ndarray]:
    """``(b, a)`` of the second-order Butterworth high-pass biquad."""
    K = _bilinear_k(fc, fs)
    norm = 1.0 / (1.0 + math.sqrt(2.0) * K + K * K)
    b = np.array([norm, -2.0 * norm, norm])
    a = np.array([1.0, 2.0 * (K * K - 1.0) * norm, (1.0 - math.sqrt(2.0) * K + K * K) * norm])
    return b, a


def butter2_lowpass(fc: float, fs: float) -> tuple[np.ndarray, np.ndarray]:
    """``(b, a)`` of the second-order Butterworth low-pass biquad."""
    K = _bilinear_k(fc, fs)
    norm = 1.0 / (1.0 + math.sqrt(2.0) * K + K * K)
    kk = K * K * norm
    b = np.array([kk, 2.0 * kk, kk])
    a = np.array([1.0, 2.0 * (K * K - 1.0) * norm, (1.0 - math.sqrt(2.0) * K + K * K) * norm])
    return b, a


def settling_length(a, decay: float = 1e-3) -> int:
    """Samples for the impulse-response envelope to fall by ``decay``."""
    r = float(np.max(np.abs(np.roots(a))))
    if r >= 1.0:
        raise ValueError("filter is not stable")
    if r == 0.0:
        return len(a)
    return int(math.ceil(math.log(decay) / math.log(r)))


def zero_phase(b, a, x: np.ndarray, min_settles: int = 6) -> np.ndarray:
    """Forward-backward filtering with odd-extension padding of one settling length."""
    settle = settling_length(a)
    if x.size < min_settles * settle:
        raise ValueError(
            f"signal of {x.size} samples is shorter than {min_settles} x the filter settling length ({settle})"
        )
    return sps.filtfilt(b, a, x, padtype="odd", padlen=min(settle, x.size - 1))


def remove_baseline_wander(sig: EcgSignal, cutoff: float = DEFAULT_HP_CUTOFF) -> EcgSignal:
    """Zero-phase 2nd-order high-pass at ``cutoff`` Hz (default 0.5)."""
    if not sig.fs > 2.4 * cutoff:
        raise ValueError(f"fs={sig.fs} Hz too low for a {cutoff} Hz high-pass")
    x = np.asarray(sig.samples, dtype=float)
    b, a = butter2_highpass(cutoff, sig.fs)
    return EcgSignal(zero_phase(b, a, x), sig.fs, sig.calibrated)


@dataclass
class Segmentation:
    events: list[Event]
    skipped: list[int] = field(default_factory=list)


def segment_events(sig: EcgSignal | np.ndarray, onsets, pre: int = DEFAULT_PRE, post: int = DEFAULT_POST) -> Segmentation:
    """Cut ``[onset - pre, onset + post]`` around every onset.

    Onsets without enough signal on either side are skipped and listed in
    ``Segmentation.skipped``; nothing is padded.
    """
    x = np.asarray(sig.samples if isinstance(sig, EcgSignal) else sig, dtype=float)
    on = [int(o) for o in onsets]
    if any(b < a for a, b in zip(on, on[1:])):
        raise ValueError("onsets must be sorted ascending")
    if pre < 0 or post < 0:
        raise ValueError("pre and post must be nonnegative")
    out = Segmentation([])
    for o in on:
        if o - pre < 0 or o + post >= x.size:
            out.skipped.append(o)
            continue
        out.events.append(Event(x[o - pre : o + post + 1].copy(), pre, o))
    return out
