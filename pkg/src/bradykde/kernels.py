"""Univariate kernel basis functions, their twofold convolutions and moments.

Four kernels are supported: gaussian, epanechnikov, uniform and cosine.
The compact kernels live on the closed interval |u| <= 1, so a point sitting
exactly on the edge of the window contributes the kernel's boundary value.

Closed forms of the twofold convolution kbar(v) = int k(u) k(v - u) du:

    gaussian      exp(-v^2/4) / sqrt(4 pi)
    epanechnikov  3/160 (2 - |v|)^3 (v^2 + 6|v| + 4),          |v| <= 2
    uniform       (2 - |v|) / 4,                               |v| <= 2
    cosine        pi^2/32 [(2 - |v|) cos(pi|v|/2)
                           + (2/pi) sin(pi|v|/2)],             |v| <= 2
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelKind",
    "KernelProfile",
    "GAUSSIAN_CUTOFF",
    "as_kind",
    "profile",
    "eval_kernel",
    "eval_convolution",
    "kernel_moments",
]

# Gaussian terms beyond this many bandwidths are < 1e-14 and may be pruned.
GAUSSIAN_CUTOFF = 8.0

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_4PI = math.sqrt(4.0 * math.pi)


class KernelKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"
    UNIFORM = "uniform"
    COSINE = "cosine"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class KernelProfile:
    """Static description of a kernel.

    ``support_radius`` is ``inf`` for the gaussian; ``cutoff`` is the radius
    beyond which summation loops may skip terms (equal to the support for the
    compact kernels).
    """

    kind: KernelKind
    support_radius: float
    cutoff: float
    kappa: float
    kappa2: float


_PROFILES = {
    KernelKind.GAUSSIAN: KernelProfile(
        KernelKind.GAUSSIAN, math.inf, GAUSSIAN_CUTOFF, 1.0 / (2.0 * math.sqrt(math.pi)), 1.0
    ),
    KernelKind.EPANECHNIKOV: KernelProfile(KernelKind.EPANECHNIKOV, 1.0, 1.0, 0.6, 0.2),
    KernelKind.UNIFORM: KernelProfile(KernelKind.UNIFORM, 1.0, 1.0, 0.5, 1.0 / 3.0),
    KernelKind.COSINE: KernelProfile(
        KernelKind.COSINE, 1.0, 1.0, math.pi**2 / 16.0, 1.0 - 8.0 / math.pi**2
    ),
}


def as_kind(kind: KernelKind | str) -> KernelKind:
    """Coerce a lowercase kernel name (or a ``KernelKind``) to ``KernelKind``."""
    if isinstance(kind, KernelKind):
        return kind
    try:
        return KernelKind(str(kind).strip().lower())
    except ValueError:
        names = " | ".join(k.value for k in KernelKind)
        raise ValueError(f"unknown kernel {kind!r}; expected one of {names}") from None


def profile(kind: KernelKind | str) -> KernelProfile:
    return _PROFILES[as_kind(kind)]


def _scalar_or_array(out: np.ndarray, like):
    return float(out) if np.ndim(like) == 0 else out


def eval_kernel(kind: KernelKind | str, u):
    """Evaluate k(u). Accepts a scalar or an array; returns the same shape."""
    kind = as_kind(kind)
    x = np.asarray(u, dtype=float)
    if kind is KernelKind.GAUSSIAN:
        out = np.exp(-0.5 * x * x) / _SQRT_2PI
    else:
        inside = np.abs(x) <= 1.0
        if kind is KernelKind.EPANECHNIKOV:
            vals = 0.75 * (1.0 - x * x)
        elif kind is KernelKind.UNIFORM:
            vals = np.full_like(x, 0.5)
        else:
            vals = (math.pi / 4.0) * np.cos(0.5 * math.pi * x)
        out = np.where(inside, vals, 0.0)
    return _scalar_or_array(out, u)


def eval_convolution(kind: KernelKind | str, v):
    """Evaluate the twofold convolution kernel kbar(v)."""
    kind = as_kind(kind)
    x = np.asarray(v, dtype=float)
    if kind is KernelKind.GAUSSIAN:
        return _scalar_or_array(np.exp(-0.25 * x * x) / _SQRT_4PI, v)
    a = np.abs(x)
    inside = a <= 2.0
    d = np.where(inside, 2.0 - a, 0.0)
    if kind is KernelKind.EPANECHNIKOV:
        vals = (3.0 / 160.0) * d**3 * (a * a + 6.0 * a + 4.0)
    elif kind is KernelKind.UNIFORM:
        vals = 0.25 * d
    else:
        half = 0.5 * math.pi * a
        vals = (math.pi**2 / 32.0) * (d * np.cos(half) + (2.0 / math.pi) * np.sin(half))
    return _scalar_or_array(np.where(inside, vals, 0.0), v)


def kernel_moments(kind: KernelKind | str) -> tuple[float, float]:
    """Return ``(kappa, kappa2)`` = (int k^2, int v^2 k(v) dv)."""
    p = profile(kind)
    return p.kappa, p.kappa2
