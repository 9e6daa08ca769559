"""Run configuration loaded from a line-oriented ``key = value`` file.

Lines starting with ``#`` are comments. Unknown keys, duplicate keys and
values that fail validation are rejected with the offending line number.
Command-line flags override file values.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields

from .bandwidth import bandwidth_grid
from .evaluation import LABEL_WINDOW, SplitSpec
from .kernels import KernelKind, as_kind
from .qrs import PanTompkinsParams

__all__ = ["Config", "ConfigError", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class Config:
    kernel: KernelKind = KernelKind.GAUSSIAN
    p_fa: float = 0.05
    h_min: float | None = None  # None: 0.01 x data range
    h_max: float | None = None  # None: data range
    h_steps: int = 40
    h_scale: str = "log"
    per_axis: bool = False
    grid_size: int = 128
    margin_factor: float = 3.0
    splits: SplitSpec = field(default_factory=lambda: SplitSpec(0.6, 0.2, 0.2))
    trials: int = 20
    seed: int = 0
    fs: float = 500.0
    pre: int = 5000
    post: int = 2500
    hp_cutoff: float = 0.5
    normalization: str = "zscore"
    label_window: int = LABEL_WINDOW
    pt_band_low: float = 5.0
    pt_band_high: float = 15.0
    pt_mwi_ms: float = 150.0
    pt_refractory_ms: float = 200.0
    pt_twave_ms: float = 360.0
    pt_searchback: float = 1.66

    def __post_init__(self):
        object.__setattr__(self, "kernel", as_kind(self.kernel))
        if not 0 < self.p_fa < 1:
            raise ConfigError(f"p_fa must lie in (0, 1), got {self.p_fa}")
        if self.h_scale not in ("log", "linear"):
            raise ConfigError(f"h_scale must be 'log' or 'linear', got {self.h_scale!r}")
        if (self.h_min is None) != (self.h_max is None):
            raise ConfigError("set both h_min and h_max, or neither")
        if self.h_min is not None:
            bandwidth_grid(self.h_min, self.h_max, self.h_steps, self.h_scale == "log")
        checks = {
            "h_steps": self.h_steps >= 1,
            "grid_size": self.grid_size >= 2,
            "margin_factor": self.margin_factor >= 0,
            "trials": self.trials >= 1,
            "fs": self.fs > 0,
            "pre": self.pre >= 0,
            "post": self.post >= 0,
            "hp_cutoff": 0 < self.hp_cutoff < self.fs / 2,
            "label_window": self.label_window >= 1,
            "pt_band_low": 0 < self.pt_band_low < self.pt_band_high < self.fs / 2,
            "pt_mwi_ms": self.pt_mwi_ms > 0,
            "pt_refractory_ms": self.pt_refractory_ms > 0,
            "pt_twave_ms": self.pt_twave_ms > 0,
            "pt_searchback": self.pt_searchback > 1,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise ConfigError(f"invalid value for {', '.join(bad)}")
        if self.normalization not in ("zscore", "minmax"):
            raise ConfigError(f"normalization must be 'zscore' or 'minmax', got {self.normalization!r}")

    def h_grid(self):
        """Explicit candidate grid, or ``None`` to use the data-driven default."""
        if self.h_min is None:
            return None
        return bandwidth_grid(self.h_min, self.h_max, self.h_steps, self.h_scale == "log")

    def pan_tompkins(self) -> PanTompkinsParams:
        return PanTompkinsParams(
            band_low=self.pt_band_low,
            band_high=self.pt_band_high,
            mwi_ms=self.pt_mwi_ms,
            refractory_ms=self.pt_refractory_ms,
            twave_ms=self.pt_twave_ms,
            searchback_factor=self.pt_searchback,
        )

    def replace(self, **changes) -> Config:
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


_PARSERS = {
    "kernel": as_kind,
    "splits": SplitSpec.parse,
    "per_axis": _bool,
    "h_scale": str.strip,
    "normalization": str.strip,
}


def _converter(f: dataclasses.Field):
    if f.name in _PARSERS:
        return _PARSERS[f.name]
    kind = str(f.type)
    if kind.startswith("int"):
        return int
    if kind.startswith("float"):
        return float
    raise AssertionError(f"no parser for {f.name}")


def parse_config(text: str, source: str = "<config>") -> Config:
    known = {f.name: f for f in fields(Config)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _converter(known[key])(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    try:
        return Config(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> Config:
    with open(path) as fh:
        return parse_config(fh.read(), str(path))
