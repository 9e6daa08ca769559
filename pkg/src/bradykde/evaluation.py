"""Splitting, onset labelling, confusion-matrix metrics and Monte Carlo trials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bandwidth import default_bandwidth_grid, select_bandwidth
from .conformal import fit_prediction_set, test_onsets
from .ecg import DEFAULT_PRE
from .kernels import KernelKind, as_kind
from .qrs import normalize_peaks

__all__ = [
    "SplitSpec",
    "STANDARD_SPLITS",
    "ConfusionMatrix",
    "MetricsReport",
    "PeakTable",
    "TrialResult",
    "MonteCarloResult",
    "shuffle_split",
    "label_bradycardia",
    "compute_metrics",
    "compute_epe",
    "run_trial",
    "monte_carlo",
    "LABEL_WINDOW",
]

LABEL_WINDOW = 1500


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float
    val_frac: float
    test_frac: float

    def __post_init__(self):
        fr = (self.train_frac, self.val_frac, self.test_frac)
        if not all(0.0 < f < 1.0 for f in fr):
            raise ValueError(f"split fractions must lie in (0, 1), got {fr}")
        if abs(sum(fr) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {sum(fr)}")

    @classmethod
    def parse(cls, text: str) -> SplitSpec:
        """From ``"0.6,0.2,0.2"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated fractions, got {text!r}")
        return cls(*(float(p) for p in parts))

    def __str__(self) -> str:
        return f"{self.train_frac:g},{self.val_frac:g},{self.test_frac:g}"


STANDARD_SPLITS = (SplitSpec(0.6, 0.2, 0.2), SplitSpec(0.7, 0.2, 0.1), SplitSpec(0.7, 0.1, 0.2))


def shuffle_split(points, spec: SplitSpec, seed: int):
    """Seeded shuffle, then test/validation get floor(frac * n) items and train the rest."""
    items = list(points)
    n = len(items)
    n_val = math.floor(spec.val_frac * n + 1e-9)
    n_test = math.floor(spec.test_frac * n + 1e-9)
    n_train = n - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(f"split {spec} of {n} items leaves an empty set ({n_train}, {n_val}, {n_test})")
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [items[i] for i in order]
    return shuffled[:n_train], shuffled[n_train : n_train + n_val], shuffled[n_train + n_val :]


def label_bradycardia(peak_t, onset, u: float, window: int = LABEL_WINDOW):
    """True when onset < peak_t < onset + ceil(u * window). Vectorises over ``peak_t``."""
    if not 0.0 < u <= 1.0:
        raise ValueError(f"u must lie in (0, 1], got {u}")
    t = np.asarray(peak_t)
    out = (onset < t) & (t < onset + math.ceil(u * window))
    return bool(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with the onset (outside the hull) as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion-matrix counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_labels(cls, actual, predicted) -> ConfusionMatrix:
        a = np.asarray(actual, dtype=bool)
        p = np.asarray(predicted, dtype=bool)
        return cls(int(np.sum(a & p)), int(np.sum(~a & p)), int(np.sum(a & ~p)), int(np.sum(~a & ~p)))

    def __add__(self, other: ConfusionMatrix) -> ConfusionMatrix:
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class MetricsReport:
    """Derived metrics; a field is ``None`` when its denominator is zero."""

    sensitivity: float | None
    precision: float | None
    fdr: float | None
    for_rate: float | None
    accuracy: float | None
    f1: float | None
    epe: float | None

    @property
    def undefined(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.__dict__.items() if v is None)


def _ratio(num: float, den: float) -> float | None:
    return num / den if den > 0 else None


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    total = cm.total
    return MetricsReport(
        sensitivity=_ratio(cm.tp, cm.tp + cm.fn),
        precision=_ratio(cm.tp, cm.tp + cm.fp),
        fdr=_ratio(cm.fp, cm.tp + cm.fp),
        for_rate=_ratio(cm.fn, cm.fn + cm.tn),
        accuracy=_ratio(cm.tp + cm.tn, total),
        f1=_ratio(cm.tp, cm.tp + 0.5 * (cm.fp + cm.fn)),
        epe=_ratio(cm.fp + cm.fn, total),
    )


def compute_epe(cm: ConfusionMatrix, n_tested: int) -> float:
    """False classifications (FP + FN) over the number of tested R-tuples."""
    if n_tested != cm.total:
        raise ValueError(f"n_tested={n_tested} does not match the confusion-matrix total {cm.total}")
    if n_tested < 1:
        raise ValueError("n_tested must be positive")
    return (cm.fp + cm.fn) / n_tested


@dataclass(frozen=True)
class PeakTable:
    """All R-tuples of one recording.

    ``t_sample`` is the peak index inside its event and ``onset_offset`` the
    onset's index inside every event. When ``truth`` is given (synthetic data)
    it supplies the actual labels instead of the onset-window rule.
    """

    event_id: np.ndarray
    t_sample: np.ndarray
    amplitude: np.ndarray
    fs: float
    onset_offset: int = DEFAULT_PRE
    truth: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.event_id)
        if len(self.t_sample) != n or len(self.amplitude) != n:
            raise ValueError("event_id, t_sample and amplitude must have equal length")
        if self.truth is not None and len(self.truth) != n:
            raise ValueError("truth labels must align with the peaks")
        if not self.fs > 0:
            raise ValueError("fs must be positive")

    def __len__(self) -> int:
        return len(self.event_id)

    def peaks(self, idx=slice(None)) -> np.ndarray:
        return np.column_stack([np.asarray(self.t_sample, float)[idx], np.asarray(self.amplitude, float)[idx]])


@dataclass(frozen=True)
class TrialResult:
    cm: ConfusionMatrix
    h_cv: float | tuple[float, ...]
    c_k: float
    seed: int
    split: SplitSpec

    @property
    def epe(self) -> float:
        return compute_epe(self.cm, self.cm.total)


def run_trial(
    table: PeakTable,
    spec: SplitSpec,
    seed: int,
    kind: KernelKind | str = KernelKind.GAUSSIAN,
    h_grid=None,
    p_fa: float = 0.05,
    grid_size: int = 128,
    margin_factor: float = 3.0,
    normalization: str = "zscore",
    window: int = LABEL_WINDOW,
    per_axis: bool = False,
) -> TrialResult:
    """One shuffle/split/fit/test cycle.

    The bandwidth is cross-validated on the validation split; the density,
    threshold and hull come from the training split; every test peak is
    predicted as an onset when it lies outside the hull.
    """
    kind = as_kind(kind)
    n = len(table)
    train, val, test = (np.asarray(s, dtype=int) for s in shuffle_split(range(n), spec, seed))
    if np.intersect1d(train, test).size or np.intersect1d(val, test).size:
        raise AssertionError("training/validation data leaked into the test set")
    if val.size < 2:
        raise ValueError("validation split needs at least 2 peaks for cross-validation")

    train_xy, transform = normalize_peaks(table.peaks(train), table.fs, method=normalization)
    val_xy = transform.apply(table.peaks(val))
    test_xy = transform.apply(table.peaks(test))

    grid = default_bandwidth_grid(val_xy) if h_grid is None else h_grid
    h_cv, _ = select_bandwidth(val_xy, kind, grid, per_axis=per_axis)
    pset = fit_prediction_set(train_xy, kind, h_cv, p_fa, grid_size, margin_factor)
    predicted = test_onsets(pset, test_xy)

    if table.truth is not None:
        actual = np.asarray(table.truth, dtype=bool)[test]
    else:
        # One u in (0, 1] per event per trial, drawn in event-id order.
        events = np.unique(np.asarray(table.event_id))
        u = 1.0 - np.random.default_rng([seed, 1]).random(events.size)
        u_of = dict(zip(events.tolist(), u.tolist()))
        t = np.asarray(table.t_sample, float)[test]
        ev = np.asarray(table.event_id)[test]
        actual = np.array(
            [label_bradycardia(ti, table.onset_offset, u_of[e], window) for ti, e in zip(t, ev.tolist())],
            dtype=bool,
        )
    cm = ConfusionMatrix.from_labels(actual, predicted)
    h_out = tuple(float(v) for v in h_cv) if per_axis else float(h_cv)
    return TrialResult(cm, h_out, pset.c_k, int(seed), spec)


@dataclass
class MonteCarloResult:
    records: dict[SplitSpec, list[TrialResult]] = field(default_factory=dict)

    def mean_epe(self, spec: SplitSpec) -> float:
        recs = self.records[spec]
        return sum(r.epe for r in recs) / len(recs)

    def pooled(self, spec: SplitSpec) -> ConfusionMatrix:
        recs = self.records[spec]
        out = recs[0].cm
        for r in recs[1:]:
            out = out + r.cm
        return out


def monte_carlo(
    table: PeakTable,
    specs=STANDARD_SPLITS,
    trials: int = 20,
    base_seed: int = 0,
    **trial_kw,
) -> MonteCarloResult:
    """``trials`` independent runs per split spec; trial i uses seed ``base_seed + i``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(specs, SplitSpec):
        specs = [specs]
    out = MonteCarloResult()
    for spec in specs:
        out.records[spec] = [run_trial(table, spec, base_seed + i, **trial_kw) for i in range(trials)]
    return out
