"""Kernel density level sets with conformal thresholds for bradycardia onset detection in ECG R-peaks."""

from .bandwidth import SingularBandwidthError, select_bandwidth
from .conformal import PredictionSet, fit_prediction_set, p_value_field, test_onsets
from .density import DensityGrid, kde_grid, kde_product, kde_univariate
from .ecg import parse_header, remove_baseline_wander, segment_events
from .evaluation import ConfusionMatrix, SplitSpec, compute_epe, compute_metrics, monte_carlo, run_trial
from .kernels import KernelKind, eval_convolution, eval_kernel, kernel_moments
from .qrs import detect_r_peaks, normalize_peaks
from .synthetic import SyntheticSpec, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "ConfusionMatrix",
    "DensityGrid",
    "KernelKind",
    "PredictionSet",
    "SingularBandwidthError",
    "SplitSpec",
    "SyntheticSpec",
    "compute_epe",
    "compute_metrics",
    "detect_r_peaks",
    "eval_convolution",
    "eval_kernel",
    "fit_prediction_set",
    "generate_synthetic",
    "kde_grid",
    "kde_product",
    "kde_univariate",
    "kernel_moments",
    "monte_carlo",
    "normalize_peaks",
    "p_value_field",
    "parse_header",
    "remove_baseline_wander",
    "run_trial",
    "segment_events",
    "select_bandwidth",
    "test_onsets",
]
