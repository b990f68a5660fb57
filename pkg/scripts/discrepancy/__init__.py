"""
Domain-discrepancy diagnostics: window sparsity, signal variance, H-divergence.
"""

from .divergence import (
    DEFAULT_FEATURES,
    MIN_CROPS,
    DivergenceReport,
    baseline_domain_classifier,
    crop_features,
    fit_domain_classifier,
    h_divergence,
    random_crops,
)
from .histogram import (
    DEFAULT_BINS,
    HistogramAccumulator,
    NormalizedCumulativeHistogram,
    average_histograms,
    bin_edges,
    bin_indices,
    merge_accumulators,
)
from .statistics import (
    OCCUPANCY,
    as_signal,
    occupancy_accumulator,
    pairwise_variance,
    signal_variance_stats,
    variance_accumulator,
    variance_bound,
    window_occupancy_ratios,
    window_occupancy_stats,
    window_signal_variances,
)

__all__ = [
    "DEFAULT_BINS",
    "DEFAULT_FEATURES",
    "MIN_CROPS",
    "OCCUPANCY",
    "DivergenceReport",
    "HistogramAccumulator",
    "NormalizedCumulativeHistogram",
    "as_signal",
    "average_histograms",
    "baseline_domain_classifier",
    "bin_edges",
    "bin_indices",
    "crop_features",
    "fit_domain_classifier",
    "h_divergence",
    "merge_accumulators",
    "occupancy_accumulator",
    "pairwise_variance",
    "random_crops",
    "signal_variance_stats",
    "variance_accumulator",
    "variance_bound",
    "window_occupancy_ratios",
    "window_occupancy_stats",
    "window_signal_variances",
]
