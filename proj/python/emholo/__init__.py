"""Multiplicative EM reconstruction for lensless in-line holography.

Grids are 2-D numpy arrays indexed [y, x]. Lengths are in meters.
"""

from ._emholo import (
    ConfigError,
    Error,
    IoError,
    NumericError,
    OpticalConfig,
    Padding,
    add_poisson_noise,
    autofocus,
    backpropagate,
    baseline_reconstruct,
    config_keys,
    focus_metric,
    kernel_sums,
    median_filter,
    mse,
    phantom,
    photon_scale_for_mean_counts,
    propagate,
    psnr,
    psnr_from_mse,
    quality_report,
    reconstruct_complex,
    reconstruct_real,
    reference_upper_bound,
    resolution_limits,
    run,
    set_quiet,
    simulate,
    ssim,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "Error",
    "IoError",
    "NumericError",
    "OpticalConfig",
    "Padding",
    "add_poisson_noise",
    "autofocus",
    "backpropagate",
    "baseline_reconstruct",
    "config_keys",
    "focus_metric",
    "kernel_sums",
    "median_filter",
    "mse",
    "phantom",
    "photon_scale_for_mean_counts",
    "propagate",
    "psnr",
    "psnr_from_mse",
    "quality_report",
    "reconstruct_complex",
    "reconstruct_real",
    "reference_upper_bound",
    "resolution_limits",
    "run",
    "set_quiet",
    "simulate",
    "ssim",
]
