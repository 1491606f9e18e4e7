"""Density estimation and deconvolution with thresholded Meyer wavelet coefficients.

The whole pipeline runs on Fourier coefficients: empirical characteristic
function of the samples, per-scale folded DFTs for the wavelet coefficients,
data-driven random thresholds, and synthesis back to a grid.
"""

__version__ = "0.1.0"

from .estimator import MeyerDensityEstimator, RescaleMap, postprocess
from .harness import ExperimentConfig, RiskReport, emit_report, run_experiment
from .meyer import BandTable, BasisSpec, build_band_table, meyer_scaling_ft, meyer_wavelet_ft
from .spectral import FourierGrid, IllPosedBand, NoiseModel, deconvolution_weights, empirical_fourier
from .threshold import (
    estimate_variance,
    hard_threshold,
    level_threshold,
    random_threshold,
    select_hyperparams_deconv,
    select_hyperparams_direct,
)
from .transform import CoeffSet, forward_fast, forward_reference, reconstruct, synthesize_fourier
from .truth import TruthModel, oracle_quantities, oracle_risk

__all__ = [
    "__version__",
    "BandTable",
    "BasisSpec",
    "CoeffSet",
    "ExperimentConfig",
    "FourierGrid",
    "IllPosedBand",
    "MeyerDensityEstimator",
    "NoiseModel",
    "RescaleMap",
    "RiskReport",
    "TruthModel",
    "build_band_table",
    "deconvolution_weights",
    "emit_report",
    "empirical_fourier",
    "estimate_variance",
    "forward_fast",
    "forward_reference",
    "hard_threshold",
    "level_threshold",
    "meyer_scaling_ft",
    "meyer_wavelet_ft",
    "oracle_quantities",
    "oracle_risk",
    "postprocess",
    "random_threshold",
    "reconstruct",
    "run_experiment",
    "select_hyperparams_deconv",
    "select_hyperparams_direct",
    "synthesize_fourier",
]
