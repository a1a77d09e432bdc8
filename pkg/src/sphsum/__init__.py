"""Spherical transforms of unitarily invariant Hermitian random matrices.

Spherical functions, forward/inverse transforms, closed-form ensemble
transforms, sums of independent invariant matrices, biorthogonal systems
and correlation kernels, with Monte Carlo samplers as oracles.
"""

__version__ = "0.1.0"

from .biorth import build_biorth, kernel, transform_P, transform_Q, transformed_kernel
from .detkit import andreief_det, confluent_det_ratio, det_ratio, divided_differences, vandermonde
from .ensembles import (
    DPE,
    GUE,
    LUE,
    PE,
    Fixed,
    as_pe,
    ensemble_from_json,
    joint_eigen_density,
    matrix_density,
    transform_of,
)
from .mc import ks_distance, sample_ensemble, sample_gue, sample_lue, sample_sum
from .spherical import haar_unitary, spherical_phi, spherical_phi_mc
from .sums import add_dpe, add_gue, add_lue, sum_density, summed_ensemble
from .transform import evaluate, forward_numeric, inverse, multiply
from .weights import convolve, gaussian, laguerre_weight, weight_from_json

__all__ = [
    "__version__",
    "GUE", "LUE", "PE", "DPE", "Fixed",
    "as_pe", "ensemble_from_json", "joint_eigen_density", "matrix_density", "transform_of",
    "spherical_phi", "spherical_phi_mc", "haar_unitary",
    "evaluate", "forward_numeric", "inverse", "multiply",
    "add_gue", "add_lue", "add_dpe", "sum_density", "summed_ensemble",
    "build_biorth", "kernel", "transformed_kernel", "transform_P", "transform_Q",
    "sample_ensemble", "sample_gue", "sample_lue", "sample_sum", "ks_distance",
    "andreief_det", "confluent_det_ratio", "det_ratio", "divided_differences", "vandermonde",
    "convolve", "gaussian", "laguerre_weight", "weight_from_json",
]
