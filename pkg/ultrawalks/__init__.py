"""Ultrametric random walks: p-adic generators, classical and quantum walks, limiting distributions."""

from .padic import GroupSpec, PadicValuation, norm_of_difference, sphere_size, valuation_matrix
from .kernel import KernelProfile, SymbolKind, bessel_profile, gamma_p, log_bessel_profile, tabulated_profile
from .generator import AdjacencySpec, GeneratorMatrix, build_adjacency_generator, build_generator, validate_generator
from .spectral import SpectralData, closed_form_spectrum, eigendecompose, stationary_distribution
from .dynamics import WalkKind, WalkSnapshot, classical_transition, heat_kernel_value, quantum_transition
from .limiting import LimitingDistribution, alpha_sweep, compare, limiting_quadrature, limiting_spectral
from .config import ExperimentConfig, load_config
from .experiment import Manifest, run
from .errors import (
    ConfigError,
    DomainError,
    KernelInvalidError,
    MassViolationError,
    NumericError,
    SingularParameterError,
    UltrawalksError,
)


__all__ = ["GroupSpec", "PadicValuation", "norm_of_difference", "sphere_size", "valuation_matrix",
    "KernelProfile",
    "SymbolKind",
    "bessel_profile",
    "gamma_p",
    "log_bessel_profile",
    "tabulated_profile",
    "AdjacencySpec",
    "GeneratorMatrix",
    "build_adjacency_generator",
    "build_generator",
    "validate_generator",
    "SpectralData",
    "closed_form_spectrum",
    "eigendecompose",
    "stationary_distribution",
    "WalkKind",
    "WalkSnapshot",
    "classical_transition",
    "heat_kernel_value",
    "quantum_transition",
    "LimitingDistribution",
    "alpha_sweep",
    "compare",
    "limiting_quadrature",
    "limiting_spectral",
    "ExperimentConfig",
    "load_config",
    "Manifest",
    "run",
    "ConfigError",
    "DomainError",
    "KernelInvalidError",
    "MassViolationError",
    "NumericError",
    "SingularParameterError",
    "UltrawalksError",
]
