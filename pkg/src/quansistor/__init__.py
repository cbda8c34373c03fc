"""Numerics for four-level omega-circulant cores coupled to tight-binding leads."""

from .errors import NumericalError, QuansistorError, ValidationError
from .linalg import DEFAULT_TOL, Tolerances, expm_hermitian, hermitian_eig, log10_abs_det
from .omega import OmegaParams, build_hamiltonian, fourier_basis, spectrum

__all__ = [
    "DEFAULT_TOL",
    "NumericalError",
    "OmegaParams",
    "QuansistorError",
    "Tolerances",
    "ValidationError",
    "build_hamiltonian",
    "expm_hermitian",
    "fourier_basis",
    "hermitian_eig",
    "log10_abs_det",
    "spectrum",
]
