"""Spectra, exceptional points and PT phase boundaries of the non-Hermitian
two-site Hubbard model (the "hydrogen molecule")."""

__version__ = "0.1.0"

from .fock import (DimerParams, FockState, FockVector, HamiltonianMatrix, SectorViolation,
                   StateVector, apply_annihilation, apply_creation, build_hamiltonian)
from .symmetry import SzBlocks, check_pt_characteristic, check_pt_similarity, split_sz
from .spectra import (CubicCoefficients, Spectrum, cardano_spectrum, closed_form_spectrum,
                      cubic_discriminant, oracle_spectrum, reduced_cubic, sz0_eigenvectors,
                      tls_eigenvalues)
from .epfinder import BoundaryCurve, EpRecord, scan_eps, trace_boundary

__all__ = [
    "DimerParams", "FockState", "FockVector", "HamiltonianMatrix", "SectorViolation",
    "StateVector", "apply_annihilation", "apply_creation", "build_hamiltonian",
    "SzBlocks", "check_pt_characteristic", "check_pt_similarity", "split_sz",
    "CubicCoefficients", "Spectrum", "cardano_spectrum", "closed_form_spectrum",
    "cubic_discriminant", "oracle_spectrum", "reduced_cubic", "sz0_eigenvectors",
    "tls_eigenvalues", "BoundaryCurve", "EpRecord", "scan_eps", "trace_boundary",
]
