"""Spectra, Lyapunov exponents and eigenvalue flow for the non-Hermitian
Anderson model on a ring."""

__version__ = "0.1.0"

from .bands import BandStructure, band_rates, band_structure
from .errors import HatanoError
from .potential import DistributionSpec, PotentialSample, load_sample, \
    sample_potential, save_sample, zero_potential
from .spectrum import SpectralParams, SpectrumResult, critical_g, eigvals_g, \
    eigvals_hermitian, flow
from .transfer import GammaProfile, gamma_profile, lyapunov_mc, \
    transfer_product
from .verify import VerificationReport

__all__ = [
    "BandStructure", "DistributionSpec", "GammaProfile", "HatanoError",
    "PotentialSample", "SpectralParams", "SpectrumResult",
    "VerificationReport", "band_rates", "band_structure", "critical_g",
    "eigvals_g", "eigvals_hermitian", "flow", "gamma_profile", "load_sample",
    "lyapunov_mc", "sample_potential", "save_sample", "transfer_product",
    "zero_potential",
]
