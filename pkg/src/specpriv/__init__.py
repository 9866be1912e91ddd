"""Differentially private Laplacian spectra with a bounded Laplace mechanism."""

from specpriv._kernels import BACKEND
from specpriv.graph import Graph, Spectrum, generate, parse_edge_list, read_edge_list, spectrum
from specpriv.mechanism import (
    CalibratedMechanism,
    InfeasibleCalibration,
    PrivacyError,
    PrivacySpec,
    PrivateRelease,
    calibrate,
    privatize_lambda2,
    privatize_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CalibratedMechanism",
    "Graph",
    "InfeasibleCalibration",
    "PrivacyError",
    "PrivacySpec",
    "PrivateRelease",
    "Spectrum",
    "calibrate",
    "generate",
    "parse_edge_list",
    "privatize_lambda2",
    "privatize_spectrum",
    "read_edge_list",
    "spectrum",
]
