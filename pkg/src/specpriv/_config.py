"""Numerical tolerances shared across modules."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # eigensolver
    jacobi_offdiag: float = 1e-12  # relative to ||L||_F
    jacobi_max_sweeps: int = 100
    eig: float = 1e-8
    # calibration
    bisect: float = 1e-6
    bracket_doublings: int = 200
    # quadrature
    quad: float = 1e-10
    quad_max_depth: int = 60
    # bound optimisation
    golden: float = 1e-6
    alpha_max: float = 64.0
    # analysis guards
    div_floor: float = 1e-9
    rho1_series_band: float = 1e-6
    # generators
    er_max_retries: int = 1000


DEFAULTS = Tolerances()
