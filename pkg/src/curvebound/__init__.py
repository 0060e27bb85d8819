# __init__.py
# ---------------------------------------------------
# curvebound
#
# Evaluation of the improved Li-Yau bound under a CD(rho, n) condition, its
# roots and Harnack exponents, comparison with the classical bounds, and a
# heat-semigroup oracle on the model spaces.
# ---------------------------------------------------

from .core_bounds import CurvatureDimension, eval_phi, eval_phi_prime, eval_phi_tilde, liyau_rhs
from .roots import find_roots, ultracontractive_envelope
from .psi_harnack import HarnackQuery, harnack_exponent, legendre, psi
from .classical_compare import dominance_report
from .heat_lab import HeatSolver, ModelSpace, RadialGrid
from .scenarios import VerificationManager
from .logging import async_log_event


__all__ = [
    "CurvatureDimension",
    "eval_phi",
    "eval_phi_prime",
    "eval_phi_tilde",
    "liyau_rhs",
    "find_roots",
    "ultracontractive_envelope",
    "HarnackQuery",
    "harnack_exponent",
    "legendre",
    "psi",
    "dominance_report",
    "HeatSolver",
    "ModelSpace",
    "RadialGrid",
    "VerificationManager",
    "async_log_event",
]

__version__ = "0.1.0"
