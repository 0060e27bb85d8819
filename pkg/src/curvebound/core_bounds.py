# core_bounds.py
# ---------------------------------------------------
# The Bound Function Phi_t and its Kernel
#
# Both branches of Phi_t factor through one analytic kernel
#
#     F(w) = sqrt(w) coth(sqrt(w))      w > 0
#     F(w) = sqrt(-w) cot(sqrt(-w))     w < 0,   F(0) = 1
#
# evaluated at w = rho^2 t^2 (1 - x), so that
#
#     Phi_t(x) = (rho/2)(x - 2) + F(w)/t
#
# for either sign of rho and on both sides of x = 1. Near w = 0 the kernel,
# its derivative and the prefactor S(w) = sinh(sqrt w)/sqrt w are summed from
# their Maclaurin series; for w > 1 Phi_t is evaluated in a rearranged form
# that avoids the cancellation between (rho/2)(x - 2) and F(w)/t.
# ---------------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import bernoulli, factorial

from .errors import DomainError, ParameterError
from .validators import InputValidator

SERIES_THRESHOLD = 1e-4
PRIME_SERIES_THRESHOLD = 0.05
STABLE_THRESHOLD = 1.0

_SERIES_TERMS = 6
_PRIME_SERIES_TERMS = 10


def _kernel_coefficients(terms: int) -> np.ndarray:
    # sqrt(w) coth(sqrt(w)) = sum_k 2^{2k} B_{2k} w^k / (2k)!
    k = np.arange(terms)
    b = bernoulli(2 * terms)[2 * k]
    return (4.0**k) * b / factorial(2 * k, exact=False)


_F_COEFFS = _kernel_coefficients(_SERIES_TERMS)
_F_PRIME_COEFFS = P.polyder(_kernel_coefficients(_PRIME_SERIES_TERMS + 1))
_S_COEFFS = 1.0 / factorial(2 * np.arange(_SERIES_TERMS) + 1, exact=False)


# ---------------------------------------------------
# Domain Types
# ---------------------------------------------------

@dataclass(frozen=True)
class CurvatureDimension:
    """
    The pair (rho, n) of a CD(rho, n) condition.

    Attributes:
        rho (float): Curvature lower bound, any finite sign.
        n (float): Dimension parameter, at least 1.
    """

    rho: float
    n: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", InputValidator.validate_finite(self.rho, "rho"))
        object.__setattr__(self, "n", InputValidator.validate_dimension(self.n))


@dataclass(frozen=True)
class BoundQuery:
    """An evaluation point (t, x) of Phi_t."""

    t: float
    x: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", InputValidator.validate_time(self.t))
        object.__setattr__(self, "x", float(self.x))

    def kernel_argument(self, rho: float) -> "KernelArgument":
        return KernelArgument.of(rho, self.t, self.x)


@dataclass(frozen=True)
class KernelArgument:
    """The unified kernel argument w = rho^2 t^2 (1 - x)."""

    w: float

    @classmethod
    def of(cls, rho: float, t: float, x: float) -> "KernelArgument":
        return cls(rho * rho * t * t * (1.0 - x))

    @property
    def bounded(self) -> bool:
        return self.w > -math.pi**2


# ---------------------------------------------------
# Kernel F, its derivative and the prefactor S
# ---------------------------------------------------

def _inv_expm1(u: float) -> float:
    # 1 / (e^u - 1) for u > 0 without overflow
    return -math.exp(-u) / math.expm1(-u)


def _inv_sinh_sq(y: float) -> float:
    q = math.exp(-2.0 * y)
    return 4.0 * q / math.expm1(-2.0 * y) ** 2


def eval_F(w: float) -> float:
    """
    Evaluates the kernel F(w).

    Args:
        w (float): Kernel argument, w > -pi^2.

    Returns:
        float: F(w).

    Raises:
        DomainError: When w <= -pi^2.
    """
    w = InputValidator.validate_kernel_argument(w)
    if abs(w) < SERIES_THRESHOLD:
        return float(P.polyval(w, _F_COEFFS))
    if w > 0.0:
        y = math.sqrt(w)
        return y / math.tanh(y)
    y = math.sqrt(-w)
    return y * math.cos(y) / math.sin(y)


def eval_F_prime(w: float) -> float:
    """
    Evaluates F'(w); F'(0) = 1/3.

    The closed forms are coth(y)/(2y) - 1/(2 sinh^2 y) for w = y^2 > 0 and
    1/(2 sin^2 y) - cos(y)/(2y sin y) for w = -y^2 < 0. Both lose digits to
    cancellation near 0, so the series covers |w| < PRIME_SERIES_THRESHOLD.

    Raises:
        DomainError: When w <= -pi^2.
    """
    w = InputValidator.validate_kernel_argument(w)
    if abs(w) < PRIME_SERIES_THRESHOLD:
        return float(P.polyval(w, _F_PRIME_COEFFS))
    if w > 0.0:
        y = math.sqrt(w)
        return 1.0 / (2.0 * y * math.tanh(y)) - 0.5 * _inv_sinh_sq(y)
    y = math.sqrt(-w)
    s = math.sin(y)
    return 1.0 / (2.0 * s * s) - math.cos(y) / (2.0 * y * s)


def eval_S(w: float) -> float:
    """
    Evaluates S(w) = sinh(sqrt w)/sqrt w, continued by sin(sqrt(-w))/sqrt(-w).

    S is entire; it returns +inf once sinh overflows.
    """
    w = float(w)
    if abs(w) < SERIES_THRESHOLD:
        return float(P.polyval(w, _S_COEFFS))
    if w > 0.0:
        y = math.sqrt(w)
        if y > 709.0:
            return math.inf
        return math.sinh(y) / y
    y = math.sqrt(-w)
    return math.sin(y) / y


# ---------------------------------------------------
# Phi_t and its relatives
# ---------------------------------------------------

def domain_limit(rho: float, t: float) -> float:
    """
    Returns the admissible upper limit 1 + pi^2/(rho^2 t^2) for x.

    For rho = 0 there is no limit and +inf is returned.
    """
    t = InputValidator.validate_time(t)
    if rho == 0.0:
        return math.inf
    return 1.0 + math.pi**2 / (rho * rho * t * t)


def _checked(rho: float, t: float, x: float) -> tuple[float, float, float]:
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    x = InputValidator.validate_phi_argument(rho, t, x)
    return rho, t, x


def eval_phi(rho: float, t: float, x: float) -> float:
    """
    Evaluates Phi_t(x) for a non-zero curvature rho.

    Args:
        rho (float): Curvature lower bound, non-zero.
        t (float): Time, t > 0.
        x (float): Normalized Laplacian ratio, x < 1 + pi^2/(rho^2 t^2).

    Returns:
        float: Phi_t(x).

    Raises:
        ParameterError: When rho = 0 or t <= 0.
        DomainError: When x is at or beyond the domain limit.
    """
    rho, t, x = _checked(rho, t, x)
    w = rho * rho * t * t * (1.0 - x)
    if w <= STABLE_THRESHOLD:
        return 0.5 * rho * (x - 2.0) + eval_F(w) / t
    root = math.sqrt(1.0 - x)
    y = abs(rho) * t * root
    excess = 2.0 * abs(rho) * root * _inv_expm1(2.0 * y)
    if rho > 0.0:
        base = -0.5 * rho * (x / (1.0 + root)) ** 2
    else:
        base = -0.5 * rho * (1.0 + root) ** 2
    return base + excess


def eval_phi_prime(rho: float, t: float, x: float) -> float:
    """
    Evaluates Phi_t'(x) = rho/2 - rho^2 t F'(w).

    Raises:
        ParameterError: When rho = 0 or t <= 0.
        DomainError: When x is at or beyond the domain limit.
    """
    rho, t, x = _checked(rho, t, x)
    w = rho * rho * t * t * (1.0 - x)
    if w <= STABLE_THRESHOLD:
        return 0.5 * rho - rho * rho * t * eval_F_prime(w)
    root = math.sqrt(1.0 - x)
    y = abs(rho) * t * root
    if rho > 0.0:
        lead = -0.5 * rho * x / ((1.0 + root) * root)
    else:
        lead = 0.5 * rho - abs(rho) / (2.0 * root)
    tail = _inv_expm1(2.0 * y) / y - 0.5 * _inv_sinh_sq(y)
    return lead - rho * rho * t * tail


def eval_phi_tilde(rho: float, t: float, x: float) -> float:
    """Evaluates Phi~_t(x) = Phi_t(x) - rho x + 2 rho."""
    return eval_phi(rho, t, x) - rho * x + 2.0 * rho


def eval_phi_limit(rho: float, x: float) -> float:
    """
    Evaluates the large-time limit (rho/2)(x - 2 - 2 sqrt(1 - x)) for rho < 0, x <= 1.

    coth(rho t sqrt(1 - x)) tends to -1 for rho < 0, and Phi_t decreases to this curve.

    Raises:
        ParameterError: When rho >= 0.
        DomainError: When x > 1.
    """
    rho = InputValidator.validate_finite(rho, "rho")
    if rho >= 0.0:
        raise ParameterError(f"the large-time limit curve needs rho < 0, got {rho}")
    if x > 1.0:
        raise DomainError(f"the large-time limit curve is defined for x <= 1, got x={x}")
    return 0.5 * rho * (x - 2.0 - 2.0 * math.sqrt(1.0 - x))


def literal_phi(rho: float, t: float, x: float) -> float:
    """
    Evaluates Phi_t from its two-branch coth/cot form, without the kernel.

    Undefined at x = 1 exactly; used to cross-check the kernel route.
    """
    rho, t, x = _checked(rho, t, x)
    if x < 1.0:
        root = math.sqrt(1.0 - x)
        return 0.5 * rho * (x - 2.0 + 2.0 * root / math.tanh(rho * t * root))
    root = math.sqrt(x - 1.0)
    return 0.5 * rho * (x - 2.0 + 2.0 * root / math.tan(rho * t * root))


def liyau_rhs(cd: CurvatureDimension, t: float, x: float) -> float:
    """
    Returns the right-hand side (n/2) Phi_t(x) of the improved Li-Yau bound.

    Args:
        cd (CurvatureDimension): The CD(rho, n) pair, rho non-zero.
        t (float): Time.
        x (float): Normalized Laplacian ratio 4 L P_t f / (n rho P_t f).

    Returns:
        float: The upper bound for Gamma(P_t f)/(P_t f)^2.
    """
    return 0.5 * cd.n * eval_phi(cd.rho, t, x)
