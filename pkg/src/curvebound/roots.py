# roots.py
# ---------------------------------------------------
# Roots of Phi_t and Ultracontractive Envelopes
#
# For rho > 0, Phi_t has two roots xi1 < 0 < xi2; for rho < 0 it has one root
# xi in (1, 1 + pi^2/(rho^2 t^2)). This module locates them by bisection,
# provides the large- and small-time certificates for their location, and
# integrates them in time to obtain the two-sided ultracontractive envelope
# of P_t f / int f dmu together with the gradient decay bound.
# ---------------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from .config import DEFAULT_CONFIG, Config
from .core_bounds import CurvatureDimension, domain_limit, eval_phi
from .errors import ConvergenceError, ParameterError
from .logging import LOGGER, log_event
from .validators import InputValidator

MAX_BISECTIONS = 200
# past this rho t the large-time enclosures are narrower than one ulp of 4e^{-rho t}
ASYMPTOTIC_RHO_T = 45.0
_RTOL = 4.0 * np.finfo(float).eps
_XTOL = 1e-300


@dataclass(frozen=True)
class RootSet:
    """
    Roots of Phi_t.

    Attributes:
        rho (float): Curvature lower bound.
        t (float): Time.
        xi1 (Optional[float]): Negative root (rho > 0).
        xi2 (Optional[float]): Positive root (rho > 0).
        xi (Optional[float]): Unique root above 1 (rho < 0).
    """

    rho: float
    t: float
    xi1: Optional[float] = None
    xi2: Optional[float] = None
    xi: Optional[float] = None


@dataclass(frozen=True)
class Envelope:
    """Two-sided bound lower <= P_t f / int f dmu <= upper at time t."""

    lower: float
    upper: float
    t: float

    def contains(self, ratio: float) -> bool:
        return self.lower <= ratio <= self.upper


@dataclass(frozen=True)
class RootBrackets:
    """
    Large-time enclosures of xi1 and xi2 (rho > 0).

    The xi1 enclosure holds for t >= 1/(2 rho), the xi2 enclosure for t >= 6/rho;
    the flags record whether t meets each hypothesis.
    """

    xi1: Tuple[float, float]
    xi2: Tuple[float, float]
    xi1_valid: bool
    xi2_valid: bool


@dataclass(frozen=True)
class NegativeRootBracket:
    """
    The printed enclosure of the root xi for rho < 0, under three readings.

    ``lo_literal`` uses the factor 1 - 2/(rho t) with the signed rho and
    ``lo_absolute`` uses 1 - 2/(|rho| t). Both are linear in the factor and
    only the squared factor ``lo_squared``, 1 + pi^2/(rho t)^2 (1 - 2/(|rho| t))^2,
    encloses xi for every |rho| t >= 2. ``hi`` is 1 + pi^2/(rho^2 t^2) in all three.
    """

    hi: float
    lo_literal: float
    lo_absolute: float
    lo_squared: float

    def contains(self, xi: float) -> Dict[str, bool]:
        return {
            "literal": self.lo_literal <= xi <= self.hi,
            "absolute": self.lo_absolute <= xi <= self.hi,
            "squared": self.lo_squared <= xi <= self.hi,
        }


def _bisect(rho: float, t: float, lo: float, hi: float) -> float:
    try:
        return optimize.bisect(
            lambda x: eval_phi(rho, t, x), lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=MAX_BISECTIONS
        )
    except (RuntimeError, ValueError) as err:
        log_event("error", {"msg": "Bisection failed", "rho": rho, "t": t, "bracket": (lo, hi)})
        raise ConvergenceError(f"rho={rho}, t={t}, bracket=({lo}, {hi}): {err}") from err


def _bracketed(rho: float, t: float, a: float, b: float) -> Optional[float]:
    # a must lie between the roots, b outside them
    if eval_phi(rho, t, a) > 0.0 > eval_phi(rho, t, b):
        return _bisect(rho, t, b, a) if b < a else _bisect(rho, t, a, b)
    return None


def _left_root(rho: float, t: float) -> float:
    if rho * t >= 6.0:
        lo, hi = large_time_brackets(rho, t).xi1
        root = _bracketed(rho, t, 0.5 * hi, 2.0 * lo)
        if root is not None:
            return root
    lo = -1.0
    while eval_phi(rho, t, lo) >= 0.0:
        lo *= 2.0
        if lo < -1e300:
            raise ConvergenceError(f"no sign change left of 0 for rho={rho}, t={t}")
    return _bisect(rho, t, lo, 0.0)


def _right_root(rho: float, t: float) -> float:
    if rho * t >= 6.0:
        lo, hi = large_time_brackets(rho, t).xi2
        root = _bracketed(rho, t, 0.5 * lo, 2.0 * hi)
        if root is not None:
            return root
    if eval_phi(rho, t, 0.0) <= 0.0:
        raise ConvergenceError(f"Phi_t(0) underflows for rho={rho}, t={t}")
    limit = domain_limit(rho, t)
    for k in range(1, 17):
        hi = limit - limit * 10.0**-k
        if hi > 0.0 and eval_phi(rho, t, hi) < 0.0:
            return _bisect(rho, t, 0.0, hi)
    raise ConvergenceError(f"no sign change below the domain limit for rho={rho}, t={t}")


def _negative_curvature_root(rho: float, t: float) -> float:
    limit = domain_limit(rho, t)
    gap = 1e-9 * (limit - 1.0)
    hi = limit - gap
    while eval_phi(rho, t, hi) > 0.0:
        gap *= 0.1
        hi = limit - gap
        if hi <= 1.0 or gap == 0.0 or hi >= limit:
            raise ConvergenceError(f"no sign change in (1, {limit}) for rho={rho}, t={t}")
    return _bisect(rho, t, 1.0, hi)


def find_roots(rho: float, t: float) -> RootSet:
    """
    Locates the roots of Phi_t by bisection to relative width 4 eps.

    For rho t >= ASYMPTOTIC_RHO_T the roots are returned as -+4e^{-rho t},
    which the large-time enclosures pin down to rounding.

    Args:
        rho (float): Non-zero curvature lower bound.
        t (float): Time, t > 0.

    Returns:
        RootSet: xi1 and xi2 for rho > 0, xi for rho < 0.

    Raises:
        ParameterError: When rho = 0 or t <= 0.
        ConvergenceError: When a bracket cannot be formed or bisection stalls.
    """
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    if rho > 0.0 and rho * t >= ASYMPTOTIC_RHO_T:
        # Phi_t(0) ~ 2 rho e^{-2 rho t} underflows long before the roots do
        edge = 4.0 * math.exp(-rho * t)
        roots = RootSet(rho=rho, t=t, xi1=-edge, xi2=edge)
    elif rho > 0.0:
        roots = RootSet(rho=rho, t=t, xi1=_left_root(rho, t), xi2=_right_root(rho, t))
    else:
        roots = RootSet(rho=rho, t=t, xi=_negative_curvature_root(rho, t))
    LOGGER.debug("Roots of Phi_t for rho=%s, t=%s: %s", rho, t, roots)
    return roots


def check_xi2_below_one(rho: float, t: float) -> bool:
    """
    Reports whether xi2 <= 1, which holds whenever t >= 2/rho.

    Phi_t is concave and positive on (xi1, xi2) with Phi_t(0) > 0, so
    xi2 <= 1 exactly when Phi_t(1) = 1/t - rho/2 <= 0. Outside the hypothesis
    the answer is still returned, with a warning event.
    """
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    if rho < 0.0:
        raise ParameterError(f"xi2 exists only for rho > 0, got {rho}")
    if rho * t < 2.0:
        log_event("warning", {"msg": "t < 2/rho: xi2 <= 1 is not guaranteed", "rho": rho, "t": t})
    return eval_phi(rho, t, 1.0) <= 0.0


def small_time_asymptotics(rho: float, t: float) -> Tuple[float, float]:
    """
    Returns the leading small-time terms (-2/(rho t), pi^2/(rho t)^2 - 4/(rho t)).
    """
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    if rho < 0.0:
        raise ParameterError(f"small-time asymptotics need rho > 0, got {rho}")
    s = rho * t
    return -2.0 / s, math.pi**2 / (s * s) - 4.0 / s


def large_time_brackets(rho: float, t: float) -> RootBrackets:
    """
    Returns the exponential enclosures of xi1 and xi2.

    xi1 in [-4e^{-rho t} - 4e^{-2 rho t}, -4e^{-rho t} + 8 rho t e^{-2 rho t}] for t >= 1/(2 rho);
    xi2 in [ 4e^{-rho t} - 4e^{-2 rho t},  4e^{-rho t} + 8 rho t e^{-2 rho t}] for t >= 6/rho.
    """
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    if rho < 0.0:
        raise ParameterError(f"large-time brackets need rho > 0, got {rho}")
    e1 = math.exp(-rho * t)
    e2 = e1 * e1
    return RootBrackets(
        xi1=(-4.0 * e1 - 4.0 * e2, -4.0 * e1 + 8.0 * rho * t * e2),
        xi2=(4.0 * e1 - 4.0 * e2, 4.0 * e1 + 8.0 * rho * t * e2),
        xi1_valid=rho * t >= 0.5,
        xi2_valid=rho * t >= 6.0,
    )


def negative_root_bracket(rho: float, t: float) -> NegativeRootBracket:
    """
    Returns the printed enclosure 1 + pi^2/(rho^2 t^2)(1 - 2/(rho t)) <= xi <= 1 + pi^2/(rho^2 t^2).

    With T = |rho| t and theta = T sqrt(xi - 1) the root solves
    theta + 2 arctan(theta / T) = pi, so theta >= pi (1 - 2/T) once T >= 2.
    All readings of the lower end are returned; see NegativeRootBracket.
    """
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    if rho > 0.0:
        raise ParameterError(f"the single root exists only for rho < 0, got {rho}")
    if abs(rho) * t < 2.0:
        log_event("warning", {"msg": "t < 2/|rho|: outside the bracket hypothesis", "rho": rho, "t": t})
    width = math.pi**2 / (rho * rho * t * t)
    return NegativeRootBracket(
        hi=1.0 + width,
        lo_literal=1.0 + width * (1.0 - 2.0 / (rho * t)),
        lo_absolute=1.0 + width * (1.0 - 2.0 / (abs(rho) * t)),
        lo_squared=1.0 + width * (1.0 - 2.0 / (abs(rho) * t)) ** 2,
    )


# ---------------------------------------------------
# Integrated envelopes
# ---------------------------------------------------

def _tail_horizon(rho: float, t: float) -> float:
    return max(t, 6.0 / rho) + 40.0 / rho


def _integrate_root(rho: float, t: float, horizon: float, which: str, config: Config) -> float:
    def integrand(u: float) -> float:
        return getattr(find_roots(rho, u), which)

    if horizon <= t:
        return 0.0
    value, abserr = integrate.quad(
        integrand, t, horizon,
        epsrel=config.quad_epsrel, epsabs=config.quad_epsabs, limit=config.quad_limit,
    )
    LOGGER.debug("int_%s^%s %s du = %s (abserr %s)", t, horizon, which, value, abserr)
    if not math.isfinite(value):
        raise ConvergenceError(f"quadrature of {which} on [{t}, {horizon}] is not finite")
    return value


def ultracontractive_envelope(
    cd: CurvatureDimension, t: float, config: Config = DEFAULT_CONFIG
) -> Envelope:
    """
    Computes exp(-(n rho/4) int_t^inf xi2) <= P_t f / int f dmu <= exp(-(n rho/4) int_t^inf xi1).

    The integrals are taken by adaptive quadrature up to T* = max(t, 6/rho) + 40/rho;
    beyond T* the root enclosures of large_time_brackets are integrated in closed
    form, choosing in each case the side that keeps the envelope conservative.

    Args:
        cd (CurvatureDimension): CD(rho, n) with rho > 0.
        t (float): Time.
        config (Config): Quadrature settings.

    Returns:
        Envelope: The (lower, upper) pair.
    """
    rho = cd.rho
    if rho <= 0.0:
        raise ParameterError(f"ultracontractive envelope needs rho > 0, got {rho}")
    t = InputValidator.validate_time(t)
    horizon = _tail_horizon(rho, t)
    e1 = math.exp(-rho * horizon)
    e2 = e1 * e1
    # int_T^inf of -4e^{-rho u} - 4e^{-2 rho u}, and of 4e^{-rho u} + 8 rho u e^{-2 rho u}
    tail1 = -4.0 * e1 / rho - 2.0 * e2 / rho
    tail2 = 4.0 * e1 / rho + e2 * (4.0 * horizon + 2.0 / rho)
    integral1 = _integrate_root(rho, t, horizon, "xi1", config) + tail1
    integral2 = _integrate_root(rho, t, horizon, "xi2", config) + tail2
    scale = cd.n * rho / 4.0
    envelope = Envelope(lower=math.exp(-scale * integral2), upper=math.exp(-scale * integral1), t=t)
    log_event("debug", {"msg": "Ultracontractive envelope", "n": cd.n, "rho": rho, "t": t,
                        "lower": envelope.lower, "upper": envelope.upper})
    return envelope


def explicit_envelope(cd: CurvatureDimension, t: float) -> Envelope:
    """
    Returns the closed-form envelope, valid for t >= 6/rho:

        exp[-n(e^{-rho t} + (1 + 2 rho t) e^{-2 rho t}/2)] <= ratio <= exp[n(e^{-rho t} + e^{-2 rho t}/2)].

    Raises:
        HypothesisError: When t < 6/rho.
    """
    rho = cd.rho
    if rho <= 0.0:
        raise ParameterError(f"explicit envelope needs rho > 0, got {rho}")
    t = InputValidator.validate_time(t)
    InputValidator.validate_hypothesis(rho * t >= 6.0, f"t={t} < 6/rho", rho=rho, t=t)
    e1 = math.exp(-rho * t)
    e2 = e1 * e1
    return Envelope(
        lower=math.exp(-cd.n * (e1 + (1.0 + 2.0 * rho * t) * e2 / 2.0)),
        upper=math.exp(cd.n * (e1 + e2 / 2.0)),
        t=t,
    )


def gradient_decay_bound(cd: CurvatureDimension, t: float) -> float:
    """
    Returns (3 n rho / 2) e^2 e^{-2 rho t}, an upper bound for Gamma(log P_t f) when t >= 6/rho.

    Raises:
        HypothesisError: When t < 6/rho or rho <= 0.
    """
    t = InputValidator.validate_time(t)
    InputValidator.validate_hypothesis(
        cd.rho > 0.0 and cd.rho * t >= 6.0, f"need rho > 0 and t >= 6/rho, got rho={cd.rho}, t={t}",
        rho=cd.rho, t=t,
    )
    return 1.5 * cd.n * cd.rho * math.exp(2.0 - 2.0 * cd.rho * t)
