# psi_harnack.py
# ---------------------------------------------------
# Psi, its Legendre Transform and the Harnack Exponent
#
#     Psi_{t,rho}(y) = -sqrt((n/2) Phi_t(4y/(n rho))),   Psi_{t,0}(y) = -sqrt(n/(2t) + y)
#
# is convex on its interval I_{t,rho}, and Psi' is an increasing bijection
# onto R (rho > 0) or onto (-inf, 0) (rho <= 0). The Legendre transform is
# evaluated at the stationary point y* = (Psi')^{-1}(z), and the Harnack
# exponent integrates it over time:
#
#     E = (d/(t-s)) int_s^t Psi*_{u,rho}(-(t-s)/d) du.
# ---------------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .config import DEFAULT_CONFIG, Config
from .core_bounds import CurvatureDimension, eval_phi, eval_phi_prime
from .errors import ConvergenceError, DomainError, TransformRangeError
from .logging import LOGGER, log_event
from .roots import find_roots
from .validators import InputValidator

_MAX_REFINEMENTS = 60
_RTOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class PsiDomain:
    """
    The interval I_{t,rho} on which Psi_{t,rho} is defined.

    Attributes:
        lo (float): Left endpoint.
        hi (float): Right endpoint, +inf for rho <= 0.
        lo_open (bool): Whether lo is excluded.
        hi_open (bool): Whether hi is excluded.
    """

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __contains__(self, y: float) -> bool:
        above = y > self.lo if self.lo_open else y >= self.lo
        below = y < self.hi if self.hi_open else y <= self.hi
        return above and below

    def interior(self, y: float) -> bool:
        return self.lo < y < self.hi


@dataclass(frozen=True)
class LegendreResult:
    """Psi*(z) = z y* - Psi(y*) and its maximizer y*."""

    value: float
    argmax: float


@dataclass(frozen=True)
class HarnackQuery:
    """
    Two space-time points (x, s) and (y, t) at distance d.

    Raises:
        ParameterError: When s or t is not positive or d is negative.
    """

    s: float
    t: float
    d: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", InputValidator.validate_time(self.s, "s"))
        object.__setattr__(self, "t", InputValidator.validate_time(self.t, "t"))
        object.__setattr__(self, "d", InputValidator.validate_distance(self.d))


class PsiFunction:
    """
    Psi_{t,rho} for fixed (cd, t), with the roots of Phi_t computed once.

    Attributes:
        cd (CurvatureDimension): The CD(rho, n) pair.
        t (float): Time.
        domain (PsiDomain): The interval I_{t,rho}.
    """

    def __init__(self, cd: CurvatureDimension, t: float) -> None:
        self.cd = cd
        self.t = InputValidator.validate_time(t)
        rho, n = cd.rho, cd.n
        if rho == 0.0:
            self._x_lo, self._x_hi = -math.inf, math.inf
            self.domain = PsiDomain(lo=-n / (2.0 * self.t), hi=math.inf, hi_open=True)
        else:
            roots = find_roots(rho, self.t)
            if rho > 0.0:
                self._x_lo, self._x_hi = roots.xi1, roots.xi2
                self.domain = PsiDomain(lo=n * rho * roots.xi1 / 4.0, hi=n * rho * roots.xi2 / 4.0)
            else:
                self._x_lo, self._x_hi = -math.inf, roots.xi
                self.domain = PsiDomain(lo=n * rho * roots.xi / 4.0, hi=math.inf, hi_open=True)

    # Phi_t is evaluated at X = 4y/(n rho); y and X are used interchangeably below.
    def _to_x(self, y: float) -> float:
        return 4.0 * y / (self.cd.n * self.cd.rho)

    def _to_y(self, x: float) -> float:
        return self.cd.n * self.cd.rho * x / 4.0

    def _check(self, y: float) -> float:
        y = float(y)
        if y not in self.domain:
            log_event("error", {"msg": "Psi argument outside its interval", "y": y,
                                "lo": self.domain.lo, "hi": self.domain.hi})
            raise DomainError(f"y={y} outside [{self.domain.lo}, {self.domain.hi}]")
        return y

    def _half_n_phi(self, x: float) -> float:
        # the interval endpoints are roots of Phi_t; clip rounding below zero
        return max(0.0, 0.5 * self.cd.n * eval_phi(self.cd.rho, self.t, x))

    def value(self, y: float) -> float:
        """
        Evaluates Psi_{t,rho}(y).

        Raises:
            DomainError: When y lies outside I_{t,rho}.
        """
        y = self._check(y)
        if self.cd.rho == 0.0:
            return -math.sqrt(max(0.0, self.cd.n / (2.0 * self.t) + y))
        if y == self.domain.lo or y == self.domain.hi:
            return 0.0
        return -math.sqrt(self._half_n_phi(self._to_x(y)))

    def _prime_at_x(self, x: float) -> float:
        half_n_phi = self._half_n_phi(x)
        slope = eval_phi_prime(self.cd.rho, self.t, x)
        if half_n_phi <= 0.0:
            return -math.copysign(math.inf, slope * self.cd.rho)
        return -slope / (self.cd.rho * math.sqrt(half_n_phi))

    def prime(self, y: float) -> float:
        """
        Evaluates Psi'_{t,rho}(y) on the open interior of I_{t,rho}.

        Raises:
            DomainError: When y is not an interior point.
        """
        y = self._check(y)
        if not self.domain.interior(y):
            raise DomainError(f"Psi' is unbounded at the endpoint y={y}")
        if self.cd.rho == 0.0:
            return -0.5 / math.sqrt(self.cd.n / (2.0 * self.t) + y)
        return self._prime_at_x(self._to_x(y))

    def _x_bracket(self, g: Callable[[float], float]) -> tuple[float, float] | float:
        """
        Finds X-values a < b with g(a) and g(b) of opposite sign, refining toward
        the interval endpoints on a logarithmic scale; returns an endpoint instead
        when g keeps its sign up to float resolution.
        """
        rho = self.cd.rho
        if rho > 0.0:
            lo, hi = self._x_lo, self._x_hi
            width = hi - lo
            a = b = None
            for k in range(1, _MAX_REFINEMENTS):
                delta = width * 10.0 ** (-k / 2.0)
                left, right = lo + delta, hi - delta
                if a is None and (g(left) < 0.0 or left == lo):
                    a = left
                if b is None and (g(right) > 0.0 or right == hi):
                    b = right
                if a is not None and b is not None:
                    break
            else:
                raise ConvergenceError("no bracket for the inverse of Psi'")
            if a == lo:
                return lo
            if b == hi:
                return hi
            return a, b
        # rho < 0: Psi' increases in y, hence decreases in X; X ranges over (-inf, xi)
        xi = self._x_hi
        left = None
        for k in range(0, 1100):
            candidate = xi - 2.0**k
            if g(candidate) > 0.0:
                left = candidate
                break
        if left is None:
            raise ConvergenceError("no left bracket for the inverse of Psi'")
        for k in range(1, _MAX_REFINEMENTS):
            right = xi - abs(xi) * 10.0 ** (-k / 2.0)
            if right >= xi:
                return xi
            if g(right) < 0.0:
                return left, right
        return xi

    def prime_inverse(self, z: float) -> float:
        """
        Returns the point y with Psi'(y) = z.

        Args:
            z (float): Any real for rho > 0; z < 0 for rho <= 0.

        Returns:
            float: The preimage y inside I_{t,rho}.

        Raises:
            TransformRangeError: When rho <= 0 and z >= 0.
        """
        z = InputValidator.validate_finite(z, "z")
        rho = self.cd.rho
        if rho <= 0.0 and z >= 0.0:
            log_event("error", {"msg": "Psi' takes only negative values for rho <= 0", "z": z})
            raise TransformRangeError(f"z={z} >= 0 with rho={rho}")
        if rho == 0.0:
            return 1.0 / (4.0 * z * z) - self.cd.n / (2.0 * self.t)

        def g(x: float) -> float:
            return self._prime_at_x(x) - z

        bracket = self._x_bracket(g)
        if not isinstance(bracket, tuple):
            LOGGER.debug("Psi' inverse of z=%s clamped to the endpoint X=%s", z, bracket)
            return self._to_y(bracket)
        try:
            x_star = optimize.brentq(g, bracket[0], bracket[1], xtol=1e-300, rtol=_RTOL, maxiter=200)
        except (RuntimeError, ValueError) as err:
            raise ConvergenceError(f"Psi' inverse of z={z}: {err}") from err
        y = self._to_y(x_star)
        # keep y inside the interval after the change of variable
        return min(max(y, self.domain.lo), self.domain.hi)

    def legendre(self, z: float) -> LegendreResult:
        """
        Evaluates the Legendre-Fenchel transform Psi*(z) = sup_y {z y - Psi(y)}.

        Raises:
            TransformRangeError: When rho <= 0 and z >= 0 (the transform is +inf there).
        """
        if self.cd.rho == 0.0:
            z = InputValidator.validate_finite(z, "z")
            if z >= 0.0:
                raise TransformRangeError(f"z={z} >= 0 with rho=0")
            y_star = self.prime_inverse(z)
            value = -self.cd.n * z / (2.0 * self.t) - 1.0 / (4.0 * z)
            return LegendreResult(value=value, argmax=y_star)
        y_star = self.prime_inverse(z)
        return LegendreResult(value=z * y_star - self.value(y_star), argmax=y_star)


@lru_cache(maxsize=512)
def _psi_function(cd: CurvatureDimension, t: float) -> PsiFunction:
    return PsiFunction(cd, t)


def psi(cd: CurvatureDimension, t: float, x: float) -> float:
    """Evaluates Psi_{t,rho}(x); see PsiFunction.value."""
    return _psi_function(cd, float(t)).value(x)


def psi_domain(cd: CurvatureDimension, t: float) -> PsiDomain:
    """Returns the interval I_{t,rho} on which Psi_{t,rho} is defined."""
    return _psi_function(cd, float(t)).domain


def psi_prime(cd: CurvatureDimension, t: float, x: float) -> float:
    """Evaluates Psi'_{t,rho}(x) at an interior point."""
    return _psi_function(cd, float(t)).prime(x)


def psi_prime_inverse(cd: CurvatureDimension, t: float, z: float) -> float:
    """Returns y with Psi'_{t,rho}(y) = z."""
    return _psi_function(cd, float(t)).prime_inverse(z)


def legendre(cd: CurvatureDimension, t: float, z: float) -> LegendreResult:
    """Evaluates Psi*_{t,rho}(z) and its maximizer."""
    return _psi_function(cd, float(t)).legendre(z)


# ---------------------------------------------------
# Harnack exponent
# ---------------------------------------------------

def harnack_exponent_flat(n: float, s: float, t: float, d: float) -> float:
    """
    Returns the rho = 0 exponent (n/2) ln(t/s) + d^2/(4(t-s)).

    Raises:
        TransformRangeError: When s >= t (unless s = t and d = 0, where it is 0).
    """
    n = InputValidator.validate_dimension(n)
    q = HarnackQuery(s, t, d)
    if q.s == q.t and q.d == 0.0:
        return 0.0
    if q.s >= q.t:
        raise TransformRangeError(f"s={q.s} >= t={q.t} with rho=0", code="CB006")
    return 0.5 * n * math.log(q.t / q.s) + q.d * q.d / (4.0 * (q.t - q.s))


def _quad(func: Callable[[float], float], a: float, b: float, config: Config) -> float:
    value, abserr = integrate.quad(
        func, a, b, epsrel=config.quad_epsrel, epsabs=config.quad_epsabs, limit=config.quad_limit
    )
    if not math.isfinite(value):
        raise ConvergenceError(f"Harnack quadrature on [{a}, {b}] is not finite")
    LOGGER.debug("Harnack quadrature on [%s, %s]: %s (abserr %s)", a, b, value, abserr)
    return value


def harnack_exponent(cd: CurvatureDimension, q: HarnackQuery, config: Config = DEFAULT_CONFIG) -> float:
    """
    Computes the Harnack exponent E with P_s f(x) <= P_t f(y) exp(E).

    For d > 0 and s != t this is (d/|t-s|) times the integral of
    Psi*_{u,rho}(-(t-s)/d) over u between s and t. The limiting cases are
    E = d Psi*_{s,rho}(0) for s = t (rho > 0), and for d = 0 the endpoint
    integrals -int_s^t lo(u) du (s < t) or int_t^s hi(u) du (s > t) of the
    interval I_{u,rho} = [lo(u), hi(u)].

    Args:
        cd (CurvatureDimension): The CD(rho, n) pair.
        q (HarnackQuery): The points (s, t, d).
        config (Config): Quadrature settings.

    Returns:
        float: The exponent E >= 0.

    Raises:
        TransformRangeError: When rho <= 0 and s > t, or rho < 0, s = t and d > 0.
    """
    rho = cd.rho
    if rho == 0.0:
        return harnack_exponent_flat(cd.n, q.s, q.t, q.d)
    if rho < 0.0 and (q.s > q.t or (q.s == q.t and q.d > 0.0)):
        log_event("error", {"msg": "Harnack comparison runs forward only", "rho": rho, "s": q.s, "t": q.t})
        raise TransformRangeError(f"s={q.s}, t={q.t} with rho={rho}", code="CB006")
    if q.s == q.t:
        if q.d == 0.0:
            return 0.0
        return q.d * legendre(cd, q.s, 0.0).value
    a, b = min(q.s, q.t), max(q.s, q.t)
    if q.d == 0.0:
        if q.s < q.t:
            return -_quad(lambda u: psi_domain(cd, u).lo, a, b, config)
        return _quad(lambda u: psi_domain(cd, u).hi, a, b, config)
    z = -(q.t - q.s) / q.d
    integral = _quad(lambda u: legendre(cd, u, z).value, a, b, config)
    exponent = q.d / (b - a) * integral
    log_event("debug", {"msg": "Harnack exponent", "rho": rho, "n": cd.n, "s": q.s, "t": q.t,
                        "d": q.d, "exponent": exponent})
    return exponent


def heat_kernel_ratio_bound(cd: CurvatureDimension, q: HarnackQuery, config: Config = DEFAULT_CONFIG) -> float:
    """Returns exp(E), the bound on p_s(z, x) / p_t(z, y)."""
    return math.exp(harnack_exponent(cd, q, config))
