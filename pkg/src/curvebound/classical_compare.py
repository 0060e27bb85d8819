# classical_compare.py
# ---------------------------------------------------
# Classical Li-Yau Type Bounds and Dominance Checks
#
# Competitor bounds for rho = -K < 0 are compared with the improved bound in
# the normalized variables
#
#     X = 4 L P_t f / (n rho P_t f),   G = 4 Gamma(P_t f) / (n K (P_t f)^2),
#     r = 1/(Kt),                     s = Kt,
#
# in which the improved bound reads G <= (2/K) Phi_t(X) and n drops out of
# every comparison. The tangent lines of the concave Phi_t give the linear
# family (A, B); alpha = K recovers the Li-Xu bound.
# ---------------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, Config
from .core_bounds import CurvatureDimension, eval_F, eval_F_prime, eval_phi
from .errors import DomainError, ParameterError
from .logging import LOGGER, log_event
from .reports import MarginReport
from .roots import find_roots
from .validators import InputValidator

DOMINANCE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class NormalizedState:
    """
    A point (X, G) in the normalized variables, with r = 1/(Kt) and s_var = Kt.
    """

    X: float
    G: float
    r: float
    s_var: float

    @classmethod
    def at(cls, K: float, t: float, X: float, G: float) -> "NormalizedState":
        if K <= 0.0:
            raise ParameterError(f"normalized variables need K > 0, got {K}")
        t = InputValidator.validate_time(t)
        return cls(X=float(X), G=float(G), r=1.0 / (K * t), s_var=K * t)


@dataclass(frozen=True)
class LinearBound:
    """Gamma(P)/P^2 <= A L P / P + (n/2) B."""

    A: float
    B: float

    def phi_line(self, rho: float, x: float) -> float:
        """The tangent line (rho/2) A x + B, an upper bound for Phi_t(x)."""
        return 0.5 * rho * self.A * x + self.B


def _tangent_bound(rho: float, t: float, w0: float) -> LinearBound:
    f = eval_F(w0)
    fp = eval_F_prime(w0)
    return LinearBound(
        A=1.0 - 2.0 * rho * t * fp,
        B=(f - w0 * fp) / t - rho + rho * rho * t * fp,
    )


def linearized_bound_hyperbolic(rho: float, t: float, alpha: float) -> LinearBound:
    """
    Returns the tangent line of Phi_t at x0 = 1 - alpha^2/rho^2.

    A_1 = 1 - rho (sinh(2 alpha t) - 2 alpha t) / (2 alpha sinh^2(alpha t)); alpha = 0
    is the tangent at x0 = 1, with A = 1 - 2 rho t / 3 and B = 1/t - rho + rho^2 t / 3.

    Args:
        rho (float): Non-zero curvature lower bound.
        t (float): Time.
        alpha (float): alpha >= 0.

    Returns:
        LinearBound: The coefficients (A_1, B_1).
    """
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    if not alpha >= 0.0:
        raise DomainError(f"alpha={alpha} must be >= 0")
    return _tangent_bound(rho, t, (alpha * t) ** 2)


def linearized_bound_trigonometric(rho: float, t: float, beta: float) -> LinearBound:
    """
    Returns the tangent line of Phi_t at x0 = 1 + beta^2/rho^2.

    A_2 = 1 - rho (2 beta t - sin(2 beta t)) / (2 beta sin^2(beta t)).

    Raises:
        DomainError: When beta is not in (0, pi/t).
    """
    rho = InputValidator.validate_rho_nonzero(rho)
    t = InputValidator.validate_time(t)
    if not 0.0 < beta < math.pi / t:
        raise DomainError(f"beta={beta} outside (0, pi/t)")
    return _tangent_bound(rho, t, -((beta * t) ** 2))


def li_xu_coefficients(K: float, t: float) -> LinearBound:
    """The Li-Xu coefficients A = 1 + (sinh 2Kt - 2Kt)/(2 sinh^2 Kt), B = K(1 + coth Kt)."""
    s = K * t
    return LinearBound(A=1.0 + 2.0 * s * eval_F_prime(s * s), B=K + eval_F(s * s) / t)


def bound_classical_liyau(n: float, t: float, v: float) -> float:
    """Returns v + n/(2t), the rho = 0 bound on Gamma(P)/P^2 with v = L P / P."""
    n = InputValidator.validate_dimension(n)
    t = InputValidator.validate_time(t)
    return v + n / (2.0 * t)


# ---------------------------------------------------
# Competitors in normalized variables. Each margin is RHS - LHS.
# ---------------------------------------------------

def davies_margin(ns: NormalizedState, alpha: float) -> float:
    return -alpha * ns.X + alpha * alpha / (alpha - 1.0) + 2.0 * ns.r * alpha * alpha - ns.G


def li_yau_alpha_margin(ns: NormalizedState, alpha: float) -> float:
    return -alpha * ns.X + 2.0 * alpha * alpha / (alpha - 1.0) + 2.0 * ns.r * alpha * alpha - ns.G


def yau_margin(ns: NormalizedState) -> float:
    return -ns.G + 2.0 * ns.r + 2.0 * math.sqrt(2.0 * ns.G + 4.0 * ns.r + 16.0) - ns.X


def bakry_qian_margin(ns: NormalizedState) -> float:
    return -ns.G + 2.0 * ns.r + 2.0 * math.sqrt(ns.G + 1.0 + 2.0 * ns.r) - ns.X


def hamilton_margin(ns: NormalizedState) -> float:
    s = ns.s_var
    return -math.exp(-2.0 * s) * ns.G + (2.0 / s) * math.exp(2.0 * s) - ns.X


def li_xu_margin(ns: NormalizedState) -> float:
    s = ns.s_var
    # 1 + coth(s) - s/sinh^2(s), written through the kernel F(s^2) = s coth(s)
    slope = 1.0 + 2.0 * s * eval_F_prime(s * s)
    return -slope * ns.X + 2.0 + 2.0 * eval_F(s * s) / s - ns.G


def linear_margin(ns: NormalizedState, bound: LinearBound, K: float) -> float:
    return -bound.A * ns.X + 2.0 * bound.B / K - ns.G


def _check(label: str, margin: float, tol: float, ns: NormalizedState) -> bool:
    ok = margin >= -tol
    LOGGER.debug("%s at X=%s, G=%s: margin %s -> %s", label, ns.X, ns.G, margin, ok)
    return ok


def satisfies_davies(ns: NormalizedState, alpha: float, tol: float = DOMINANCE_TOLERANCE) -> bool:
    """
    Checks G <= -alpha X + alpha^2/(alpha - 1) + 2 r alpha^2, the normalized Davies bound.

    Raises:
        ParameterError: When alpha <= 1.
    """
    if not alpha > 1.0:
        raise ParameterError(f"alpha={alpha} must exceed 1")
    return _check("davies", davies_margin(ns, alpha), tol, ns)


def satisfies_li_yau_alpha(ns: NormalizedState, alpha: float, tol: float = DOMINANCE_TOLERANCE) -> bool:
    """Checks the original negative-curvature bound G <= -alpha X + 2 alpha^2/(alpha - 1) + 2 r alpha^2."""
    if not alpha > 1.0:
        raise ParameterError(f"alpha={alpha} must exceed 1")
    return _check("li_yau_alpha", li_yau_alpha_margin(ns, alpha), tol, ns)


def satisfies_yau(ns: NormalizedState, tol: float = DOMINANCE_TOLERANCE) -> bool:
    """Checks X <= -G + 2r + 2 sqrt(2G + 4r + 16), the normalized Yau bound."""
    return _check("yau", yau_margin(ns), tol, ns)


def satisfies_bakry_qian(ns: NormalizedState, tol: float = DOMINANCE_TOLERANCE) -> bool:
    """Checks X <= -G + 2r + 2 sqrt(G + 1 + 2r)."""
    return _check("bakry_qian", bakry_qian_margin(ns), tol, ns)


def satisfies_hamilton(ns: NormalizedState, tol: float = DOMINANCE_TOLERANCE) -> bool:
    """Checks X <= -e^{-2s} G + (2/s) e^{2s}."""
    return _check("hamilton", hamilton_margin(ns), tol, ns)


def satisfies_li_xu(ns: NormalizedState, tol: float = DOMINANCE_TOLERANCE) -> bool:
    """Checks G <= -(1 + coth s - s/sinh^2 s) X + 2(1 + coth s)."""
    return _check("li_xu", li_xu_margin(ns), tol, ns)


# ---------------------------------------------------
# Predicates with the full (ns, n, K, t) argument list
# ---------------------------------------------------

def _matching_state(ns: NormalizedState, n: float, K: float, t: float) -> NormalizedState:
    # n drops out of the normalized form; (K, t) must be the ones ns was built with
    InputValidator.validate_dimension(n)
    expected = NormalizedState.at(K, t, ns.X, ns.G)
    if not (math.isclose(ns.r, expected.r, rel_tol=1e-12) and math.isclose(ns.s_var, expected.s_var, rel_tol=1e-12)):
        raise ParameterError(f"state has s={ns.s_var}, r={ns.r}, but K={K}, t={t} give s={expected.s_var}")
    return ns


def satisfies_davies_at(
    ns: NormalizedState, n: float, K: float, t: float, alpha: float, tol: float = DOMINANCE_TOLERANCE
) -> bool:
    """satisfies_davies, after checking that ns belongs to (n, K, t)."""
    return satisfies_davies(_matching_state(ns, n, K, t), alpha, tol)


def satisfies_yau_at(ns: NormalizedState, n: float, K: float, t: float, tol: float = DOMINANCE_TOLERANCE) -> bool:
    return satisfies_yau(_matching_state(ns, n, K, t), tol)


def satisfies_li_xu_at(ns: NormalizedState, n: float, K: float, t: float, tol: float = DOMINANCE_TOLERANCE) -> bool:
    return satisfies_li_xu(_matching_state(ns, n, K, t), tol)


def yau_literal_margin(n: float, K: float, t: float, gamma_ratio: float, lap_ratio: float) -> float:
    """
    The Yau bound in (Gamma, L, P) variables, reading |grad P|^2/P as Gamma(P)/P^2:

        sqrt(2nK) sqrt(Gamma/P^2 + n/(2t) + 2nK) + n/(2t) - (Gamma/P^2 - L P/P).
    """
    rhs = math.sqrt(2.0 * n * K) * math.sqrt(gamma_ratio + n / (2.0 * t) + 2.0 * n * K) + n / (2.0 * t)
    return rhs - (gamma_ratio - lap_ratio)


# ---------------------------------------------------
# The improved bound in normalized variables
# ---------------------------------------------------

def new_bound_G(rho: float, t: float, X: float) -> float:
    """
    Returns (2/K) Phi_t(X), the improved bound on G for rho = -K < 0.

    Raises:
        ParameterError: When rho >= 0.
    """
    if rho >= 0.0:
        raise ParameterError(f"normalized comparison needs rho < 0, got {rho}")
    return -2.0 / rho * eval_phi(rho, t, X)


def _log_expm1_minus(a: float) -> float:
    # log(e^a - 1 - a) for a > 0
    if a < 1e-2:
        series = 1.0 + a / 3.0 + a * a / 12.0 + a**3 / 60.0 + a**4 / 360.0
        return math.log(0.5 * a * a * series)
    if a > 50.0:
        return a + math.log1p(-(1.0 + a) * math.exp(-a))
    return math.log(math.expm1(a) - a)


def li_xu_harnack_exponent(n: float, K: float, s: float, t: float, d: float) -> float:
    """
    Returns the log of the Li-Xu Harnack factor

        ((e^{2Kt} - 1 - 2Kt)/(e^{2Ks} - 1 - 2Ks))^{n/4} exp(d^2/(4(t-s)) (1 + (t coth Kt - s coth Ks)/(t-s))).

    Raises:
        ParameterError: When s >= t or K <= 0.
    """
    n = InputValidator.validate_dimension(n)
    s = InputValidator.validate_time(s, "s")
    t = InputValidator.validate_time(t, "t")
    d = InputValidator.validate_distance(d)
    if K <= 0.0 or s >= t:
        raise ParameterError(f"need K > 0 and 0 < s < t, got K={K}, s={s}, t={t}")
    volume = 0.25 * n * (_log_expm1_minus(2.0 * K * t) - _log_expm1_minus(2.0 * K * s))
    # t coth(Kt) - s coth(Ks) = (F(K^2 t^2) - F(K^2 s^2)) / K
    coth_gap = (eval_F((K * t) ** 2) - eval_F((K * s) ** 2)) / K
    return volume + d * d / (4.0 * (t - s)) * (1.0 + coth_gap / (t - s))


# ---------------------------------------------------
# Dominance sweep
# ---------------------------------------------------

def asymptotic_slopes(cd: CurvatureDimension, t: float, alphas: Sequence[float] = (1.1, 2.0, 10.0)) -> Dict[str, float]:
    """
    Returns dG/dX as X -> -inf for the improved bound and every competitor.

    The improved bound has slope -1; a competitor is weaker in the left tail
    when its slope is at most -1.
    """
    if cd.rho >= 0.0:
        raise ParameterError(f"normalized comparison needs rho < 0, got {cd.rho}")
    s = -cd.rho * t
    slopes = {"new": -1.0, "yau": -1.0, "bakry_qian": -1.0, "hamilton": -math.exp(2.0 * s),
              "li_xu": -(1.0 + 2.0 * s * eval_F_prime(s * s))}
    for alpha in alphas:
        slopes[f"davies(alpha={alpha:g})"] = -alpha
        slopes[f"li_yau(alpha={alpha:g})"] = -alpha
    return slopes


def dominance_report(
    cd: CurvatureDimension,
    t: float,
    grid_size: int | None = None,
    alphas: Sequence[float] = (1.1, 2.0, 10.0),
    config: Config = DEFAULT_CONFIG,
) -> Dict[str, MarginReport]:
    """
    Sweeps X over [-x_max, xi] and reports, per competitor, the minimum of its
    margin at G = (2/K) Phi_t(X), the largest G the improved bound admits.

    For the X-form competitors (Yau, Bakry-Qian, Hamilton) the admissible
    bound on X decreases in G, so the worst admissible state is G = (2/K) Phi_t(X).

    Args:
        cd (CurvatureDimension): CD(rho, n) with rho < 0.
        t (float): Time.
        grid_size (int | None): Number of grid points, Config.dominance_grid by default.
        alphas (Sequence[float]): Davies parameters.
        config (Config): Grid settings.

    Returns:
        Dict[str, MarginReport]: One report per competitor, keyed by label.
    """
    rho = cd.rho
    if rho >= 0.0:
        raise ParameterError(f"dominance comparison needs rho < 0, got {rho}")
    t = InputValidator.validate_time(t)
    K = -rho
    size = grid_size or config.dominance_grid
    xi = find_roots(rho, t).xi
    grid = np.linspace(-config.dominance_x_max, xi, size)
    states = []
    for X in grid:
        G = new_bound_G(rho, t, float(X)) if X < xi else 0.0
        if G < 0.0:
            continue
        states.append(NormalizedState.at(K, t, float(X), G))
    li_xu = li_xu_coefficients(K, t)
    competitors = {
        "li_xu": li_xu_margin,
        "bakry_qian": bakry_qian_margin,
        "hamilton": hamilton_margin,
        "yau": yau_margin,
        "li_xu_linear": lambda ns: linear_margin(ns, li_xu, K),
    }
    for alpha in alphas:
        competitors[f"davies(alpha={alpha:g})"] = lambda ns, a=alpha: davies_margin(ns, a)
        competitors[f"li_yau(alpha={alpha:g})"] = lambda ns, a=alpha: li_yau_alpha_margin(ns, a)
    locations = [(ns.X, ns.G) for ns in states]
    reports = {
        label: MarginReport.from_margins(label, [margin(ns) for ns in states], locations, DOMINANCE_TOLERANCE)
        for label, margin in competitors.items()
    }
    log_event("info", {"msg": "Dominance sweep", "rho": rho, "t": t, "points": len(states),
                       "min_margins": {k: r.min_margin for k, r in reports.items()}})
    return reports
