# heat_lab.py
# ---------------------------------------------------
# Radial Heat Semigroups on Model Spaces
#
# Rotationally symmetric heat flow on Euclidean space, the round sphere and
# hyperbolic space reduces to the one-dimensional generator
#
#     L u = u'' + c(r) u',   c(r) = m'(r)/m(r),
#
# with volume density m(r) = r^{n-1}, (sin(kr)/k)^{n-1} or (sinh(kr)/k)^{n-1}.
# The generator is discretized by finite volumes on a node-centred grid, so
# that the weighted mass is conserved exactly and the origin needs no special
# case. Time stepping is Crank-Nicolson after a few backward-Euler half steps.
#
# On the computed semigroup this module measures the slack of the Li-Yau
# bound, the admissible range, the local logarithmic Sobolev inequalities,
# the Harnack inequality and the ultracontractive envelope.
# ---------------------------------------------------

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import legendre
from scipy import linalg
from scipy.special import xlogy

from .config import DEFAULT_CONFIG, Config
from .core_bounds import (
    CurvatureDimension,
    domain_limit,
    eval_phi,
    eval_phi_tilde,
    eval_S,
)
from .errors import DomainError, InstabilityError, ParameterError
from .logging import LOGGER, log_event
from .psi_harnack import HarnackQuery, harnack_exponent
from .reports import MarginReport
from .roots import gradient_decay_bound, ultracontractive_envelope
from .validators import InputValidator

DEFAULT_TRUNCATION = 20.0
_DIVISION_GUARD = 1e-300
_GAUSS_NODES, _GAUSS_WEIGHTS = legendre.leggauss(8)


class SpaceKind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class ModelSpace:
    """
    A constant-curvature model space of dimension n.

    Attributes:
        kind (SpaceKind): Euclidean, sphere or hyperbolic.
        n (int): Dimension.
        kappa (float): Curvature scale; sectional curvature is kappa^2 or -kappa^2.
    """

    kind: SpaceKind
    n: int
    kappa: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"dimension must be an integer >= 1, got {self.n}", code="CB004")
        if not self.kappa > 0.0:
            raise ParameterError(f"kappa must be positive, got {self.kappa}")

    @property
    def rho(self) -> float:
        """The Ricci lower bound (n-1) kappa^2 times the sign of the curvature."""
        if self.kind is SpaceKind.SPHERE:
            return (self.n - 1) * self.kappa**2
        if self.kind is SpaceKind.HYPERBOLIC:
            return -(self.n - 1) * self.kappa**2
        return 0.0

    @property
    def cd(self) -> CurvatureDimension:
        return CurvatureDimension(self.rho, self.n)

    @property
    def default_radius(self) -> float:
        if self.kind is SpaceKind.SPHERE:
            return math.pi / self.kappa
        return DEFAULT_TRUNCATION / self.kappa

    def volume_density(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        k = self.kappa
        if self.kind is SpaceKind.SPHERE:
            base = np.abs(np.sin(k * r)) / k
        elif self.kind is SpaceKind.HYPERBOLIC:
            base = np.sinh(k * r) / k
        else:
            base = r
        return base ** (self.n - 1)

    def radial_drift(self, r: np.ndarray) -> np.ndarray:
        """c(r) = (n-1)/r, (n-1) k cot(kr) or (n-1) k coth(kr), for 0 < r < R."""
        r = np.asarray(r, dtype=float)
        k = self.kappa
        if self.kind is SpaceKind.SPHERE:
            return (self.n - 1) * k / np.tan(k * r)
        if self.kind is SpaceKind.HYPERBOLIC:
            return (self.n - 1) * k / np.tanh(k * r)
        return (self.n - 1) / r


def radial_drift(space: ModelSpace, r: float) -> float:
    """Returns the drift coefficient c(r) of L = d^2/dr^2 + c(r) d/dr."""
    return float(space.radial_drift(r))


@dataclass(frozen=True)
class RadialGrid:
    """Nodes r_i = i h, i = 0..N, on [0, R]."""

    R: float
    N: int

    def __post_init__(self) -> None:
        if self.N < 100:
            raise ParameterError(f"grid needs N >= 100 cells, got {self.N}", code="CB013")
        if not self.R > 0.0:
            raise ParameterError(f"grid radius must be positive, got {self.R}")

    @property
    def h(self) -> float:
        return self.R / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(self.N + 1)

    def index(self, r: float) -> int:
        """Returns the node nearest to radius r."""
        if not 0.0 <= r <= self.R:
            raise DomainError(f"radius {r} outside [0, {self.R}]")
        return int(round(r / self.h))

    @classmethod
    def for_space(cls, space: ModelSpace, N: int, R: float | None = None) -> "RadialGrid":
        if space.kind is SpaceKind.SPHERE:
            if R is not None and not math.isclose(R, space.default_radius):
                LOGGER.warning("Sphere grids end at the antipode pi/kappa; ignoring R=%s", R)
            return cls(space.default_radius, N)
        return cls(space.default_radius if R is None else float(R), N)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a radial function at the nodes of a grid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.N + 1,):
            raise ParameterError(f"expected {self.grid.N + 1} node values, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def positive(self) -> bool:
        return bool(np.all(self.values > 0.0))

    def at(self, r: float) -> float:
        return float(self.values[self.grid.index(r)])


# ---------------------------------------------------
# Initial profiles
# ---------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """
    A radial initial datum parsed from 'kind:p1,p2,...'.

    Kinds:
        constant:c              f = c
        cosine:a,b              f = a + b cos(kappa r)
        gaussian:sigma          f = exp(-r^2/(2 sigma^2))
        bump:base,amp,sigma     f = base + amp exp(-r^2/(2 sigma^2))
    """

    kind: str
    params: Tuple[float, ...]
    kappa: float = 1.0

    _ARITY = {"constant": 1, "cosine": 2, "gaussian": 1, "bump": 3}

    def __post_init__(self) -> None:
        arity = self._ARITY.get(self.kind)
        if arity is None:
            raise ParameterError(f"unknown profile '{self.kind}'")
        if len(self.params) != arity:
            raise ParameterError(f"profile '{self.kind}' takes {arity} parameter(s), got {len(self.params)}")
        if self.kind in ("gaussian", "bump") and not self.params[-1] > 0.0:
            raise ParameterError(f"profile width must be positive, got {self.params[-1]}")

    @classmethod
    def parse(cls, text: str, kappa: float = 1.0) -> "Profile":
        kind, _, raw = text.strip().partition(":")
        try:
            params = tuple(float(p) for p in raw.split(",") if p.strip())
        except ValueError as err:
            raise ParameterError(f"cannot parse profile '{text}': {err}") from err
        return cls(kind.strip().lower(), params, kappa)

    def _gauss(self, r: np.ndarray) -> np.ndarray:
        sigma = self.params[-1]
        return np.exp(-(r * r) / (2.0 * sigma * sigma))

    def values(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.full_like(r, self.params[0])
        if self.kind == "cosine":
            a, b = self.params
            return a + b * np.cos(self.kappa * r)
        if self.kind == "gaussian":
            return self._gauss(r)
        base, amp, _ = self.params
        return base + amp * self._gauss(r)

    def gradient(self, r: np.ndarray) -> np.ndarray:
        """The radial derivative f'(r)."""
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.zeros_like(r)
        if self.kind == "cosine":
            return -self.params[1] * self.kappa * np.sin(self.kappa * r)
        sigma = self.params[-1]
        amp = 1.0 if self.kind == "gaussian" else self.params[1]
        return -amp * r / (sigma * sigma) * self._gauss(r)

    def on(self, grid: RadialGrid) -> GridFunction:
        """
        Samples the profile on a grid.

        Raises:
            ParameterError: When the sampled profile is negative somewhere or vanishes identically.
        """
        values = self.values(grid.nodes)
        if np.any(values < 0.0) or not np.any(values > 0.0):
            raise ParameterError(f"initial profile {self.kind}{self.params} must be positive")
        return GridFunction(grid, values)

    def columns(self, grid: RadialGrid) -> np.ndarray:
        """Stacks f, f log f and Gamma(f)/f as the three columns evolved for the entropy checks."""
        f = self.on(grid).values
        grad = self.gradient(grid.nodes)
        gamma_over_f = np.divide(grad * grad, f, out=np.zeros_like(f), where=f > _DIVISION_GUARD)
        return np.column_stack([f, xlogy(f, f), gamma_over_f])


# ---------------------------------------------------
# Finite-volume generator and time stepping
# ---------------------------------------------------

class HeatSolver:
    """
    Discrete heat semigroup of a model space on a radial grid.

    Cell i is [r_i - h/2, r_i + h/2] clipped to [0, R] with weighted volume
    h V_i; the flux through the face r_{i+1/2} is m(r_{i+1/2}) (u_{i+1} - u_i)/h.
    Both ends are zero-flux walls, exact at the origin and at the antipode.

    Attributes:
        space (ModelSpace): The model space.
        grid (RadialGrid): The grid.
        config (Config): Time step ratio and startup settings.
    """

    def __init__(self, space: ModelSpace, grid: RadialGrid, config: Config = DEFAULT_CONFIG) -> None:
        self.space = space
        self.grid = grid
        self.config = config
        self.dt = config.dt_ratio * grid.h
        h, N = grid.h, grid.N
        r = grid.nodes
        lo = np.maximum(r - 0.5 * h, 0.0)
        hi = np.minimum(r + 0.5 * h, grid.R)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        points = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
        self.volumes = (half[:, None] * _GAUSS_WEIGHTS * space.volume_density(points)).sum(axis=1) / h
        faces = space.volume_density(h * (np.arange(N) + 0.5))
        self.sub = np.zeros(N + 1)
        self.sup = np.zeros(N + 1)
        self.sup[:-1] = faces / (h * h * self.volumes[:-1])
        self.sub[1:] = faces / (h * h * self.volumes[1:])
        self.diag = -(self.sub + self.sup)
        self._factors: Dict[float, np.ndarray] = {}
        LOGGER.debug("HeatSolver %s n=%d on [0, %s] with N=%d, dt=%s", space.kind.value, space.n, grid.R, N, self.dt)

    @classmethod
    def for_space(cls, space: ModelSpace, N: int, R: float | None = None, config: Config = DEFAULT_CONFIG) -> "HeatSolver":
        return cls(space, RadialGrid.for_space(space, N, R), config)

    def _shaped(self, coeff: np.ndarray, u: np.ndarray) -> np.ndarray:
        return coeff.reshape((-1,) + (1,) * (u.ndim - 1))

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Returns L_h u; u may carry extra columns."""
        u = np.asarray(u, dtype=float)
        out = self._shaped(self.diag, u) * u
        out[:-1] += self._shaped(self.sup[:-1], u) * u[1:]
        out[1:] += self._shaped(self.sub[1:], u) * u[:-1]
        return out

    def mass(self, u: np.ndarray) -> float | np.ndarray:
        """Weighted mass sum_i h V_i u_i, conserved by the scheme."""
        return self.grid.h * np.tensordot(self.volumes, np.asarray(u, dtype=float), axes=1)

    def mean(self, u: np.ndarray) -> float | np.ndarray:
        return self.mass(u) / (self.grid.h * self.volumes.sum())

    def _banded(self, c: float) -> np.ndarray:
        # I - c A in the (1, 1) band layout of solve_banded
        ab = self._factors.get(c)
        if ab is None:
            ab = np.zeros((3, self.grid.N + 1))
            ab[0, 1:] = -c * self.sup[:-1]
            ab[1, :] = 1.0 - c * self.diag
            ab[2, :-1] = -c * self.sub[1:]
            self._factors[c] = ab
        return ab

    def _solve(self, c: float, rhs: np.ndarray) -> np.ndarray:
        u = linalg.solve_banded((1, 1), self._banded(c), rhs, check_finite=False)
        if not np.all(np.isfinite(u)):
            log_event("error", {"msg": "Non-finite solver state", "space": self.space.kind.value, "N": self.grid.N})
            raise InstabilityError(f"{self.space.kind.value} n={self.space.n}, N={self.grid.N}")
        return u

    def advance(self, u: np.ndarray, duration: float, startup: bool = True) -> np.ndarray:
        """
        Evolves u over the given duration.

        With ``startup`` the first steps are replaced by backward-Euler half
        steps, which damps the Crank-Nicolson response to rough data.

        Args:
            u (np.ndarray): Node values, optionally with extra columns.
            duration (float): Time to advance, at least 0.
            startup (bool): Whether to begin with backward-Euler half steps.

        Returns:
            np.ndarray: The evolved values.
        """
        u = np.array(u, dtype=float)
        if duration == 0.0:
            return u
        duration = InputValidator.validate_time(duration, "duration")
        startup_full = math.ceil(self.config.startup_steps / 2) if startup else 0
        steps = max(math.ceil(duration / self.dt - 1e-9), startup_full, 1)
        k = duration / steps
        for _ in range(2 * startup_full):
            u = self._solve(0.5 * k, u)
        for _ in range(steps - startup_full):
            u = self._solve(0.5 * k, u + 0.5 * k * self.apply(u))
        return u

    def trajectory(self, u0: np.ndarray, times: Iterable[float]) -> Dict[float, np.ndarray]:
        """Returns the evolved values at every requested time, stepping through them in order."""
        out: Dict[float, np.ndarray] = {}
        u, prev = np.asarray(u0, dtype=float), 0.0
        for i, t in enumerate(sorted(set(float(t) for t in times))):
            u = self.advance(u, t - prev, startup=(i == 0))
            out[t] = u
            prev = t
        return out


def evolve(space: ModelSpace, f0: GridFunction, t: float, dt: float | None = None,
           config: Config = DEFAULT_CONFIG) -> GridFunction:
    """
    Returns P_t f0 on the grid of f0.

    Args:
        space (ModelSpace): The model space.
        f0 (GridFunction): Initial values.
        t (float): Time.
        dt (float | None): Time step, at most h; config.dt_ratio * h by default.
        config (Config): Solver settings.

    Raises:
        ParameterError: When dt exceeds the grid spacing.
        InstabilityError: When the state stops being finite.
    """
    solver = HeatSolver(space, f0.grid, config)
    if dt is not None:
        if not 0.0 < dt <= f0.grid.h:
            raise ParameterError(f"dt={dt} must lie in (0, h={f0.grid.h}]")
        solver.dt = dt
    return GridFunction(f0.grid, solver.advance(f0.values, InputValidator.validate_time(t)))


# ---------------------------------------------------
# Closed-form kernels
# ---------------------------------------------------

def euclidean_heat_kernel(n: int, t: float, r: np.ndarray) -> np.ndarray:
    """(4 pi t)^{-n/2} exp(-r^2/(4t))."""
    r = np.asarray(r, dtype=float)
    return (4.0 * math.pi * t) ** (-0.5 * n) * np.exp(-(r * r) / (4.0 * t))


def hyperbolic3_heat_kernel(kappa: float, t: float, r: np.ndarray) -> np.ndarray:
    """The heat kernel of H^3 with curvature -kappa^2 at geodesic distance r."""
    r = np.asarray(r, dtype=float)
    kr = kappa * r
    ratio = np.ones_like(kr)
    np.divide(kr, np.sinh(kr), out=ratio, where=kr > 0.0)
    return (4.0 * math.pi * t) ** -1.5 * ratio * np.exp(-kappa * kappa * t - (r * r) / (4.0 * t))


# ---------------------------------------------------
# Log-derivatives on the grid
# ---------------------------------------------------

def log_derivatives(space: ModelSpace, ptf: GridFunction, config: Config = DEFAULT_CONFIG) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns L P / P and Gamma(P)/P^2 at the interior nodes by centred differences.

    The end nodes and nodes with P below config.value_floor * max P are NaN.
    """
    grid, u = ptf.grid, ptf.values
    h = grid.h
    inner = u[1:-1]
    du = (u[2:] - u[:-2]) / (2.0 * h)
    lu = (u[2:] - 2.0 * inner + u[:-2]) / (h * h) + space.radial_drift(grid.nodes[1:-1]) * du
    floor = max(config.value_floor * float(np.max(np.abs(u))), _DIVISION_GUARD)
    keep = inner > floor
    lap = np.full_like(u, np.nan)
    gam = np.full_like(u, np.nan)
    lap[1:-1][keep] = lu[keep] / inner[keep]
    gam[1:-1][keep] = (du[keep] / inner[keep]) ** 2
    return lap, gam


def compute_X_G(cd: CurvatureDimension, space: ModelSpace, ptf: GridFunction,
                config: Config = DEFAULT_CONFIG) -> Tuple[GridFunction, GridFunction]:
    """
    Returns X = 4 L P/(n rho P) and G = Gamma(P)/P^2 as grid functions.

    Raises:
        ParameterError: When rho = 0; use log_derivatives instead.
    """
    if cd.rho == 0.0:
        raise ParameterError("X is undefined for rho = 0; use log_derivatives", code="CB002")
    lap, gam = log_derivatives(space, ptf, config)
    return GridFunction(ptf.grid, 4.0 * lap / (cd.n * cd.rho)), GridFunction(ptf.grid, gam)


# ---------------------------------------------------
# Inequality checks
# ---------------------------------------------------

def _locations(grid: RadialGrid, t: float) -> List[Tuple[float, float]]:
    return [(float(r), t) for r in grid.nodes]


def _vectorized(func, *arrays: np.ndarray) -> np.ndarray:
    out = np.full(arrays[0].shape, np.nan)
    for i, args in enumerate(zip(*arrays)):
        if not any(math.isnan(a) for a in args):
            out[i] = func(*args)
    return out


def _admissible_X(cd: CurvatureDimension, X: np.ndarray, t: float, tol: float) -> np.ndarray:
    # nodes at or above the limit become NaN; beyond tol they are a hard failure
    limit = domain_limit(cd.rho, t)
    excess = np.nanmax(X - limit) if np.any(~np.isnan(X)) else -math.inf
    if excess > tol:
        log_event("error", {"msg": "Admissible range violated", "rho": cd.rho, "t": t, "excess": excess})
        raise DomainError(f"X exceeds 1 + pi^2/(rho^2 t^2) = {limit} by {excess} at t={t}")
    return np.where(X < limit, X, np.nan)


def check_domain(cd: CurvatureDimension, space: ModelSpace, ptf: GridFunction, t: float,
                 tol: float = 0.0, config: Config = DEFAULT_CONFIG) -> MarginReport:
    """Margin of X < 1 + pi^2/(rho^2 t^2) over the interior nodes."""
    X, _ = compute_X_G(cd, space, ptf, config)
    margins = domain_limit(cd.rho, t) - X.values
    return MarginReport.from_margins("domain", margins, _locations(ptf.grid, t), tol)


def check_liyau(cd: CurvatureDimension, space: ModelSpace, ptf: GridFunction, t: float,
                tol: float = 0.0, config: Config = DEFAULT_CONFIG) -> MarginReport:
    """
    Margin of Gamma(P)/P^2 < (n/2) Phi_t(X) over the interior nodes.

    For rho = 0 the classical bound Gamma(P)/P^2 - L P/P <= n/(2t) is measured instead.

    Args:
        cd (CurvatureDimension): The CD(rho, n) pair to test.
        space (ModelSpace): The space P was computed on.
        ptf (GridFunction): P_t f.
        t (float): Time.
        tol (float): Allowed negative slack, also the allowed overshoot of the admissible range.
        config (Config): Value floor.

    Returns:
        MarginReport: Labelled 'liyau'; argmin is (r, t).

    Raises:
        DomainError: When X exceeds the admissible range by more than tol.
    """
    t = InputValidator.validate_time(t)
    lap, gam = log_derivatives(space, ptf, config)
    if cd.rho == 0.0:
        margins = lap + cd.n / (2.0 * t) - gam
    else:
        X = _admissible_X(cd, 4.0 * lap / (cd.n * cd.rho), t, tol)
        phi = _vectorized(lambda x: eval_phi(cd.rho, t, x), X)
        margins = 0.5 * cd.n * phi - gam
    return MarginReport.from_margins("liyau", margins, _locations(ptf.grid, t), tol)


def _entropy_terms(space: ModelSpace, columns: np.ndarray, grid: RadialGrid, config: Config):
    p, plogp_source, w = columns[:, 0], columns[:, 1], columns[:, 2]
    lap, gam = log_derivatives(space, GridFunction(grid, p), config)
    safe = np.where(p > _DIVISION_GUARD, p, np.nan)
    ent_ratio = (plogp_source - xlogy(p, p)) / safe
    return lap, gam, ent_ratio, w / safe


def check_local_logsob(cd: CurvatureDimension, space: ModelSpace, columns: np.ndarray, grid: RadialGrid,
                       t: float, tol: float = 0.0,
                       config: Config = DEFAULT_CONFIG) -> Tuple[MarginReport, MarginReport]:
    """
    Margins of the reverse and direct local logarithmic Sobolev inequalities.

    ``columns`` holds P_t f, P_t(f log f) and P_t(Gamma(f)/f), as produced by
    evolving Profile.columns. For rho != 0, with X = 4 L P/(n rho P) and
    w = rho^2 t^2 (1 - X):

        exp(-(2/n) Ent/P + (t rho/2) X - rho t) <= t S(w) (Phi_t(X) - (2/n) Gamma(P)/P^2)
        exp((2/n) Ent/P - (t rho/2) X + rho t)  <= t S(w) (Phi~_t(X) + (2/n) P(Gamma f/f)/P)

    For rho = 0 the limits are used, with v = L P/P:

        exp(-(2/n)(Ent/P - t v)) <= 1 + (2t/n)(v - Gamma(P)/P^2)
        exp((2/n)(Ent/P - t v))  <= 1 + (2t/n)(P(Gamma f/f)/P - v)

    Returns:
        Tuple[MarginReport, MarginReport]: ('logsob_reverse', 'logsob').
    """
    t = InputValidator.validate_time(t)
    n, rho = cd.n, cd.rho
    lap, gam, ent, w = _entropy_terms(space, columns, grid, config)
    if rho == 0.0:
        reverse = 1.0 + 2.0 * t / n * (lap - gam) - np.exp(-2.0 / n * (ent - t * lap))
        direct = 1.0 + 2.0 * t / n * (w - lap) - np.exp(2.0 / n * (ent - t * lap))
    else:
        X = _admissible_X(cd, 4.0 * lap / (n * rho), t, tol)
        prefactor = _vectorized(lambda x: t * eval_S(rho * rho * t * t * (1.0 - x)), X)
        phi = _vectorized(lambda x: eval_phi(rho, t, x), X)
        phi_tilde = _vectorized(lambda x: eval_phi_tilde(rho, t, x), X)
        shift = 0.5 * t * rho * X - rho * t
        reverse = prefactor * (phi - 2.0 / n * gam) - np.exp(-2.0 / n * ent + shift)
        direct = prefactor * (phi_tilde + 2.0 / n * w) - np.exp(2.0 / n * ent - shift)
    locations = _locations(grid, t)
    return (
        MarginReport.from_margins("logsob_reverse", reverse, locations, tol),
        MarginReport.from_margins("logsob", direct, locations, tol),
    )


def check_commutation(cd: CurvatureDimension, space: ModelSpace, columns: np.ndarray, grid: RadialGrid,
                      t: float, tol: float = 0.0, config: Config = DEFAULT_CONFIG) -> MarginReport:
    """
    Margin of P L(log P) >= P_t(f L log f)(1 + (2t/n) L(log P)), divided by P.

    Uses L log P = v - Gamma(P)/P^2 and P_t(f L log f) = L P - P_t(Gamma f/f).

    Raises:
        ParameterError: When rho < 0.
    """
    if cd.rho < 0.0:
        raise ParameterError(f"the commutation inequality needs rho >= 0, got {cd.rho}")
    t = InputValidator.validate_time(t)
    lap, gam, _, w = _entropy_terms(space, columns, grid, config)
    log_lap = lap - gam
    margins = log_lap - (lap - w) * (1.0 + 2.0 * t / cd.n * log_lap)
    return MarginReport.from_margins("commutation", margins, _locations(grid, t), tol)


@lru_cache(maxsize=256)
def _envelope(cd: CurvatureDimension, t: float, config: Config):
    return ultracontractive_envelope(cd, t, config)


@lru_cache(maxsize=1024)
def _exponent(cd: CurvatureDimension, s: float, t: float, d: float, config: Config) -> float:
    return harnack_exponent(cd, HarnackQuery(s, t, d), config)


def check_harnack(cd: CurvatureDimension, ps: GridFunction, pt: GridFunction, s: float, t: float,
                  radii: Sequence[Tuple[float, float]], tol: float = 0.0,
                  config: Config = DEFAULT_CONFIG) -> MarginReport:
    """
    Margin of log P_t f(y) + E(s, t, d) - log P_s f(x) over pairs of radii.

    The points x and y lie on one radial geodesic, so d = |r_x - r_y| with the
    radii snapped to grid nodes.

    Args:
        cd (CurvatureDimension): The CD(rho, n) pair.
        ps (GridFunction): P_s f.
        pt (GridFunction): P_t f.
        s (float): Time at x.
        t (float): Time at y.
        radii (Sequence[Tuple[float, float]]): (r_x, r_y) pairs.
        tol (float): Allowed negative slack.
        config (Config): Quadrature settings.

    Returns:
        MarginReport: Labelled 'harnack'; argmin is (r_x, r_y).
    """
    grid = pt.grid
    margins, locations = [], []
    for r_x, r_y in radii:
        i, j = grid.index(r_x), grid.index(r_y)
        d = abs(grid.nodes[i] - grid.nodes[j])
        exponent = _exponent(cd, float(s), float(t), float(d), config)
        margins.append(math.log(pt.values[j]) + exponent - math.log(ps.values[i]))
        locations.append((float(grid.nodes[i]), float(grid.nodes[j])))
    log_event("debug", {"msg": "Harnack check", "rho": cd.rho, "s": s, "t": t, "margins": margins})
    return MarginReport.from_margins("harnack", margins, locations, tol)


def check_ultracontractive(cd: CurvatureDimension, solver: HeatSolver, f0: GridFunction,
                           trajectory: Dict[float, GridFunction], tol: float = 0.0,
                           config: Config = DEFAULT_CONFIG) -> MarginReport:
    """
    Margin of lower <= P_t f / mean(f) <= upper for the ultracontractive envelope.

    Raises:
        ParameterError: When rho <= 0.
    """
    if cd.rho <= 0.0:
        raise ParameterError(f"ultracontractive envelope needs rho > 0, got {cd.rho}")
    mean = float(solver.mean(f0.values))
    margins, locations = [], []
    for t, ptf in sorted(trajectory.items()):
        envelope = _envelope(cd, float(t), config)
        ratio = ptf.values / mean
        slack = np.minimum(ratio - envelope.lower, envelope.upper - ratio)
        k = int(np.argmin(slack))
        margins.append(float(slack[k]))
        locations.append((float(solver.grid.nodes[k]), t))
    return MarginReport.from_margins("ultracontractive", margins, locations, tol)


def check_gradient_decay(cd: CurvatureDimension, space: ModelSpace, trajectory: Dict[float, GridFunction],
                         tol: float = 0.0, config: Config = DEFAULT_CONFIG) -> MarginReport:
    """Margin of Gamma(log P_t f) <= (3 n rho/2) e^2 e^{-2 rho t} at the times t >= 6/rho."""
    margins, locations = [], []
    for t, ptf in sorted(trajectory.items()):
        if cd.rho * t < 6.0:
            continue
        _, gam = log_derivatives(space, ptf, config)
        values = gradient_decay_bound(cd, t) - gam
        margins.extend(values)
        locations.extend(_locations(ptf.grid, t))
    return MarginReport.from_margins("gradient_decay", margins, locations, tol)
