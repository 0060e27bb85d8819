# config.py
# ---------------------------------------------------
# Configuration Classes
#
# This module defines the numerical knobs shared by the library (Config) and
# the verification scenarios read from plain-text key=value files
# (ScenarioConfig). A scenario file without section headers describes one
# scenario; '[name]' headers describe several.
# ---------------------------------------------------

from __future__ import annotations

import configparser
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ConfigurationError
from .logging import LOGGER, log_event

SPACES = ("euclidean", "sphere", "hyperbolic")
CHECKS = ("liyau", "domain", "logsob", "harnack", "ultracontractive", "commutation")


class Config:
    """
    Stores numerical settings.

    Attributes:
        quad_epsrel (float): Relative tolerance of adaptive quadrature.
        quad_epsabs (float): Absolute floor of adaptive quadrature.
        quad_limit (int): Maximum number of quadrature subintervals.
        dominance_x_max (float): Left extent of the dominance grid, X in [-x_max, xi].
        dominance_grid (int): Number of dominance grid points.
        margin_floor (float): Absolute slack granted to extrapolated margins.
        value_floor (float): Nodes with P_t f below value_floor * max P_t f are skipped.
        startup_steps (int): Backward-Euler half steps before Crank-Nicolson.
        dt_ratio (float): Time step as a multiple of the grid spacing.
    """

    def __init__(
        self,
        quad_epsrel: float = 1e-10,
        quad_epsabs: float = 1e-14,
        quad_limit: int = 200,
        dominance_x_max: float = 50.0,
        dominance_grid: int = 400,
        margin_floor: float = 1e-8,
        value_floor: float = 1e-6,
        startup_steps: int = 4,
        dt_ratio: float = 0.5,
    ) -> None:
        self.quad_epsrel = quad_epsrel
        self.quad_epsabs = quad_epsabs
        self.quad_limit = quad_limit
        self.dominance_x_max = dominance_x_max
        self.dominance_grid = dominance_grid
        self.margin_floor = margin_floor
        self.value_floor = value_floor
        self.startup_steps = startup_steps
        self.dt_ratio = dt_ratio


DEFAULT_CONFIG = Config()


def _floats(raw: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in raw.replace(",", " ").split())


def _pairs(raw: str) -> Tuple[Tuple[float, float], ...]:
    pairs = []
    for item in raw.replace(",", " ").split():
        left, sep, right = item.partition(":")
        if not sep:
            raise ValueError(f"expected a:b pair, got '{item}'")
        pairs.append((float(left), float(right)))
    return tuple(pairs)


class ScenarioConfig:
    """
    One heat-semigroup verification scenario.

    Attributes:
        name (str): Section name, used in reports.
        space (str): 'euclidean', 'sphere' or 'hyperbolic'.
        n (int): Manifold dimension.
        kappa (float): Curvature scale of the model space.
        N (int): Finest number of grid cells.
        R (Optional[float]): Truncation radius; the sphere always uses pi/kappa.
        f0 (str): Initial profile, e.g. 'cosine:1,0.5' or 'gaussian:1'.
        times (Tuple[float, ...]): Evaluation times.
        checks (Tuple[str, ...]): Inequalities to verify.
        harnack_times (Tuple[Tuple[float, float], ...]): (s, t) pairs.
        harnack_radii (Tuple[Tuple[float, float], ...]): (r_x, r_y) radii on one geodesic.
        refinements (int): Number of resolutions N/2^k used for calibration.
        config (Config): Numerical settings, with margin_floor/value_floor overrides.
    """

    def __init__(
        self,
        name: str,
        space: str,
        n: int,
        kappa: float = 1.0,
        N: int = 2000,
        R: Optional[float] = None,
        f0: str = "constant:1",
        times: Sequence[float] = (1.0,),
        checks: Sequence[str] = ("liyau", "domain", "logsob"),
        harnack_times: Sequence[Tuple[float, float]] = (),
        harnack_radii: Sequence[Tuple[float, float]] = ((0.0, 0.0),),
        refinements: int = 3,
        config: Optional[Config] = None,
    ) -> None:
        self.name = name
        self.space = space
        self.n = n
        self.kappa = kappa
        self.N = N
        self.R = R
        self.f0 = f0
        self.times = tuple(times)
        self.checks = tuple(checks)
        self.harnack_times = tuple(harnack_times)
        self.harnack_radii = tuple(harnack_radii)
        self.refinements = refinements
        self.config = config or Config()
        self._validate()

    def _validate(self) -> None:
        if self.space not in SPACES:
            raise ConfigurationError(f"[{self.name}] unknown space '{self.space}'")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigurationError(f"[{self.name}] unknown checks {unknown}")
        if self.n < 1 or self.kappa <= 0 or self.N < 100 or self.refinements < 1:
            raise ConfigurationError(
                f"[{self.name}] need n >= 1, kappa > 0, N >= 100 and refinements >= 1"
            )
        if self.N >> (self.refinements - 1) < 100:
            raise ConfigurationError(f"[{self.name}] coarsest level N/2^k drops below 100 cells")
        if not self.times or min(self.times) <= 0:
            raise ConfigurationError(f"[{self.name}] times must be positive")
        if "harnack" in self.checks and not self.harnack_times:
            raise ConfigurationError(f"[{self.name}] harnack check needs harnack_times")

    @property
    def levels(self) -> List[int]:
        """Cell counts from coarsest to finest, e.g. [N/4, N/2, N]."""
        return [self.N >> k for k in reversed(range(self.refinements))]

    @classmethod
    def from_section(cls, name: str, section: Dict[str, str]) -> "ScenarioConfig":
        """
        Builds a scenario from the raw key=value strings of one section.

        Raises:
            ConfigurationError: On missing keys or unparsable values.
        """
        try:
            if "space" not in section or "n" not in section:
                raise KeyError("space and n are required")
            config = Config()
            if "margin_floor" in section:
                config.margin_floor = float(section["margin_floor"])
            if "value_floor" in section:
                config.value_floor = float(section["value_floor"])
            kwargs = dict(
                name=name,
                space=section["space"].strip().lower(),
                n=int(section["n"]),
                kappa=float(section.get("kappa", "1")),
                N=int(section.get("N", "2000")),
                R=float(section["R"]) if "R" in section else None,
                f0=section.get("f0", "constant:1").strip(),
                times=_floats(section.get("times", "1")),
                harnack_times=_pairs(section.get("harnack_times", "")),
                harnack_radii=_pairs(section.get("harnack_radii", "0:0")),
                refinements=int(section.get("refinements", "3")),
                config=config,
            )
            if "checks" in section:
                kwargs["checks"] = tuple(section["checks"].replace(",", " ").split())
        except (KeyError, ValueError) as err:
            log_event("error", {"msg": "Invalid scenario", "scenario": name, "reason": str(err)})
            raise ConfigurationError(f"[{name}] {err}") from err
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str, default_name: str = "scenario") -> List["ScenarioConfig"]:
        """
        Parses every scenario of a key=value document.

        Args:
            text (str): The document; '#' starts a comment line.
            default_name (str): Section name used when the document has no headers.

        Returns:
            List[ScenarioConfig]: One entry per section.
        """
        if not text.lstrip().startswith("["):
            text = f"[{default_name}]\n{text}"
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        # keep 'N' (cells) apart from 'n' (dimension)
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as err:
            raise ConfigurationError(str(err)) from err
        scenarios = [cls.from_section(name, dict(parser[name])) for name in parser.sections()]
        if not scenarios:
            raise ConfigurationError("no scenario found")
        LOGGER.debug("Parsed %d scenario(s): %s", len(scenarios), [s.name for s in scenarios])
        return scenarios

    @classmethod
    def from_file(cls, path: str | Path) -> List["ScenarioConfig"]:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigurationError(f"cannot read {path}: {err}") from err
        return cls.from_text(text, default_name=path.stem)
