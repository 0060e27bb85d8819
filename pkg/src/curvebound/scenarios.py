# scenarios.py
# ---------------------------------------------------
# Verification Scenarios
#
# This module provides the VerificationManager class, which runs heat_lab
# scenarios at several grid resolutions, calibrates the discretization
# tolerance of every margin by Richardson extrapolation, and writes the
# resulting MarginReports as CSV. Resolutions and scenarios run concurrently
# in worker threads.
# ---------------------------------------------------

from __future__ import annotations

import asyncio
import csv
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence, TextIO

from .config import ScenarioConfig
from .heat_lab import (
    GridFunction,
    HeatSolver,
    ModelSpace,
    Profile,
    RadialGrid,
    check_commutation,
    check_domain,
    check_gradient_decay,
    check_harnack,
    check_liyau,
    check_local_logsob,
    check_ultracontractive,
)
from .logging import LOGGER, async_log_event
from .reports import CSV_FIELDS, MarginReport


@dataclass
class ScenarioResult:
    """Calibrated reports of one scenario, keyed by label."""

    name: str
    reports: Dict[str, MarginReport] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports.values())

    @property
    def failures(self) -> List[str]:
        return [label for label, report in self.reports.items() if not report.passed]


def _tagged(report: MarginReport, tag: str) -> MarginReport:
    return replace(report, label=f"{report.label}[{tag}]")


def run_level(scenario: ScenarioConfig, N: int) -> Dict[str, MarginReport]:
    """
    Runs every check of a scenario on one grid with N cells.

    Args:
        scenario (ScenarioConfig): The scenario.
        N (int): Number of grid cells.

    Returns:
        Dict[str, MarginReport]: Raw reports keyed by label, e.g. 'liyau[t=1]'.
    """
    config = scenario.config
    space = ModelSpace(scenario.space, scenario.n, scenario.kappa)
    cd = space.cd
    solver = HeatSolver.for_space(space, N, scenario.R, config)
    grid = solver.grid
    profile = Profile.parse(scenario.f0, scenario.kappa)
    columns = profile.columns(grid)
    wanted = set(scenario.times)
    for s, t in scenario.harnack_times:
        wanted.update((s, t))
    trajectory = solver.trajectory(columns, wanted)
    states = {t: GridFunction(grid, values[:, 0]) for t, values in trajectory.items()}
    slack = config.margin_floor
    reports: List[MarginReport] = []

    for t in scenario.times:
        tag = f"t={t:g}"
        if "liyau" in scenario.checks:
            reports.append(_tagged(check_liyau(cd, space, states[t], t, slack, config), tag))
        if "domain" in scenario.checks and cd.rho != 0.0:
            reports.append(_tagged(check_domain(cd, space, states[t], t, config=config), tag))
        if "logsob" in scenario.checks:
            reverse, direct = check_local_logsob(cd, space, trajectory[t], grid, t, slack, config)
            reports.extend((_tagged(reverse, tag), _tagged(direct, tag)))
        if "commutation" in scenario.checks and cd.rho >= 0.0:
            reports.append(_tagged(check_commutation(cd, space, trajectory[t], grid, t, config=config), tag))

    if "harnack" in scenario.checks:
        for s, t in scenario.harnack_times:
            report = check_harnack(cd, states[s], states[t], s, t, scenario.harnack_radii, config=config)
            reports.append(_tagged(report, f"s={s:g},t={t:g}"))

    if "ultracontractive" in scenario.checks and cd.rho > 0.0:
        timed = {t: states[t] for t in scenario.times}
        reports.append(check_ultracontractive(cd, solver, profile.on(grid), timed, config=config))
        if max(scenario.times) * cd.rho >= 6.0:
            reports.append(check_gradient_decay(cd, space, timed, config=config))

    LOGGER.debug("Scenario %s at N=%d: %d report(s)", scenario.name, N, len(reports))
    return {report.label: report for report in reports}


def calibrate(levels: Sequence[Dict[str, MarginReport]], spacings: Sequence[float],
              floor: float) -> Dict[str, MarginReport]:
    """
    Attaches a discretization tolerance and an extrapolated margin to the finest reports.

    With margins m_k on spacings h_k (coarse to fine), the error constant is
    C = max |m_a - m_b| / |h_a^2 - h_b^2| over all pairs, the tolerance is
    C h^2 + floor at the finest spacing h, and the extrapolated margin is
    m_fine + (m_fine - m_prev) / ((h_prev/h_fine)^2 - 1).

    Args:
        levels (Sequence[Dict[str, MarginReport]]): Raw reports per level, coarse to fine.
        spacings (Sequence[float]): Grid spacing per level.
        floor (float): Absolute slack added to every tolerance.

    Returns:
        Dict[str, MarginReport]: Calibrated reports of the finest level.
    """
    finest, h = levels[-1], spacings[-1]
    calibrated = {}
    for label, report in finest.items():
        margins = [level[label].min_margin for level in levels if label in level]
        if len(margins) < 2 or not all(math.isfinite(m) for m in margins):
            calibrated[label] = replace(report, tolerance=floor)
            continue
        hs = spacings[-len(margins):]
        constant = max(
            abs(margins[a] - margins[b]) / abs(hs[a] ** 2 - hs[b] ** 2)
            for a in range(len(margins)) for b in range(a + 1, len(margins))
        )
        ratio = (hs[-2] / hs[-1]) ** 2
        extrapolated = margins[-1] + (margins[-1] - margins[-2]) / (ratio - 1.0)
        calibrated[label] = replace(
            report,
            tolerance=constant * h * h + floor,
            extrapolated=extrapolated,
            extrapolation_floor=floor,
        )
    return calibrated


class VerificationManager:
    """
    Runs verification scenarios and collects their calibrated reports.

    Attributes:
        scenarios (List[ScenarioConfig]): The scenarios to run.
    """

    def __init__(self, scenarios: Sequence[ScenarioConfig]) -> None:
        self.scenarios = list(scenarios)

    async def run_scenario(self, scenario: ScenarioConfig) -> ScenarioResult:
        """
        Runs one scenario at all refinement levels concurrently and calibrates the result.

        Args:
            scenario (ScenarioConfig): The scenario.

        Returns:
            ScenarioResult: The calibrated reports.
        """
        levels = scenario.levels
        await async_log_event("info", {"msg": "Running scenario", "scenario": scenario.name, "levels": levels})
        raw = await asyncio.gather(*(asyncio.to_thread(run_level, scenario, N) for N in levels))
        space = ModelSpace(scenario.space, scenario.n, scenario.kappa)
        spacings = [RadialGrid.for_space(space, N, scenario.R).h for N in levels]
        result = ScenarioResult(scenario.name, calibrate(raw, spacings, scenario.config.margin_floor))
        if result.passed:
            await async_log_event("success", {"msg": "Scenario passed", "scenario": scenario.name})
        else:
            await async_log_event("error", {"msg": "Scenario failed", "scenario": scenario.name,
                                            "failures": result.failures})
        return result

    async def run_all(self) -> List[ScenarioResult]:
        """Runs every scenario concurrently."""
        return list(await asyncio.gather(*(self.run_scenario(s) for s in self.scenarios)))

    @staticmethod
    def write_csv(results: Sequence[ScenarioResult], stream: TextIO) -> None:
        """Writes one row per report with LF line endings."""
        writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for result in results:
            for report in result.reports.values():
                writer.writerow(report.as_row(result.name))
