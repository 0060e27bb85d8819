# reports.py
# ---------------------------------------------------
# Margin Reports
#
# A MarginReport records the worst slack of one inequality over a grid:
# the minimum of (right-hand side - left-hand side), where it occurred, and
# the tolerance it was judged against.
# ---------------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence, Tuple

import numpy as np

CSV_FIELDS = ("scenario", "label", "min_margin", "argmin", "tolerance", "extrapolated", "passed")


@dataclass(frozen=True)
class MarginReport:
    """
    Worst-case slack of an inequality.

    Attributes:
        label (str): Name of the inequality or competitor.
        min_margin (float): Minimum of RHS - LHS over the grid.
        argmin (Tuple[float, ...]): Location of the minimum, e.g. (X, G) or (r, t).
        tolerance (float): Allowed negative slack.
        extrapolated (Optional[float]): Richardson-extrapolated margin, if calibrated.
    """

    label: str
    min_margin: float
    argmin: Tuple[float, ...] = ()
    tolerance: float = 0.0
    extrapolated: Optional[float] = None
    extrapolation_floor: float = field(default=0.0, repr=False)

    @property
    def passed(self) -> bool:
        if math.isnan(self.min_margin):
            return False
        if self.min_margin < -self.tolerance:
            return False
        if self.extrapolated is not None and self.extrapolated < -self.extrapolation_floor:
            return False
        return True

    @classmethod
    def from_margins(
        cls,
        label: str,
        margins: Sequence[float],
        locations: Sequence[Tuple[float, ...]],
        tolerance: float = 0.0,
    ) -> "MarginReport":
        """
        Builds a report from per-point margins.

        Args:
            label (str): Name of the inequality.
            margins (Sequence[float]): RHS - LHS at every point; NaN entries are skipped.
            locations (Sequence[Tuple[float, ...]]): The point belonging to each margin.
            tolerance (float): Allowed negative slack.

        Returns:
            MarginReport: The report; an empty grid yields +inf margin.
        """
        values = np.asarray(margins, dtype=float)
        finite = ~np.isnan(values)
        if not finite.any():
            return cls(label=label, min_margin=math.inf, tolerance=tolerance)
        index = int(np.nanargmin(values))
        return cls(
            label=label,
            min_margin=float(values[index]),
            argmin=tuple(float(v) for v in locations[index]),
            tolerance=tolerance,
        )

    def with_tolerance(self, tolerance: float) -> "MarginReport":
        return replace(self, tolerance=tolerance)

    def as_row(self, scenario: str = "") -> dict[str, Any]:
        return {
            "scenario": scenario,
            "label": self.label,
            "min_margin": repr(self.min_margin),
            "argmin": " ".join(repr(v) for v in self.argmin),
            "tolerance": repr(self.tolerance),
            "extrapolated": "" if self.extrapolated is None else repr(self.extrapolated),
            "passed": "true" if self.passed else "false",
        }
