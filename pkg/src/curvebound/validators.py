# validators.py
# ---------------------------------------------------
# Input Validation (InputValidator)
#
# This module centralizes the parameter checks shared by every bound so that a
# rejected input is logged exactly once, as a structured 'error' event, before
# the matching exception is raised.
# ---------------------------------------------------

import math
from typing import Any, Dict

from .errors import CurveBoundError, DomainError, HypothesisError, ParameterError
from .logging import LOGGER, log_event


def _reject(error: CurveBoundError, details: Dict[str, Any]) -> CurveBoundError:
    log_event("error", {"msg": str(error), "code": error.code, **details})
    return error


class InputValidator:
    """
    Centralizes input validation checks and logging to prevent duplicate logging.

    All methods return the validated value as a float so callers can write
    ``t = InputValidator.validate_time(t)``.
    """

    @staticmethod
    def validate_finite(value: float, name: str) -> float:
        value = float(value)
        if not math.isfinite(value):
            raise _reject(ParameterError(f"{name}={value} is not finite"), {name: value})
        return value

    @staticmethod
    def validate_dimension(n: float) -> float:
        """
        Validates the dimension parameter of CD(rho, n).

        Args:
            n (float): The dimension parameter.

        Returns:
            float: n, if finite and at least 1.

        Raises:
            ParameterError: When n < 1 or n is not finite.
        """
        n = float(n)
        if not math.isfinite(n) or n < 1.0:
            raise _reject(ParameterError(f"n={n}", code="CB004"), {"n": n})
        LOGGER.debug("Dimension n=%s validated", n)
        return n

    @staticmethod
    def validate_rho_nonzero(rho: float) -> float:
        rho = InputValidator.validate_finite(rho, "rho")
        if rho == 0.0:
            raise _reject(ParameterError("rho=0", code="CB002"), {"rho": rho})
        return rho

    @staticmethod
    def validate_time(t: float, name: str = "t") -> float:
        """
        Validates a time argument.

        Args:
            t (float): The time value.
            name (str): The argument name used in the log event.

        Returns:
            float: t, if finite and strictly positive.

        Raises:
            ParameterError: When t <= 0 or t is not finite.
        """
        t = float(t)
        if not math.isfinite(t) or t <= 0.0:
            raise _reject(ParameterError(f"{name}={t}", code="CB003"), {name: t})
        return t

    @staticmethod
    def validate_distance(d: float) -> float:
        d = float(d)
        if not math.isfinite(d) or d < 0.0:
            raise _reject(ParameterError(f"d={d} must be a finite non-negative distance"), {"d": d})
        return d

    @staticmethod
    def validate_kernel_argument(w: float) -> float:
        """
        Validates the unified kernel argument w = rho^2 t^2 (1 - x).

        Raises:
            DomainError: When w <= -pi^2, where the cotangent branch has its pole.
        """
        w = float(w)
        if math.isnan(w) or w <= -math.pi**2:
            raise _reject(DomainError(f"w={w} <= -pi^2"), {"w": w})
        return w

    @staticmethod
    def validate_phi_argument(rho: float, t: float, x: float) -> float:
        """
        Validates the argument x of Phi_t against the admissible range.

        Args:
            rho (float): Non-zero curvature lower bound.
            t (float): Positive time.
            x (float): The normalized Laplacian ratio.

        Returns:
            float: x, if x < 1 + pi^2 / (rho^2 t^2).

        Raises:
            DomainError: With code CB011 when x reaches the domain limit.
        """
        x = float(x)
        limit = 1.0 + math.pi**2 / (rho * rho * t * t)
        if math.isnan(x) or x >= limit:
            raise _reject(
                DomainError(f"x={x} is not below the limit 1 + pi^2/(rho^2 t^2) = {limit!r} for rho={rho}, t={t}", code="CB011"),
                {"rho": rho, "t": t, "x": x, "limit": limit},
            )
        return x

    @staticmethod
    def validate_hypothesis(condition: bool, detail: str, **details: Any) -> None:
        """
        Raises HypothesisError when an estimate is used outside its hypothesis.
        """
        if not condition:
            raise _reject(HypothesisError(detail), details)
