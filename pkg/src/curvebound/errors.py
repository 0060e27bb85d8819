# errors.py
# ---------------------------------------------------
# Error Codes & Exceptions
#
# Every failure raised by the package carries a short code from ERROR_MESSAGES
# (see ERROR_MESSAGE.md) together with a detail string. The command line maps
# these exceptions onto its exit codes.
# ---------------------------------------------------

from typing import Optional

ERROR_MESSAGES = {
    "CB001": "Argument outside the domain of the function",
    "CB002": "Curvature parameter rho must be non-zero here",
    "CB003": "Time must be strictly positive",
    "CB004": "Dimension parameter n must be at least 1",
    "CB005": "Argument outside the range of the Legendre transform",
    "CB006": "Harnack comparison only runs forward in time for rho <= 0",
    "CB007": "Hypothesis of the estimate is not satisfied",
    "CB008": "Root search or quadrature did not converge",
    "CB009": "Non-finite value in the heat solver state",
    "CB010": "Invalid scenario configuration",
    "CB011": "Laplacian ratio violates the admissible range X < 1 + pi^2/(rho^2 t^2)",
    "CB012": "Invalid parameter value",
    "CB013": "Grid resolution too coarse",
}

DEFAULT_ERROR_MESSAGE = "The bound could not be evaluated"


def get_error_message(code: str) -> str:
    """
    Returns the human-readable message for an error code.

    Args:
        code (str): The error code, e.g. 'CB001'.

    Returns:
        str: The mapped message, or the default message for unknown codes.
    """
    return ERROR_MESSAGES.get(code, DEFAULT_ERROR_MESSAGE)


class CurveBoundError(Exception):
    """Base class for all package errors."""

    code = "CB000"

    def __init__(self, detail: str = "", code: Optional[str] = None) -> None:
        if code is not None:
            self.code = code
        self.detail = detail
        message = get_error_message(self.code)
        super().__init__(f"[{self.code}] {message}" + (f": {detail}" if detail else ""))


class DomainError(CurveBoundError, ValueError):
    code = "CB001"


class ParameterError(CurveBoundError, ValueError):
    code = "CB012"


class TransformRangeError(CurveBoundError, ValueError):
    code = "CB005"


class HypothesisError(CurveBoundError):
    code = "CB007"


class ConvergenceError(CurveBoundError, RuntimeError):
    code = "CB008"


class InstabilityError(CurveBoundError, RuntimeError):
    code = "CB009"


class ConfigurationError(CurveBoundError):
    code = "CB010"
