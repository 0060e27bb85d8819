# logging.py
# ---------------------------------------------------
# Logging Configuration & Structured Event Helpers
#
# This module provides the package logger and two helpers that emit structured
# JSON events: a synchronous one for the numerical code paths and an
# asynchronous one for the verification runner.
#
# IMPORTANT:
#   This library does not configure logging (e.g., by calling logging.basicConfig).
#   The application that imports it (or the curvebound command line) decides on
#   handlers and levels, for example:
#
#       import logging
#
#       logging.basicConfig(
#           level=logging.DEBUG,
#           format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
#       )
#
# ---------------------------------------------------

import json
import logging
from typing import Any, Dict

# Set up a global logger for the package.
LOGGER = logging.getLogger(__name__)

_LEVELS = {
    "error": logging.ERROR,
    "warning": logging.WARNING,
    "debug": logging.DEBUG,
    "success": logging.INFO,
}


def _jsonable(value: Any) -> Any:
    # numpy scalars expose item(); tuples and arrays become lists
    if hasattr(value, "tolist"):
        return value.tolist()
    if hasattr(value, "item"):
        return value.item()
    return str(value)


def log_event(event_type: str, details: Dict[str, Any]) -> None:
    """
    Logs an event with its details as a single JSON line.

    Args:
        event_type (str): The type of event ('error', 'info', 'warning', 'debug', 'success').
        details (Dict[str, Any]): A dictionary containing event-specific details.
    """
    level = _LEVELS.get(event_type.lower(), logging.INFO)
    if not LOGGER.isEnabledFor(level):
        return
    log_data = {"event": event_type, "details": details}
    LOGGER.log(level, json.dumps(log_data, default=_jsonable))


async def async_log_event(event_type: str, details: Dict[str, Any]) -> None:
    """
    Asynchronously logs an event with its details.

    Args:
        event_type (str): The type of event (e.g., 'error', 'info', 'warning', 'debug', 'success').
        details (Dict[str, Any]): A dictionary containing event-specific details.
    """
    log_event(event_type, details)
