"""
Logging configuration for the Pythagorean Weibull toolkit.

Library modules log key/value events through structlog; the command-line
interface configures the output once per invocation and binds the running
subcommand so every event of a run can be traced back to it.
"""
import logging
import sys
from typing import Any, Optional

import structlog

from src.config import settings


def configure_logging(log_level: Optional[str] = None) -> None:
    """
    Route structlog through stdlib logging to stderr.

    stdout carries only report output, so it stays byte-identical between runs.

    Args:
        log_level: Overrides LOG_LEVEL and DEBUG from the settings
    """
    level = log_level or settings.LOG_LEVEL or ("DEBUG" if settings.DEBUG else "INFO")
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level.upper()),
        force=True,
    )

    if settings.LOG_JSON:
        renderer: Any = structlog.processors.JSONRenderer(sort_keys=True)
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=False)

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.format_exc_info,
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def bind_run(**values: Any) -> None:
    """Replace the run context (e.g. command, seed) attached to every event."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(**values)


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """
    Get a configured structlog logger.

    Args:
        name: Logger name, typically __name__

    Returns:
        Configured logger instance
    """
    return structlog.get_logger(name)
