"""
Tests for logging setup and the per-run context.
"""
import logging

import structlog

from src.utils.logging import bind_run, configure_logging, get_logger


def test_bind_run_replaces_context():
    bind_run(command="fit", version="1.0")
    bind_run(command="test")
    assert structlog.contextvars.get_contextvars() == {"command": "test"}
    structlog.contextvars.clear_contextvars()


def test_configure_logging_sets_level():
    configure_logging("WARNING")
    assert logging.getLogger().level == logging.WARNING
    configure_logging("INFO")


def test_get_logger_accepts_events():
    configure_logging("DEBUG")
    logger = get_logger("tests.logging")
    logger.debug("event_logged", value=1)
