"""
Structured logging for the reconstruction toolkit.

structlog renders the event dictionaries of the algorithm modules; loguru owns
the sinks (stderr and the optional rotating file) and the component loggers
bound by the attack classes. Both see the same run context, so every event of
a CLI command carries the command name and seed.
"""

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

import structlog
from loguru import logger as loguru_logger

from .config import LoggingConfig

TEXT_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[component]}</cyan> - <level>{message}</level>"
)


class StructuredLogger:
    """Configures structlog processors and loguru sinks from a logging section."""

    def __init__(self, settings: LoggingConfig, name: str = "grand"):
        """
        Initialize structured logger.

        Args:
            settings: Level, format, outputs and file rotation
            name: Logger name
        """
        self.name = name
        self.settings = settings
        self.level = settings.level.upper()

        self._configure_loguru()
        self._configure_structlog()

    def _configure_loguru(self):
        # stdout stays reserved for command output and banners
        loguru_logger.remove()
        loguru_logger.configure(extra={"component": "-"})
        serialize = self.settings.format == "json"

        if "console" in self.settings.output:
            if serialize:
                loguru_logger.add(sys.stderr, format="{message}", level=self.level, serialize=True)
            else:
                loguru_logger.add(sys.stderr, format=TEXT_FORMAT, level=self.level, colorize=True)

        if "file" in self.settings.output and self.settings.file_path:
            Path(self.settings.file_path).parent.mkdir(parents=True, exist_ok=True)
            loguru_logger.add(
                self.settings.file_path,
                rotation=f"{self.settings.max_file_size_mb} MB",
                retention=self.settings.backup_count,
                level=self.level,
                serialize=serialize,
            )

    def _configure_structlog(self):
        processors = [
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
        ]
        if self.settings.format == "json":
            processors.append(structlog.processors.JSONRenderer())
        else:
            processors.append(structlog.dev.ConsoleRenderer(colors=False))

        structlog.configure(
            processors=processors,
            wrapper_class=structlog.make_filtering_bound_logger(logging.getLevelName(self.level)),
            context_class=dict,
            logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
            cache_logger_on_first_use=False,
        )

    def get_logger(self, context: Optional[Dict[str, Any]] = None) -> structlog.BoundLogger:
        """Bound structlog logger, with ``context`` attached to every event."""
        logger = structlog.get_logger(self.name)
        return logger.bind(**context) if context else logger


_logger_instance: Optional[StructuredLogger] = None


def setup_logger(
    settings: Optional[LoggingConfig] = None,
    level: Optional[str] = None,
    log_format: Optional[str] = None,
) -> StructuredLogger:
    """
    Setup the global logger instance.

    Args:
        settings: Logging section of the configuration; defaults apply when omitted
        level: Overrides ``settings.level``
        log_format: Overrides ``settings.format``

    Returns:
        Configured StructuredLogger instance
    """
    global _logger_instance

    settings = settings or LoggingConfig()
    overrides = {k: v for k, v in (("level", level), ("format", log_format)) if v}
    if overrides:
        settings = settings.model_copy(update=overrides)

    _logger_instance = StructuredLogger(settings)
    return _logger_instance


def get_logger(context: Optional[Dict[str, Any]] = None) -> structlog.BoundLogger:
    """
    Get a logger from the global instance.

    Until ``setup_logger`` is called, only warnings and errors are emitted.
    """
    global _logger_instance

    if _logger_instance is None:
        _logger_instance = StructuredLogger(LoggingConfig(level="WARNING"))

    return _logger_instance.get_logger(context)


@contextmanager
def run_context(**fields: Any) -> Iterator[None]:
    """Attach ``fields`` to every structlog and loguru event logged inside the block."""
    with structlog.contextvars.bound_contextvars(**fields), loguru_logger.contextualize(**fields):
        yield
