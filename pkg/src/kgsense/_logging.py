"""Logging setup shared by the engine, the trainers and the CLI."""

from __future__ import annotations

import logging
import sys
import time
from typing import ClassVar


class ContextLogger(logging.LoggerAdapter):
    """Logger adapter that prefixes every message with a subsystem name."""

    def process(self, msg, kwargs):
        if self.extra:
            return f"{self.extra['context']} | {msg}", kwargs
        return msg, kwargs


def get_logger(name: str, context: str) -> ContextLogger:
    """Return a logger for ``name`` whose messages start with ``context``.

    Example:
        >>> logger = get_logger(__name__, "engine")
        >>> logger.info("Loaded nine05.spec")
        # [I 2026-10-17 10:00:00.000 kgsense] engine | Loaded nine05.spec
    """
    return ContextLogger(logging.getLogger(name), {"context": context})


class PlainFormatter(logging.Formatter):
    """``[L timestamp app] message`` lines without colour."""

    LEVEL_CODES: ClassVar[dict[str, str]] = {
        "DEBUG": "D",
        "INFO": "I",
        "WARNING": "W",
        "ERROR": "E",
        "CRITICAL": "C",
    }

    def _prefix(self, record: logging.LogRecord) -> str:
        level_code = self.LEVEL_CODES.get(record.levelname, record.levelname[0])
        stamp = time.strftime("%Y-%m-%d %H:%M:%S", self.converter(record.created))
        root = record.name.split(".")[0]
        app_name = "kgsense" if root in ("kgsense", "__main__") else root
        return f"[{level_code} {stamp}.{int(record.msecs):03d} {app_name}]"

    def format(self, record: logging.LogRecord) -> str:
        message = f"{self._prefix(record)} {record.getMessage()}"
        if record.exc_info:
            message += "\n" + self.formatException(record.exc_info)
        return message


class ColoredFormatter(PlainFormatter):
    """Same layout as :class:`PlainFormatter`, with the prefix coloured by level."""

    COLORS: ClassVar[dict[str, str]] = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET: ClassVar[str] = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, self.RESET)
        message = f"{color}{self._prefix(record)}{self.RESET} {record.getMessage()}"
        if record.exc_info:
            message += "\n" + self.formatException(record.exc_info)
        return message


def setup_colored_logging(level: int = logging.INFO) -> None:
    """Route all logging to stderr, coloured when stderr is a terminal."""
    supports_color = hasattr(sys.stderr, "isatty") and sys.stderr.isatty()
    formatter = ColoredFormatter() if supports_color else PlainFormatter()

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)
    root_logger.addHandler(handler)

    logging.getLogger("kgsense").setLevel(level)
    for noisy in ("numpy", "pandas"):
        logging.getLogger(noisy).setLevel(logging.WARNING)
