"""
Logging for heislab.

Library modules log through ``logging.getLogger(__name__)`` and never print. The CLI writes
reports and nothing else to stdout, so log records, the messages of :data:`click_logger` and
progress lines all go to stderr.

The log level comes from, in increasing precedence, the ``log_level`` settings field, the
``HEISLAB_LOG_LEVEL`` environment variable and the ``--log-level`` option. Scripts that use
heislab as a library set it up themselves:

.. code-block::

    import logging

    from heislab.common.logging import initialize_logging, teardown_logging

    initialize_logging(log_level="info")
    logging.getLogger(__name__).info("measuring distortion")
    teardown_logging()

Threads started by :func:`heislab.common.util.chunked_map` log through the same handlers.
"""

import logging
import os
import sys
from contextlib import contextmanager
from typing import Iterator, Optional

import click

from .aliases import PathOrStr
from .exceptions import ConfigurationError
from .util import _parse_bool

FILE_FRIENDLY_LOGGING: bool = _parse_bool(os.environ.get("FILE_FRIENDLY_LOGGING", False))
"""
Strips styling from messages and turns progress bars into a log line every 10 seconds.

Set with the ``FILE_FRIENDLY_LOGGING`` environment variable, the ``file_friendly_logging``
settings field or ``--file-friendly-logging``.
"""

HEISLAB_LOG_LEVEL: Optional[str] = os.environ.get("HEISLAB_LOG_LEVEL", None)
"""
The global log level: "debug", "info", "warning" or "error", in any case. It does not apply to
:data:`click_logger` or :data:`progress_logger`.
"""

# Off until initialize_logging() turns it on.
HEISLAB_CLICK_LOGGER_ENABLED: bool = _parse_bool(
    os.environ.get("HEISLAB_CLICK_LOGGER_ENABLED", False)
)

LOG_FORMAT = "[%(asctime)s %(levelname)s %(threadName)s %(name)s] %(message)s"

QUIET_LOGGERS = ("networkx",)


class HeislabFormatter(logging.Formatter):
    """
    Removes ANSI styling when ``plain`` is set, or when it is left as ``None`` and
    :data:`FILE_FRIENDLY_LOGGING` is on.
    """

    def __init__(self, fmt: str = LOG_FORMAT, plain: Optional[bool] = None):
        super().__init__(fmt)
        self.plain = plain

    def format(self, record: logging.LogRecord) -> str:
        out = super().format(record)
        plain = FILE_FRIENDLY_LOGGING if self.plain is None else self.plain
        return click.unstyle(out) if plain else out


click_logger = logging.getLogger("click")
"""
User-facing messages of the CLI, such as "Wrote distortion report to out.json". They are
echoed to stderr with :func:`click.echo`, without the log prefix.
"""

click_logger.propagate = False


class ClickLoggerHandler(logging.Handler):
    def emit(self, record: logging.LogRecord) -> None:
        message = record.getMessage()
        click.echo(click.unstyle(message) if FILE_FRIENDLY_LOGGING else message, err=True)


click_logger.addHandler(ClickLoggerHandler())
click_logger.disabled = not HEISLAB_CLICK_LOGGER_ENABLED

progress_logger = logging.getLogger("heislab.progress")
"""
Receives the lines of :class:`~heislab.common.tqdm.Tqdm` bars under
:data:`FILE_FRIENDLY_LOGGING`. It stays at INFO whatever the global level is.
"""

progress_logger.propagate = False
progress_logger.setLevel(logging.INFO)


def _log_uncaught(exctype, value, traceback):
    if issubclass(exctype, KeyboardInterrupt):
        sys.__excepthook__(exctype, value, traceback)
        return
    logging.getLogger().critical("Uncaught exception", exc_info=(exctype, value, traceback))


def _stderr_handler() -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(HeislabFormatter())
    return handler


def initialize_logging(
    *,
    log_level: Optional[str] = None,
    enable_click_logs: Optional[bool] = None,
    file_friendly_logging: Optional[bool] = None,
):
    """
    Sets the global log level and sends the root logger and :data:`progress_logger` to stderr.

    Arguments left as ``None`` fall back to :data:`HEISLAB_LOG_LEVEL` (then "error"),
    :data:`HEISLAB_CLICK_LOGGER_ENABLED` and :data:`FILE_FRIENDLY_LOGGING`. The resolved values
    are written back to the environment. Call :func:`teardown_logging` when done.

    :raises ConfigurationError: if ``log_level`` is not a level name.
    """
    global FILE_FRIENDLY_LOGGING, HEISLAB_LOG_LEVEL, HEISLAB_CLICK_LOGGER_ENABLED

    if log_level is None:
        log_level = HEISLAB_LOG_LEVEL or "error"
    if file_friendly_logging is None:
        file_friendly_logging = FILE_FRIENDLY_LOGGING
    if enable_click_logs is None:
        enable_click_logs = HEISLAB_CLICK_LOGGER_ENABLED

    level = logging.getLevelName(log_level.upper())
    if not isinstance(level, int):
        raise ConfigurationError(
            f"unknown log level '{log_level}', use debug, info, warning or error"
        )

    HEISLAB_LOG_LEVEL = log_level
    os.environ["HEISLAB_LOG_LEVEL"] = log_level
    FILE_FRIENDLY_LOGGING = file_friendly_logging
    os.environ["FILE_FRIENDLY_LOGGING"] = str(file_friendly_logging).lower()
    HEISLAB_CLICK_LOGGER_ENABLED = enable_click_logs
    os.environ["HEISLAB_CLICK_LOGGER_ENABLED"] = str(enable_click_logs).lower()

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))
    click_logger.setLevel(logging.DEBUG)
    click_logger.disabled = not enable_click_logs

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()
    root_logger.addHandler(_stderr_handler())

    progress_logger.handlers.clear()
    progress_logger.addHandler(_stderr_handler())

    sys.excepthook = _log_uncaught
    logging.captureWarnings(True)


def teardown_logging():
    """
    Undoes the global hooks of :func:`initialize_logging`.
    """
    sys.excepthook = sys.__excepthook__
    logging.captureWarnings(False)


@contextmanager
def file_handler(filepath: PathOrStr) -> Iterator[logging.FileHandler]:
    """
    Copies log records, click messages and progress lines into ``filepath``, without styling,
    for the duration of the block. The CLI's ``--log-file`` uses it.

    .. code-block::

        with file_handler("run.log"):
            logging.getLogger("heislab").info("this also goes into run.log")
    """
    handler = logging.FileHandler(str(filepath))
    handler.setFormatter(HeislabFormatter(plain=True))
    loggers = (logging.getLogger(), click_logger, progress_logger)
    for logger in loggers:
        logger.addHandler(handler)
    try:
        yield handler
    finally:
        for logger in loggers:
            logger.removeHandler(handler)
        handler.close()
