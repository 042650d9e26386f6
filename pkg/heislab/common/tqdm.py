"""
Progress bars for chunked work such as sampled distortion, Monte Carlo estimates and
inequality suites.

On a terminal the bars draw on stderr and clear themselves when done. They are off when stderr
is not a terminal. Under :data:`~heislab.common.logging.FILE_FRIENDLY_LOGGING` a bar redraws at
most every 10 seconds and each redraw becomes one line on
:data:`~heislab.common.logging.progress_logger`.
"""

import sys
from typing import Any, Dict

from tqdm import tqdm as _tqdm

from . import logging as common_logging

# The monitor thread can keep a process alive after a worker raised.
_tqdm.monitor_interval = 0


class _ProgressLogWriter:
    def write(self, message: str):
        line = message.replace("\r", "").replace("\x1b[A", "").strip()
        if line:
            common_logging.progress_logger.info(line)

    def flush(self):
        pass


class Tqdm:
    """
    Builds `tqdm <https://tqdm.github.io/>`_ bars that follow heislab's logging setup.
    Keyword arguments override the defaults.
    """

    @staticmethod
    def tqdm(*args, **kwargs) -> _tqdm:
        return _tqdm(*args, **Tqdm.get_updated_kwargs(**kwargs))

    @staticmethod
    def get_updated_kwargs(**kwargs) -> Dict[str, Any]:
        defaults: Dict[str, Any]
        if common_logging.FILE_FRIENDLY_LOGGING:
            defaults = {
                "file": _ProgressLogWriter(),
                "mininterval": 10.0,
                "ascii": True,
                "disable": False,
            }
        else:
            defaults = {"file": sys.stderr, "mininterval": 0.1, "disable": None, "leave": False}
        return {**defaults, **kwargs}
