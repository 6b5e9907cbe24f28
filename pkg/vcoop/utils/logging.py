from __future__ import annotations

import logging
import weakref


__all__ = ["Logger", "set_verbosity"]

_loggers = weakref.WeakSet()


class Logger(logging.Logger):
    def __init__(self, name: str, level=None, fmt=None):
        fmt = fmt or "Vcoop (%(levelname)s): %(message)s"
        level = level or "INFO"
        super().__init__(name, level)
        handler = logging.StreamHandler()
        formatter = logging.Formatter(fmt)
        handler.setFormatter(formatter)
        self.addHandler(handler)
        _loggers.add(self)

    def log_file_written(self, name, target_path: str):
        """
        Log (info) when an output file is written to disk.
        """
        self.info(f"Wrote: `{name}` --> `{target_path}`")


def set_verbosity(level: str | int):
    """
    Set the level of every vcoop logger created so far, e.g. `set_verbosity("DEBUG")`
    """
    if isinstance(level, str):
        level = level.upper()
    for logger in list(_loggers):
        logger.setLevel(level)
