import logging
from typing import Dict

LEVEL_COLORS: Dict[int, str] = {
    logging.DEBUG: "\033[37m",
    logging.INFO: "\033[97m",
    logging.WARNING: "\x1b[33;20m",
    logging.ERROR: "\x1b[31;20m",
    logging.CRITICAL: "\x1b[31;1m",
}
RESET = "\x1b[0m"


class CustomFormatter(logging.Formatter):
    """
    Terminal formatter: colors records by level and tags them with the emitting process,
    so lines from parallel sweep workers can be told apart. File handlers use a plain formatter.
    """

    fmt = "%(asctime)s %(levelname)-7s [%(processName)s] %(name)s: %(message)s"
    datefmt = "%H:%M:%S"

    def __init__(self):
        super().__init__(self.fmt, self.datefmt)
        self._by_level = {level: logging.Formatter(color + self.fmt + RESET, self.datefmt)
                          for level, color in LEVEL_COLORS.items()}

    def format(self, record: logging.LogRecord) -> str:
        formatter = self._by_level.get(record.levelno)
        return formatter.format(record) if formatter is not None else super().format(record)
