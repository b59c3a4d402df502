"""
logger.py
=========
Logging set-up for the command line: a daily run log in LOG_DIR plus console output.
Library modules only call logging.getLogger("WedgeBayes").
"""

import logging
from datetime import datetime
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path

from config import WorkbenchConfig

run_log_dir = Path(WorkbenchConfig.LOG_DIR)
run_log_dir.mkdir(parents=True, exist_ok=True)


def run_log_path() -> Path:
    return run_log_dir / f"wedgebayes_{datetime.now().strftime('%Y-%m-%d')}.log"


class DailyRunLogHandler(TimedRotatingFileHandler):
    """Rolls over at midnight into wedgebayes_<date>.log instead of suffixing the old file"""

    def __init__(self, keep_days: int = 7):
        super().__init__(str(run_log_path()), when="midnight", interval=1,
                         backupCount=keep_days, encoding="utf-8", utc=True)

    def doRollover(self):
        self.stream.close()
        next_path = run_log_path()
        if self.backupCount > 0:
            self.rotate(self.baseFilename, str(next_path))
        self.baseFilename = str(next_path)
        self.stream = self._open()


run_log_handler = DailyRunLogHandler()
run_log_handler.setFormatter(logging.Formatter(
    "[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S"
))

logger = logging.getLogger("WedgeBayes")
logger.setLevel(logging.DEBUG)
logger.addHandler(run_log_handler)
logger.propagate = False

# stderr, so --format records on stdout stays parseable
console_handler = logging.StreamHandler()
console_handler.setLevel(getattr(logging, WorkbenchConfig.LOG_LEVEL.upper(), logging.INFO))
console_handler.setFormatter(logging.Formatter("[%(levelname)s] [%(name)s] %(message)s"))
logger.addHandler(console_handler)
