"""
store.py
========
Provides a RecordStore class that writes run output: the line-oriented records file,
the text report and CSV tables. Writes are serialized by the caller after a run.
"""

import io
import logging
import os
from pathlib import Path
from typing import List, Optional

import numpy as np

from config import WorkbenchConfig
from scenario import Report

logger = logging.getLogger("WedgeBayes")

TABLE_HEADERS = {
    "profile": "site_index,h_E_weight,bw_weight,rel_dev",
    "killing": "generator_index,killing_residual",
}


class RecordStore:
    def __init__(self, out_dir: Optional[str] = None):
        self.out_dir = Path(out_dir or WorkbenchConfig.OUT_DIR)
        logger.info(f"Initializing record store in '{self.out_dir}'...")
        self.ensure_directory_exists(self.out_dir)

    @staticmethod
    def ensure_directory_exists(path: Path):
        if not path.exists():
            logger.info(f"Directory '{path}' does not exist. Creating...")
            path.mkdir(parents=True, exist_ok=True)

    def _scenario_dir(self, report: Report) -> Path:
        path = self.out_dir / report.scenario
        self.ensure_directory_exists(path)
        return path

    def write_records(self, report: Report) -> Path:
        path = self._scenario_dir(report) / "records.jsonl"
        path.write_text(report.to_records(), encoding="utf-8")
        logger.debug(f"Wrote {len(report.records)} records to {path}")
        return path

    def write_text(self, report: Report) -> Path:
        path = self._scenario_dir(report) / "report.txt"
        path.write_text(report.to_text(), encoding="utf-8")
        return path

    def write_table(self, report: Report, index: int, name: str, table: np.ndarray) -> Path:
        """CSV via numpy.savetxt; the header comes from the table family (profile_50 -> profile)"""
        path = self._scenario_dir(report) / f"task{index}_{name}.csv"
        header = TABLE_HEADERS.get(name.split("_")[0], "")
        np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.12g")
        return path

    def write_bytes(self, report: Report, filename: str, buf: io.BytesIO) -> Path:
        path = self._scenario_dir(report) / filename
        path.write_bytes(buf.getvalue())
        return path

    def write_report(self, report: Report) -> List[Path]:
        """Records, text report and every task table"""
        written = [self.write_records(report), self.write_text(report)]
        for record in report.records:
            for name, table in sorted(record.tables.items()):
                try:
                    written.append(self.write_table(report, record.index, name, table))
                except Exception as e:
                    logger.error(f"Failed to write table {name} of task {record.index}: {e}")
        logger.info(f"Wrote {len(written)} files under {os.fspath(self._scenario_dir(report))}")
        return written
