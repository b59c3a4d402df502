r"""Tests for run output: records, tables and profile plots"""
import numpy as np
import pytest

from graphs import ProfileGraphs
from scenario import Report, Status, TaskRecord
from store import RecordStore


def profile_table():
    sites = np.arange(5, dtype=float)
    bw = 2 * np.pi * (5 - sites - 0.5) * 2
    weight = bw * np.array([1.2, 1.1, 1.05, 1.01, 0.9])
    return np.column_stack([sites, weight, bw, (weight - bw) / bw])


def test_write_report(tmp_path):
    record = TaskRecord(0, "chain_run", None, Status.PASS, {"deviation_50": 0.1},
                        tables={"profile_50": profile_table()})
    report = Report("sample", 0, 1e-10, [record])
    written = RecordStore(str(tmp_path / "out")).write_report(report)

    folder = tmp_path / "out" / "sample"
    assert {p.name for p in written} == {"records.jsonl", "report.txt", "task0_profile_50.csv"}
    lines = (folder / "task0_profile_50.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "site_index,h_E_weight,bw_weight,rel_dev"
    assert len(lines) == 6
    assert np.allclose(np.loadtxt(folder / "task0_profile_50.csv", delimiter=",", skiprows=1), profile_table())


def test_profile_graph():
    buf, stats = ProfileGraphs.create_profile_graph(profile_table(), "sample")
    assert buf.getvalue()[:8] == b"\x89PNG\r\n\x1a\n"
    assert stats["worst_site"] == 0.0
    assert stats["worst_rel_dev"] == pytest.approx(0.2)
