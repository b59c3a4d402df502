r"""Unit tests for scenario parsing, matrix entry and reports"""
import json
from pathlib import Path

import numpy as np
import pytest

from errors import DanglingReference, ScenarioParseError, UnknownTask
from scenario import (
    Report,
    Status,
    TaskRecord,
    decode_matrix,
    decode_number,
    evaluate_expectations,
    parse_scenario,
    serialize_scenario,
    to_plain,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def document(*tasks, **top):
    body = {"name": "sample", "tasks": list(tasks)}
    body.update(top)
    return json.dumps(body)


class TestParseScenario:
    """Tests for reading scenario documents"""

    def test_defaults(self):
        scenario = parse_scenario(document())
        assert scenario.seed == 0
        assert scenario.tol == 1e-10
        assert scenario.tasks == []

    def test_syntax_error_reports_line(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario('{\n  "name": "sample",\n  "tasks": [oops]\n}')
        assert info.value.line == 3

    def test_unknown_kind(self):
        with pytest.raises(UnknownTask) as info:
            parse_scenario(document({"kind": "teleport"}))
        assert info.value.field == "tasks[0].kind"

    def test_dangling_reference(self):
        with pytest.raises(DanglingReference) as info:
            parse_scenario(document({"kind": "commutant", "params": {"algebra": "missing"}}))
        assert info.value.reference == "missing"
        assert info.value.field == "tasks[0].params.algebra"

    def test_reference_must_precede_use(self):
        tasks = [
            {"kind": "commutant", "name": "c", "params": {"algebra": "a"}},
            {"kind": "generate_algebra", "name": "a", "params": {"generators": ["pauli_x"]}},
        ]
        with pytest.raises(DanglingReference):
            parse_scenario(document(*tasks))

    def test_only_algebra_tasks_declare_references(self):
        tasks = [
            {"kind": "kms", "name": "k", "params": {}},
            {"kind": "commutant", "params": {"algebra": "k"}},
        ]
        with pytest.raises(DanglingReference):
            parse_scenario(document(*tasks))

    def test_duplicate_name(self):
        tasks = [
            {"kind": "generate_algebra", "name": "a", "params": {"generators": ["pauli_x"]}},
            {"kind": "generate_algebra", "name": "a", "params": {"generators": ["pauli_z"]}},
        ]
        with pytest.raises(ScenarioParseError):
            parse_scenario(document(*tasks))

    @pytest.mark.parametrize("text", [
        "[]",
        json.dumps({"tasks": []}),
        document(seed=-1),
        document(seed=True),
        document(tol=0),
        document(extra=1),
        document({"kind": "kms", "params": []}),
        document({"kind": "kms", "colour": "red"}),
    ])
    def test_invalid_documents(self, text):
        with pytest.raises(ScenarioParseError):
            parse_scenario(text)

    @pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.json")), ids=lambda p: p.stem)
    def test_bundled_scenarios_reserialize(self, path):
        scenario = parse_scenario(path.read_text(encoding="utf-8"))
        again = parse_scenario(serialize_scenario(scenario))
        assert again == scenario


class TestDecodeMatrix:
    """Tests for symbolic and literal matrices"""

    def test_pauli(self):
        assert np.array_equal(decode_matrix("pauli_y"), np.array([[0, -1j], [1j, 0]]))

    def test_scaled_identity(self):
        assert np.allclose(decode_matrix("0.5*identity(2)"), np.eye(2) / 2)

    def test_negation_and_product(self):
        assert np.allclose(decode_matrix("-pauli_x*pauli_x"), -np.eye(2))

    @pytest.mark.parametrize("text, expected", [
        ("pauli_x*pauli_z", [[0, -1], [1, 0]]),
        ("pauli_x*pauli_y", [[1j, 0], [0, -1j]]),
        ("pauli_z*pauli_x", [[0, 1], [-1, 0]]),
        ("unit(2, 0, 1)*unit(2, 1, 0)", [[1, 0], [0, 0]]),
        ("2*pi*pauli_z", [[2 * np.pi, 0], [0, -2 * np.pi]]),
        ("pauli_z*0.5", [[0.5, 0], [0, -0.5]]),
    ])
    def test_matrix_product(self, text, expected):
        assert np.allclose(decode_matrix(text), np.array(expected))

    def test_diag(self):
        assert np.allclose(decode_matrix("diag(0.9, 0.1)"), np.diag([0.9, 0.1]))

    def test_unit(self):
        expected = np.zeros((3, 3))
        expected[0, 2] = 1
        assert np.array_equal(decode_matrix("unit(3, 0, 2)"), expected)

    def test_kron(self):
        assert np.array_equal(decode_matrix("kron(pauli_z, identity(2))"), np.kron(np.diag([1, -1]), np.eye(2)))

    def test_gibbs(self):
        rho = decode_matrix("gibbs(diag(0, 1), 2*pi)")
        weights = np.array([1.0, np.exp(-2 * np.pi)])
        assert np.allclose(rho, np.diag(weights / weights.sum()))

    def test_nested_list(self):
        assert np.array_equal(decode_matrix([[1, 2], [3, 4]]), np.array([[1, 2], [3, 4]]))

    def test_complex_parts(self):
        matrix = decode_matrix({"re": [[0, 0], [0, 0]], "im": [[0, -1], [1, 0]]})
        assert np.array_equal(matrix, np.array([[0, -1j], [1j, 0]]))

    @pytest.mark.parametrize("value", [
        "pauli_w",
        "identity(0)",
        "unit(2, 2, 0)",
        "diag(1, 2",
        "pauli_x pauli_z",
        "pauli_x*identity(3)",
        "frobnicate(2)",
        [[1, 2, 3], [4, 5, 6]],
        {"im": [[1]]},
        3.0,
    ])
    def test_rejects(self, value):
        with pytest.raises(ScenarioParseError):
            decode_matrix(value, "params.m")

    def test_error_names_field(self):
        with pytest.raises(ScenarioParseError) as info:
            decode_matrix("pauli_w", "tasks[2].params.density")
        assert info.value.field == "tasks[2].params.density"


class TestDecodeNumber:
    @pytest.mark.parametrize("value, expected", [
        (2, 2.0),
        (0.25, 0.25),
        ("2*pi", 2 * np.pi),
        ("-1.5e-3", -1.5e-3),
    ])
    def test_values(self, value, expected):
        assert decode_number(value) == pytest.approx(expected)

    @pytest.mark.parametrize("value", ["pauli_x", True, None])
    def test_rejects(self, value):
        with pytest.raises(ScenarioParseError):
            decode_number(value)


class TestExpectations:
    """Tests for bounds and equality checks on task values"""

    def test_bounds(self):
        values = {"residual": 1e-12, "gap": 0.5}
        assert evaluate_expectations(values, {"residual_max": 1e-10, "gap_min": 0.1}, 1e-10) == []
        failures = evaluate_expectations(values, {"residual_max": 1e-13, "gap_min": 1.0}, 1e-10)
        assert len(failures) == 2

    def test_equality_within_tol(self):
        assert evaluate_expectations({"posterior": 1 / 3}, {"posterior": 0.3333333333333}, 1e-10) == []
        assert evaluate_expectations({"posterior": 1 / 3}, {"posterior": 0.33}, 1e-10)

    def test_exact_values(self):
        values = {"feasible": False, "labels": ["S", "W1"]}
        assert evaluate_expectations(values, {"feasible": False, "labels": ["S", "W1"]}, 1e-10) == []
        assert evaluate_expectations(values, {"feasible": True}, 1e-10)

    def test_missing_value(self):
        assert evaluate_expectations({}, {"residual": 0}, 1e-10) == ["expected value 'residual' was not produced"]

    def test_nan_fails_bound(self):
        assert evaluate_expectations({"residual": None}, {"residual_max": 1.0}, 1e-10)


class TestReport:
    """Tests for status summaries, exit codes and serialisation"""

    @pytest.mark.parametrize("statuses, code", [
        ([Status.PASS, Status.INFEASIBLE], 0),
        ([Status.PASS, Status.FAIL], 1),
        ([Status.FAIL, Status.ERROR], 2),
        ([], 0),
    ])
    def test_exit_code(self, statuses, code):
        report = Report("sample", 0, 1e-10, [TaskRecord(i, "kms", None, s) for i, s in enumerate(statuses)])
        assert report.exit_code() == code

    def test_records(self):
        report = Report("sample", 3, 1e-10, [
            TaskRecord(0, "kms", "k", Status.PASS, {"residual": np.float64(1e-12), "ok": np.bool_(True)}),
        ])
        lines = report.to_records().splitlines()
        assert json.loads(lines[0]) == {"index": 0, "kind": "kms", "name": "k", "status": "pass",
                                        "values": {"residual": 1e-12, "ok": True}, "message": ""}
        assert json.loads(lines[1])["summary"] == {"pass": 1, "fail": 0, "infeasible": 0, "error": 0}

    def test_text(self):
        report = Report("sample", 0, 1e-10, [TaskRecord(0, "takesaki", None, Status.INFEASIBLE, {"residual": 0.5})])
        text = report.to_text()
        assert "[0] takesaki: INFEASIBLE" in text
        assert "Summary: 0 pass, 0 fail, 1 infeasible, 0 error" in text

    def test_to_plain(self):
        assert to_plain({"z": 1 + 2j, "x": float("nan"), "a": np.arange(2)}) == \
            {"z": {"re": 1.0, "im": 2.0}, "x": None, "a": [0, 1]}
