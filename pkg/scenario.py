"""
scenario.py
===========
Scenario documents (JSON), symbolic matrix entry, expectation checks and the
Report that a run produces.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config import WorkbenchConfig
from errors import DanglingReference, ScenarioParseError, UnknownTask

TASK_KINDS = frozenset({
    "generate_algebra",
    "commutant",
    "classical_posterior",
    "classical_equivalence",
    "bayes_update",
    "takesaki",
    "kms",
    "wedge_classify",
    "killing_audit",
    "ds_tangency",
    "tfd_demo",
    "chain_run",
})

# Kinds whose named output is an algebra other tasks can reference
ALGEBRA_PRODUCERS = frozenset({"generate_algebra", "commutant"})
REFERENCE_KEYS = ("algebra", "accessible", "sub")

_TOP_LEVEL_KEYS = {"name", "seed", "tol", "tasks"}
_TASK_KEYS = {"kind", "name", "params", "expect"}


@dataclass
class Task:
    kind: str
    name: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)
    expect: Dict[str, Any] = field(default_factory=dict)

    def references(self) -> Dict[str, str]:
        """Reference keys whose value names an earlier output"""
        return {k: self.params[k] for k in REFERENCE_KEYS if isinstance(self.params.get(k), str)}

    def to_dict(self) -> Dict[str, Any]:
        document = {"kind": self.kind, "params": self.params}
        if self.name is not None:
            document["name"] = self.name
        if self.expect:
            document["expect"] = self.expect
        return document


@dataclass
class Scenario:
    name: str
    tasks: List[Task] = field(default_factory=list)
    seed: int = 0
    tol: float = 1e-10

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "seed": self.seed, "tol": self.tol,
                "tasks": [task.to_dict() for task in self.tasks]}


def _require(condition: bool, message: str, field_name: str):
    if not condition:
        raise ScenarioParseError(message, field=field_name)


def _parse_task(raw: Any, i: int, declared: set) -> Task:
    where = f"tasks[{i}]"
    _require(isinstance(raw, dict), "task must be an object", where)
    unknown = set(raw) - _TASK_KEYS
    _require(not unknown, f"unexpected keys {sorted(unknown)}", where)
    kind = raw.get("kind")
    _require(isinstance(kind, str), "task kind must be a string", f"{where}.kind")
    if kind not in TASK_KINDS:
        raise UnknownTask(kind, field=f"{where}.kind")

    name = raw.get("name")
    _require(name is None or (isinstance(name, str) and name), "task name must be a non-empty string", f"{where}.name")
    _require(name not in declared, f"name '{name}' is declared twice", f"{where}.name")
    params = raw.get("params", {})
    _require(isinstance(params, dict), "params must be an object", f"{where}.params")
    expect = raw.get("expect", {})
    _require(isinstance(expect, dict), "expect must be an object", f"{where}.expect")

    task = Task(kind, name, params, expect)
    for key, reference in task.references().items():
        if reference not in declared:
            raise DanglingReference(reference, field=f"{where}.params.{key}")
    return task


def parse_scenario(text: str) -> Scenario:
    """Validated Scenario from a JSON document; defaults tol = 1e-10 and seed = 0"""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, line=e.lineno) from None

    _require(isinstance(document, dict), "scenario must be a JSON object", "<root>")
    unknown = set(document) - _TOP_LEVEL_KEYS
    _require(not unknown, f"unexpected keys {sorted(unknown)}", "<root>")
    name = document.get("name")
    _require(isinstance(name, str) and name, "scenario name must be a non-empty string", "name")

    seed = document.get("seed", 0)
    _require(isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0,
             "seed must be an unsigned integer", "seed")
    tol = document.get("tol", WorkbenchConfig.TOL)
    _require(isinstance(tol, (int, float)) and not isinstance(tol, bool) and tol > 0,
             "tol must be a positive number", "tol")
    raw_tasks = document.get("tasks", [])
    _require(isinstance(raw_tasks, list), "tasks must be a list", "tasks")

    declared = set()
    tasks = []
    for i, raw in enumerate(raw_tasks):
        task = _parse_task(raw, i, declared)
        if task.name is not None and task.kind in ALGEBRA_PRODUCERS:
            declared.add(task.name)
        tasks.append(task)
    return Scenario(name, tasks, seed, float(tol))


def serialize_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_dict(), sort_keys=True, indent=2)


# ---------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------
_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|([A-Za-z_]\w*)|(.))")

_CONSTANTS = {
    "pauli_x": np.array([[0, 1], [1, 0]], dtype=complex),
    "pauli_y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "pauli_z": np.array([[1, 0], [0, -1]], dtype=complex),
    "pi": math.pi,
}


class _SymbolParser:
    """
    Recursive descent over: expr := factor ('*' factor)*,
    factor := ['-'] number | name | name '(' expr (',' expr)* ')'
    """

    def __init__(self, text: str, field_name: str):
        self.field = field_name
        self.tokens = []
        for number, name, other in _TOKEN.findall(text):
            if number:
                self.tokens.append(("num", float(number)))
            elif name:
                self.tokens.append(("name", name))
            elif other.strip():
                self.tokens.append(("op", other))
        self.pos = 0

    def fail(self, message: str):
        raise ScenarioParseError(message, field=self.field)

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        token = self.peek()
        if token[0] is None or (kind and token[0] != kind) or (value and token[1] != value):
            self.fail(f"unexpected token {token[1]!r} in matrix expression")
        self.pos += 1
        return token[1]

    def parse(self):
        result = self.expr()
        if self.pos != len(self.tokens):
            self.fail(f"trailing input {self.peek()[1]!r} in matrix expression")
        return result

    def expr(self):
        value = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            factor = self.factor()
            if isinstance(value, np.ndarray) and isinstance(factor, np.ndarray):
                if value.shape != factor.shape:
                    self.fail(f"cannot multiply {value.shape[0]}x{value.shape[0]} by "
                              f"{factor.shape[0]}x{factor.shape[0]} matrix")
                value = value @ factor
            else:
                value = value * factor
        return value

    def factor(self):
        kind, value = self.peek()
        if (kind, value) == ("op", "-"):
            self.take()
            return -self.factor()
        if kind == "num":
            return self.take()
        name = self.take("name")
        if self.peek() != ("op", "("):
            if name not in _CONSTANTS:
                self.fail(f"unknown symbol '{name}'")
            return _CONSTANTS[name]
        self.take("op", "(")
        args = [self.expr()]
        while self.peek() == ("op", ","):
            self.take()
            args.append(self.expr())
        self.take("op", ")")
        return self.call(name, args)

    def _int(self, value) -> int:
        if isinstance(value, np.ndarray) or float(value) != int(value) or value < 1:
            self.fail(f"expected a positive integer, got {value!r}")
        return int(value)

    def call(self, name: str, args: List):
        if name == "identity" and len(args) == 1:
            return np.eye(self._int(args[0]), dtype=complex)
        if name == "diag":
            return np.diag(np.array(args, dtype=complex))
        if name == "unit" and len(args) == 3:
            n = self._int(args[0])
            i, j = int(args[1]), int(args[2])
            if not (0 <= i < n and 0 <= j < n):
                self.fail(f"unit({n}, {i}, {j}) is out of range")
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = 1
            return m
        if name == "kron" and len(args) == 2:
            return np.kron(args[0], args[1])
        if name == "gibbs" and len(args) == 2:
            h = np.asarray(args[0], dtype=complex)
            w, v = np.linalg.eigh((h + h.conj().T) / 2)
            weights = np.exp(-float(np.real(args[1])) * (w - w.min()))
            return (v * (weights / weights.sum())) @ v.conj().T
        self.fail(f"unknown function {name}/{len(args)}")


def decode_matrix(value: Union[str, list, dict], field_name: str = "matrix") -> np.ndarray:
    """Square complex matrix from a symbolic string, a real nested list or {"re": ..., "im": ...}"""
    if isinstance(value, str):
        matrix = _SymbolParser(value, field_name).parse()
    elif isinstance(value, dict):
        if "re" not in value:
            raise ScenarioParseError("complex matrix needs an 're' part", field=field_name)
        try:
            matrix = np.array(value["re"], dtype=float) + 1j * np.array(value.get("im", 0.0), dtype=float)
        except ValueError as e:
            raise ScenarioParseError(f"malformed matrix: {e}", field=field_name) from None
    elif isinstance(value, list):
        try:
            matrix = np.array(value, dtype=complex)
        except (TypeError, ValueError) as e:
            raise ScenarioParseError(f"malformed matrix: {e}", field=field_name) from None
    else:
        raise ScenarioParseError(f"cannot read a matrix from {type(value).__name__}", field=field_name)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ScenarioParseError(f"matrix must be square, got shape {matrix.shape}", field=field_name)
    return matrix


def decode_number(value: Union[str, int, float], field_name: str = "number") -> float:
    """Plain number or a symbolic scalar such as '2*pi'"""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        result = _SymbolParser(value, field_name).parse()
        if not isinstance(result, np.ndarray):
            return float(result)
    raise ScenarioParseError(f"expected a number, got {value!r}", field=field_name)


# ---------------------------------------------------------------
# Reports
# ---------------------------------------------------------------
class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INFEASIBLE = "infeasible"
    ERROR = "error"


def to_plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars to Python, complex to {re, im}, NaN to None"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        if abs(value.imag) == 0:
            return to_plain(float(value.real))
        return {"re": to_plain(float(value.real)), "im": to_plain(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


def evaluate_expectations(values: Dict[str, Any], expect: Dict[str, Any], tol: float) -> List[str]:
    """
    Keys '<value>_max' and '<value>_min' bound a numeric value; any other key asks for
    equality (within tol for numbers). Returns the failed checks.
    """
    failures = []
    for key, wanted in sorted(expect.items()):
        if key.endswith("_max") and key[:-4] in values:
            actual = values[key[:-4]]
            if actual is None or not actual <= wanted:
                failures.append(f"{key[:-4]} = {actual!r} exceeds {wanted!r}")
        elif key.endswith("_min") and key[:-4] in values:
            actual = values[key[:-4]]
            if actual is None or not actual >= wanted:
                failures.append(f"{key[:-4]} = {actual!r} is below {wanted!r}")
        elif key not in values:
            failures.append(f"expected value '{key}' was not produced")
        else:
            actual = to_plain(values[key])
            numeric = isinstance(actual, (int, float)) and not isinstance(actual, bool)
            if numeric and isinstance(wanted, (int, float)) and not isinstance(wanted, bool):
                if abs(actual - wanted) > tol:
                    failures.append(f"{key} = {actual!r}, expected {wanted!r}")
            elif actual != wanted:
                failures.append(f"{key} = {actual!r}, expected {wanted!r}")
    return failures


@dataclass
class TaskRecord:
    index: int
    kind: str
    name: Optional[str]
    status: Status
    values: Dict[str, Any] = field(default_factory=dict)
    message: str = ""
    tables: Dict[str, np.ndarray] = field(default_factory=dict, compare=False, repr=False)

    def to_json(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "kind": self.kind,
            "name": self.name,
            "status": self.status.value,
            "values": to_plain(self.values),
            "message": self.message,
        }


@dataclass
class Report:
    scenario: str
    seed: int
    tol: float
    records: List[TaskRecord] = field(default_factory=list)

    def summary(self) -> Dict[str, int]:
        counts = Counter(record.status.value for record in self.records)
        return {status.value: counts.get(status.value, 0) for status in Status}

    def exit_code(self) -> int:
        """0 all pass, 1 a failed check, 2 an error"""
        statuses = {record.status for record in self.records}
        if Status.ERROR in statuses:
            return 2
        if Status.FAIL in statuses:
            return 1
        return 0

    def to_records(self) -> str:
        lines = [json.dumps(record.to_json(), sort_keys=True) for record in self.records]
        lines.append(json.dumps({"scenario": self.scenario, "seed": self.seed, "tol": self.tol,
                                 "summary": self.summary()}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"Scenario: {self.scenario} (seed {self.seed}, tol {self.tol:g})", ""]
        for record in self.records:
            label = f" '{record.name}'" if record.name else ""
            lines.append(f"[{record.index}] {record.kind}{label}: {record.status.value.upper()}")
            for key, value in sorted(to_plain(record.values).items()):
                if isinstance(value, float):
                    value = f"{value:.6g}"
                lines.append(f"    {key}: {value}")
            if record.message:
                lines.append(f"    note: {record.message}")
        summary = ", ".join(f"{count} {status}" for status, count in self.summary().items())
        lines += ["", f"Summary: {summary}"]
        return "\n".join(lines) + "\n"
