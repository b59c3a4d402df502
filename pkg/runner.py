"""
runner.py
=========
 - Loads task handlers (algebra, inference, modular checks, geometry, unruh)
 - Runs scenarios: independent tasks run concurrently, the report keeps scenario order
"""

from __future__ import annotations

import asyncio
import importlib
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ncprob import AlgebraBasis, full_matrix_algebra, generate_algebra
from scenario import (
    ALGEBRA_PRODUCERS,
    Report,
    Scenario,
    Status,
    Task,
    TaskRecord,
    decode_matrix,
    evaluate_expectations,
)

logger = logging.getLogger("WedgeBayes")


@dataclass
class TaskOutcome:
    """What a handler hands back; the runner turns it into a TaskRecord"""
    values: Dict[str, Any] = field(default_factory=dict)
    status: Status = Status.PASS
    message: str = ""
    tables: Dict[str, np.ndarray] = field(default_factory=dict)
    algebra: Optional[AlgebraBasis] = None


class RunContext:
    """Per-run settings and the algebras declared so far"""

    def __init__(self, tol: float, seed: int):
        self.tol = tol
        self.seed = seed
        self.algebras: Dict[str, AlgebraBasis] = {}
        self.failed: Dict[str, str] = {}

    def rng(self, index: int) -> np.random.Generator:
        """Generator keyed on (seed, task index) so concurrent tasks stay reproducible"""
        return np.random.default_rng([self.seed, index])

    def algebra(self, value: Any, field_name: str, ambient_dim: Optional[int] = None) -> AlgebraBasis:
        """A named algebra, or one generated from an inline list of matrices"""
        if isinstance(value, str):
            if value in self.failed:
                raise LookupError(f"algebra '{value}' is unavailable: {self.failed[value]}")
            return self.algebras[value]
        if isinstance(value, list):
            matrices = [decode_matrix(m, f"{field_name}[{i}]") for i, m in enumerate(value)]
            return generate_algebra(matrices, ambient_dim)
        if isinstance(value, int) and not isinstance(value, bool):
            return full_matrix_algebra(value)
        raise ValueError(f"'{field_name}' must name an algebra, list generators or give a dimension")


class TaskHandler:
    """Base class of every handler in tasks/"""
    task_kind = ""
    task_description = ""

    def __init__(self, runner: "ScenarioRunner"):
        self.runner = runner

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        raise NotImplementedError


class ScenarioRunner:
    def __init__(self, tol: Optional[float] = None, seed: Optional[int] = None):
        self.tol = tol
        self.seed = seed
        self.handlers: Dict[str, TaskHandler] = {}

    def add_handler(self, handler: TaskHandler):
        if handler.task_kind in self.handlers:
            raise ValueError(f"task kind '{handler.task_kind}' registered twice")
        self.handlers[handler.task_kind] = handler
        logger.debug(f"Registered handler for '{handler.task_kind}'")

    async def setup_hook(self):
        logger.info("Starting runner setup...")

        # ------------------------------------------------------
        # Dynamically load all handlers from the tasks directory
        # ------------------------------------------------------
        tasks_dir = os.path.join(os.path.dirname(__file__), "tasks")
        for filename in sorted(os.listdir(tasks_dir)):
            if filename.endswith(".py") and not filename.startswith("_"):
                module_name = f"tasks.{filename[:-3]}"
                try:
                    module = importlib.import_module(module_name)
                    await module.setup(self)
                    logger.debug(f"Loaded extension: {module_name}")
                except Exception as e:
                    logger.error(f"Failed to load task module {module_name}: {e}")
        logger.info(f"Registered {len(self.handlers)} task kinds.")

    def _execute(self, task: Task, index: int, context: RunContext) -> TaskRecord:
        logger.info(f"Running task {index} ({task.kind}{' ' + task.name if task.name else ''})")
        handler = self.handlers.get(task.kind)
        if handler is None:
            return TaskRecord(index, task.kind, task.name, Status.ERROR,
                              message=f"no handler registered for '{task.kind}'")
        try:
            outcome = handler.run(task, context, index)
        except Exception as e:
            logger.error(f"Task {index} ({task.kind}) failed: {type(e).__name__}: {e}")
            return TaskRecord(index, task.kind, task.name, Status.ERROR, message=f"{type(e).__name__}: {e}")

        status = outcome.status
        message = outcome.message
        failures = evaluate_expectations(outcome.values, task.expect, context.tol)
        if failures:
            status = Status.FAIL
            message = "; ".join(failures if not message else [message] + failures)
        record = TaskRecord(index, task.kind, task.name, status, outcome.values, message, outcome.tables)
        if outcome.algebra is not None:
            self._produced[index] = outcome.algebra
        logger.info(f"Task {index} finished: {status.value}")
        return record

    @staticmethod
    def batches(tasks: List[Task]) -> List[List[int]]:
        """Consecutive runs of tasks that do not read an output produced inside the same run"""
        groups: List[List[int]] = []
        produced_here = set()
        for i, task in enumerate(tasks):
            if not groups or set(task.references().values()) & produced_here:
                groups.append([])
                produced_here = set()
            groups[-1].append(i)
            if task.name is not None and task.kind in ALGEBRA_PRODUCERS:
                produced_here.add(task.name)
        return groups

    async def run(self, scenario: Scenario) -> Report:
        tol = scenario.tol if self.tol is None else self.tol
        seed = scenario.seed if self.seed is None else self.seed
        context = RunContext(tol, seed)
        report = Report(scenario.name, seed, tol)
        self._produced: Dict[int, AlgebraBasis] = {}
        logger.info(f"Running scenario '{scenario.name}' with {len(scenario.tasks)} tasks (seed {seed}, tol {tol:g})")

        for group in self.batches(scenario.tasks):
            records = await asyncio.gather(
                *[asyncio.to_thread(self._execute, scenario.tasks[i], i, context) for i in group]
            )
            for i, record in zip(group, records):
                task = scenario.tasks[i]
                if task.name is not None and task.kind in ALGEBRA_PRODUCERS:
                    if i in self._produced:
                        context.algebras[task.name] = self._produced[i]
                    else:
                        context.failed[task.name] = f"task {i} ended with status {record.status.value}"
                report.records.append(record)

        logger.info(f"Scenario '{scenario.name}' done: {report.summary()}")
        return report

    async def start(self, scenario: Scenario) -> Report:
        if not self.handlers:
            await self.setup_hook()
        return await self.run(scenario)


def run_scenario(scenario: Scenario, tol: Optional[float] = None, seed: Optional[int] = None) -> Report:
    """Synchronous entry point: load handlers and run one scenario"""
    runner = ScenarioRunner(tol, seed)
    return asyncio.run(runner.start(scenario))
