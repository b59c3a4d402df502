"""
inference.py
============
Handlers for the inference recipes: classical Bayes on a finite space, the
classical/noncommutative consistency suite and the noncommutative Bayes update.
"""

import logging

import numpy as np

from bayes import (
    InferenceProblem,
    PriorPolicy,
    classical_equivalence_check,
    classical_posterior,
    nc_bayes_update,
)
from ncprob import AlgState, FiniteProbabilitySpace, full_matrix_algebra
from runner import RunContext, TaskHandler, TaskOutcome
from scenario import Status, Task, decode_matrix

logger = logging.getLogger("WedgeBayes")


def _space(params: dict) -> FiniteProbabilitySpace:
    outcomes = params.get("outcomes")
    if outcomes is None:
        raise ValueError("'outcomes' is required (a count or a list of labels)")
    space = FiniteProbabilitySpace.uniform(outcomes)
    if "mu" in params:
        space = FiniteProbabilitySpace(space.outcomes, tuple(float(p) for p in params["mu"]))
    return space


class ClassicalPosteriorTask(TaskHandler):
    """
    params: outcomes, B, A, prior (optional weights)
    values: posterior
    """
    task_kind = "classical_posterior"
    task_description = "Classical Bayes: prior(A and B) / prior(B), uniform prior by default."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        params = task.params
        space = _space(params)
        posterior = classical_posterior(space, params.get("B", []), params.get("A", []), params.get("prior"))
        return TaskOutcome(values={"posterior": posterior})


class ClassicalEquivalenceTask(TaskHandler):
    """
    params: either outcomes, B, A (one check) or trials, max_outcomes (seeded random suite)
    values: residual (largest over the checks), trials
    """
    task_kind = "classical_equivalence"
    task_description = "Noncommutative Bayes through the diagonal embedding against classical Bayes."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        params = task.params
        if "outcomes" in params:
            space = _space(params)
            residual = classical_equivalence_check(space, params.get("B", []), params.get("A", []), context.tol)
            return TaskOutcome(values={"residual": residual, "trials": 1})

        rng = context.rng(index)
        trials = int(params.get("trials", 100))
        max_outcomes = int(params.get("max_outcomes", 8))
        worst = 0.0
        for _ in range(trials):
            m = int(rng.integers(1, max_outcomes + 1))
            mu = rng.dirichlet(np.ones(m))
            space = FiniteProbabilitySpace(tuple(range(m)), tuple(mu / mu.sum()))
            B = [i for i in range(m) if rng.random() < 0.5] or [int(rng.integers(m))]
            A = [i for i in range(m) if rng.random() < 0.5]
            worst = max(worst, classical_equivalence_check(space, B, A, context.tol))
        logger.debug(f"classical_equivalence: {trials} random spaces, worst residual {worst:.3e}")
        return TaskOutcome(values={"residual": worst, "trials": trials})


class BayesUpdateTask(TaskHandler):
    """
    params: true_state (matrix), accessible (name or generators), algebra (name, generators
            or dimension; defaults to the full matrix algebra), prior ("tracial" or a matrix),
            observables ({label: matrix}, evaluated under the posterior)
    values: feasible, takesaki, the axiom residuals, posterior_<label>
    """
    task_kind = "bayes_update"
    task_description = "Noncommutative Bayes update posterior(a) = omega_accessible(E_prior(a))."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        params = task.params
        density = decode_matrix(params.get("true_state"), "params.true_state")
        n = density.shape[0]
        total = context.algebra(params["algebra"], "params.algebra", n) if "algebra" in params \
            else full_matrix_algebra(n)
        accessible = context.algebra(params.get("accessible"), "params.accessible", n)

        prior_param = params.get("prior", "tracial")
        if prior_param == "tracial":
            problem = InferenceProblem(total, accessible, AlgState(total, density))
        else:
            prior = AlgState(total, decode_matrix(prior_param, "params.prior"))
            problem = InferenceProblem(total, accessible, AlgState(total, density), PriorPolicy.SUPPLIED, prior)

        result = nc_bayes_update(problem, context.tol, context.rng(index))
        values = {"feasible": result.feasible}
        values.update(result.diagnostics)
        if not result.feasible:
            return TaskOutcome(values=values, status=Status.INFEASIBLE,
                               message="the prior's modular flow does not preserve the accessible algebra")

        for label, matrix in sorted(params.get("observables", {}).items()):
            value = result(decode_matrix(matrix, f"params.observables.{label}"))
            values[f"posterior_{label}"] = value.real if abs(value.imag) <= context.tol else value
        return TaskOutcome(values=values, message="; ".join(result.warnings))


async def setup(runner):
    logger.debug("Setting up inference handlers...")
    runner.add_handler(ClassicalPosteriorTask(runner))
    runner.add_handler(ClassicalEquivalenceTask(runner))
    runner.add_handler(BayesUpdateTask(runner))
