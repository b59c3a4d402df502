"""
unruh.py
========
Handlers for the thermal side of the wedge: the thermofield double (finite-level
Bayes demo plus its Gaussian counterpart) and harmonic-chain runs comparing the
half-chain entanglement Hamiltonian with the boost weight.
"""

import logging

import numpy as np

from bayes import modified_bayes_demo
from gaussian import (
    HarmonicChain,
    convergence_study,
    flow_invariance_residual,
    gibbs_covariance,
    ground_state,
    restrict,
    symplectic_spectrum,
    tfd,
)
from runner import RunContext, TaskHandler, TaskOutcome
from scenario import Status, Task, decode_number

logger = logging.getLogger("WedgeBayes")


class TfdDemoTask(TaskHandler):
    """
    params: levels (default 2), beta (default 2*pi), omega (Gaussian mode frequency, default 1)
    values: kms_residual of the wedge state at beta, takesaki, feasible, Gaussian restriction,
            purity and flow-invariance residuals, Planck occupation check
    """
    task_kind = "tfd_demo"
    task_description = "Thermofield double: wedge restriction is KMS at beta, modified Bayes update."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        levels = int(task.params.get("levels", 2))
        beta = decode_number(task.params.get("beta", "2*pi"), "params.beta")
        omega = float(task.params.get("omega", 1.0))

        result = modified_bayes_demo(levels, beta, context.tol, context.rng(index))
        values = {"feasible": result.feasible, "kms_residual": result.diagnostics["kms_beta"]}
        values.update({k: v for k, v in result.diagnostics.items() if k != "kms_beta"})

        h = omega * np.eye(2)
        double = tfd(h, beta)
        one_side = restrict(double, [0])
        nu = symplectic_spectrum(one_side)[0]
        nbar = 1.0 / np.expm1(beta * omega)
        values.update({
            "gaussian_restriction_residual": float(np.max(np.abs(one_side.cov - gibbs_covariance(h, beta)))),
            "gaussian_purity_residual": float(np.max(np.abs(symplectic_spectrum(double) - 0.5))),
            "gaussian_flow_residual": flow_invariance_residual(one_side, h),
            "planck_residual": abs(nu - (nbar + 0.5)),
        })

        status = Status.PASS if values["kms_residual"] <= context.tol else Status.FAIL
        if not result.feasible:
            status = Status.INFEASIBLE
        return TaskOutcome(values=values, status=status, message="; ".join(result.warnings))


class ChainRunTask(TaskHandler):
    """
    params: sizes (default [50, 100, 200]), mass (default 1e-3), coupling (default 1), window
    values: per size deviation, linear-fit R^2, profile monotonicity, reconstruction residual;
            decreasing (deviation strictly decreasing in N)
    tables: profile_<N> with columns site_index, h_E_weight, bw_weight, rel_dev
    """
    task_kind = "chain_run"
    task_description = "Half-chain entanglement Hamiltonian against the 2 pi x boost weight."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        sizes = [int(n) for n in task.params.get("sizes", [50, 100, 200])]
        mass = float(task.params.get("mass", 1e-3))
        coupling = float(task.params.get("coupling", 1.0))
        study = convergence_study(sizes, mass, coupling, task.params.get("window"))

        values = {}
        tables = {}
        for n, comparison in study.items():
            values[f"deviation_{n}"] = comparison.deviation
            values[f"r_squared_{n}"] = comparison.r_squared
            values[f"increasing_{n}"] = comparison.increasing
            values[f"reconstruction_{n}"] = comparison.extras["reconstruction"]
            values[f"saturated_{n}"] = comparison.saturated
            tables[f"profile_{n}"] = comparison.table()
        deviations = [study[n].deviation for n in sizes]
        values["decreasing"] = bool(all(b < a for a, b in zip(deviations, deviations[1:])))
        values["ground_state_purity"] = max(
            float(np.max(np.abs(symplectic_spectrum(ground_state(HarmonicChain(n, mass, coupling))) - 0.5)))
            for n in sizes
        )
        return TaskOutcome(values=values, tables=tables)


async def setup(runner):
    logger.debug("Setting up unruh handlers...")
    runner.add_handler(TfdDemoTask(runner))
    runner.add_handler(ChainRunTask(runner))
