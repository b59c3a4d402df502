"""
modular_checks.py
=================
Handlers for the modular constraint (does the prior's modular flow preserve a
subalgebra) and for KMS residuals of a state against a Hamiltonian.
"""

import logging

from modular import conditional_expectation, kms_residual, modular_hamiltonian, takesaki_check
from ncprob import AlgState, full_matrix_algebra
from runner import RunContext, TaskHandler, TaskOutcome
from scenario import Status, Task, decode_matrix, decode_number

logger = logging.getLogger("WedgeBayes")


def _state(params: dict, context: RunContext) -> AlgState:
    density = decode_matrix(params.get("state"), "params.state")
    n = density.shape[0]
    alg = context.algebra(params["algebra"], "params.algebra", n) if "algebra" in params \
        else full_matrix_algebra(n)
    return AlgState.from_density(alg, density, context.tol)


class TakesakiTask(TaskHandler):
    """
    params: state (matrix), sub (name or generators), algebra (optional)
    values: residual, feasible, and the conditional-expectation axiom residuals when feasible
    """
    task_kind = "takesaki"
    task_description = "Modular constraint: is the subalgebra invariant under the modular flow?"

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        state = _state(task.params, context)
        sub = context.algebra(task.params.get("sub"), "params.sub", state.algebra.ambient_dim)
        residual = takesaki_check(state, sub, context.tol)
        if residual > context.tol:
            logger.info(f"takesaki: residual {residual:.3e}, no state-preserving conditional expectation")
            return TaskOutcome(values={"residual": residual, "feasible": False}, status=Status.INFEASIBLE,
                               message="modular flow leaves the subalgebra")
        ce = conditional_expectation(state, sub, context.tol, context.rng(index))
        values = {"residual": residual, "feasible": True}
        values.update({f"ce_{k}": v for k, v in ce.residuals.items() if k != "takesaki"})
        return TaskOutcome(values=values, message="; ".join(ce.warnings))


class KMSTask(TaskHandler):
    """
    params: state (matrix), hamiltonian (matrix, or "modular" for -log rho), beta (default 1)
    values: kms_residual, beta
    """
    task_kind = "kms"
    task_description = "KMS residual of a state against the flow of a Hamiltonian at inverse temperature beta."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        state = _state(task.params, context)
        generator = task.params.get("hamiltonian", "modular")
        h = modular_hamiltonian(state) if generator == "modular" else decode_matrix(generator, "params.hamiltonian")
        beta = decode_number(task.params.get("beta", 1.0), "params.beta")
        residual = kms_residual(state, h, beta)
        status = Status.PASS if residual <= context.tol else Status.FAIL
        return TaskOutcome(values={"kms_residual": residual, "beta": beta}, status=status,
                           message="" if status is Status.PASS else "state is not KMS for this flow")


async def setup(runner):
    logger.debug("Setting up modular handlers...")
    runner.add_handler(TakesakiTask(runner))
    runner.add_handler(KMSTask(runner))
