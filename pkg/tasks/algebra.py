"""
algebra.py
==========
Handlers that build named algebras: *-algebras generated by matrices and commutants.
Their outputs can be referenced by later tasks through the "algebra", "accessible"
and "sub" parameters.
"""

import logging

from ncprob import commutant, span_distance
from runner import RunContext, TaskHandler, TaskOutcome
from scenario import Task

logger = logging.getLogger("WedgeBayes")


class GenerateAlgebraTask(TaskHandler):
    """
    params: generators (list of matrices), dim (optional ambient size)
    values: dim, ambient_dim, abelian, contains_identity
    """
    task_kind = "generate_algebra"
    task_description = "Unital *-algebra generated by a list of matrices."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        generators = task.params.get("generators", [])
        alg = context.algebra(generators, "params.generators", task.params.get("dim"))
        logger.debug(f"generate_algebra: dimension {alg.dim} in M_{alg.ambient_dim}")
        return TaskOutcome(
            values={
                "dim": alg.dim,
                "ambient_dim": alg.ambient_dim,
                "abelian": alg.is_abelian(context.tol),
                "contains_identity": alg.contains_identity,
            },
            algebra=alg,
        )


class CommutantTask(TaskHandler):
    """
    params: algebra (name or generators)
    values: dim, abelian, bicommutant_residual (distance between A'' and A)
    """
    task_kind = "commutant"
    task_description = "Commutant A' of an algebra, with the bicommutant check A'' = A."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        alg = context.algebra(task.params.get("algebra"), "params.algebra")
        prime = commutant(alg)
        double = commutant(prime)
        residual = span_distance(double, alg)
        return TaskOutcome(
            values={
                "dim": prime.dim,
                "abelian": prime.is_abelian(context.tol),
                "bicommutant_residual": residual,
            },
            algebra=prime,
        )


async def setup(runner):
    logger.debug("Setting up algebra handlers...")
    runner.add_handler(GenerateAlgebraTask(runner))
    runner.add_handler(CommutantTask(runner))
