"""
geometry.py
===========
Handlers for the spacetime checks: wedge labels, the Killing/boost audit of
Minkowski space and tangency of ambient Killing fields to de Sitter space.
"""

import logging

import numpy as np

from runner import RunContext, TaskHandler, TaskOutcome
from scenario import Task
from spacetime import (
    AMBIENT_DE_SITTER,
    FlatSpace,
    WedgeLabel,
    boost_flow,
    dilation,
    ds_tangency_residual,
    generators,
    horizon_residual,
    isometry_algebra_dim,
    killing_residual,
    lorentz,
    printed_regions,
    sample_bifurcation_surface,
    sample_de_sitter,
    sample_points,
    tangency_fractions,
    wedge_audit,
    wedge_classify,
)

logger = logging.getLogger("WedgeBayes")


class WedgeClassifyTask(TaskHandler):
    """
    params: points (list of vectors), dim (default 4), band (optional horizon band)
    values: labels, printed (labels under the literal inequalities)
    """
    task_kind = "wedge_classify"
    task_description = "Region of each point in the four-wedge split of a bifurcate horizon."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        space = FlatSpace(int(task.params.get("dim", 4)))
        band = task.params.get("band")
        points = [np.asarray(p, dtype=float) for p in task.params.get("points", [])]
        labels = [wedge_classify(space, p, band).value for p in points]
        printed = [[label.value for label in printed_regions(p, band)] for p in points]
        return TaskOutcome(values={"labels": labels, "printed": printed})


class KillingAuditTask(TaskHandler):
    """
    params: dim (default 4), samples (default 1000), t_max (default 5)
    values: Killing residuals of every generator, isometry dimension, boost-flow invariance
            of the wedge labels and the causal character audit of the boost field
    """
    task_kind = "killing_audit"
    task_description = "Killing equation for every generator, boost invariance of wedges, timelike audit."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        space = FlatSpace(int(task.params.get("dim", 4)))
        count = int(task.params.get("samples", 1000))
        t_max = float(task.params.get("t_max", 5.0))
        rng = context.rng(index)

        fields = generators(space)
        residuals = np.array([killing_residual(f) for f in fields])

        points = sample_points(space, count, rng)
        times = rng.uniform(-t_max, t_max, size=count)
        invariant = [wedge_classify(space, x) is wedge_classify(space, boost_flow(x, t))
                     for x, t in zip(points, times)]

        # Horizons are preserved as sets; the band scales with the flowed point
        horizon_kept = []
        for s, t in zip(rng.normal(size=count), times):
            for x, label in ((np.array([s, s] + [0.0] * (space.dim - 2)), WedgeLabel.HA),
                             (np.array([s, -s] + [0.0] * (space.dim - 2)), WedgeLabel.HB)):
                y = boost_flow(x, t)
                band = 1e-12 * max(1.0, float(np.max(np.abs(y))))
                horizon_kept.append(wedge_classify(space, y, band) in (label, WedgeLabel.S))

        boost = lorentz(space, 0, 1)
        audit = wedge_audit(space, points, boost)
        values = {
            "generators": len(fields),
            "killing_max": float(residuals.max()),
            "dilation_residual": killing_residual(dilation(space)),
            "isometry_dim": isometry_algebra_dim(space),
            "flow_invariance": float(np.mean(invariant)),
            "horizon_invariance": float(np.mean(horizon_kept)),
            "bifurcation_residual": horizon_residual(boost, sample_bifurcation_surface(space, 50, rng)),
            "printed_labels_consistent": audit["printed_side_agreement"] == 1.0
                                         and audit["printed_cone_agreement"] == 1.0,
        }
        values.update({f"audit_{k}": v for k, v in audit.items()})
        message = ""
        if not values["printed_labels_consistent"]:
            message = ("literal wedge inequalities disagree with the boost causal character; "
                       "the symmetric labels give timelike on W3/W4 and spacelike on W1/W2")
        table = np.column_stack([np.arange(len(fields)), residuals])
        return TaskOutcome(values=values, message=message, tables={"killing": table})


class DsTangencyTask(TaskHandler):
    """
    params: samples (default 1000), tau_max (optional)
    values: tangent generator count, worst Lorentz residual, least non-tangent translation fraction
    """
    task_kind = "ds_tangency"
    task_description = "Tangency of the 15 ambient Killing fields to the de Sitter hyperboloid."

    def run(self, task: Task, context: RunContext, index: int) -> TaskOutcome:
        count = int(task.params.get("samples", 1000))
        samples = sample_de_sitter(count, context.rng(index), task.params.get("tau_max"))
        fractions = tangency_fractions(samples, context.tol)
        fields = generators(AMBIENT_DE_SITTER)
        lorentz_worst = max(ds_tangency_residual(f, p) for f in fields if f.label.startswith("L") for p in samples)
        translations = [1.0 - fractions[f.label] for f in fields if f.label.startswith("T")]
        values = {
            "tangent_generators": sum(1 for v in fractions.values() if v == 1.0),
            "lorentz_max_residual": lorentz_worst,
            "translation_nontangent_min": min(translations),
            "ambient_isometry_dim": isometry_algebra_dim(AMBIENT_DE_SITTER),
        }
        return TaskOutcome(values=values)


async def setup(runner):
    logger.debug("Setting up geometry handlers...")
    runner.add_handler(WedgeClassifyTask(runner))
    runner.add_handler(KillingAuditTask(runner))
    runner.add_handler(DsTangencyTask(runner))
