"""
errors.py
=========
Exception hierarchy for the workbench. Everything raised on purpose derives
from WorkbenchError so the scenario runner can tell a numerical finding from a bug.
"""


class WorkbenchError(Exception):
    """Base class for all workbench errors"""


# ---------------------------------------------------------------
# Algebras and states
# ---------------------------------------------------------------
class AmbientDimensionError(WorkbenchError):
    """Ambient matrix size exceeds the configured maximum"""


class ClosureError(WorkbenchError):
    """The *-closure iteration did not saturate within its guards"""


class InvalidAlgebra(WorkbenchError):
    pass


class InvalidState(WorkbenchError):
    pass


class NonFaithfulState(WorkbenchError):
    """Density matrix is singular to the faithfulness threshold"""

    def __init__(self, min_eigenvalue: float, message: str = None):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(message or f"state is not faithful (min eigenvalue {min_eigenvalue:.3e})")


class NonFaithfulPrior(NonFaithfulState):
    pass


class NotASubalgebra(WorkbenchError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"subalgebra is not contained in the algebra (residual {residual:.3e})")


class ModularViolation(WorkbenchError):
    """The modular flow of the prior does not preserve the accessible algebra"""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"modular constraint violated (residual {residual:.3e})")


class PropertyFailure(WorkbenchError):
    """A constructed conditional expectation failed one of its axioms"""

    def __init__(self, residuals: dict):
        self.residuals = dict(residuals)
        worst = max(self.residuals, key=self.residuals.get)
        super().__init__(f"conditional expectation axiom '{worst}' off by {self.residuals[worst]:.3e}")


class KMSOverflowError(WorkbenchError):
    pass


class ZeroConditioningEvent(WorkbenchError):
    pass


# ---------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------
class OffHyperboloid(WorkbenchError):
    pass


class NotTangent(WorkbenchError):
    pass


# ---------------------------------------------------------------
# Gaussian states
# ---------------------------------------------------------------
class SingularCoupling(WorkbenchError):
    pass


class EmptyRegion(WorkbenchError):
    pass


class UncertaintyViolation(WorkbenchError):
    pass


class NonFaithfulReduced(WorkbenchError):
    pass


# ---------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------
class ScenarioParseError(WorkbenchError):
    def __init__(self, message: str, line: int = None, field: str = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class UnknownTask(ScenarioParseError):
    def __init__(self, kind: str, field: str = None):
        self.kind = kind
        super().__init__(f"unknown task kind '{kind}'", field=field)


class DanglingReference(ScenarioParseError):
    def __init__(self, reference: str, field: str = None):
        self.reference = reference
        super().__init__(f"reference to undeclared object '{reference}'", field=field)
