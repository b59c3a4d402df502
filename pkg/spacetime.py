"""
spacetime.py
============
Flat-space geometry: affine Killing fields and their verification, the isometry
algebra dimension, the four-wedge split of a bifurcate Killing horizon, boost
flows, and the de Sitter hyperboloid embedded in 5-dimensional Minkowski space.

Field components follow L_{mu nu} = x_mu d_nu - x_nu d_mu with indices lowered by
eta = diag(-1, 1, ..., 1), so L_01(x) = (-x1, -x0, 0, ...). boost_flow(x, t)
is the flow of -L_01.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from config import WorkbenchConfig
from errors import NotTangent, OffHyperboloid

logger = logging.getLogger("WedgeBayes")


class WedgeLabel(Enum):
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W4 = "W4"
    HA = "hA"
    HB = "hB"
    S = "S"


class CausalCharacter(Enum):
    TIMELIKE = "timelike"
    NULL = "null"
    SPACELIKE = "spacelike"


@dataclass(frozen=True)
class FlatSpace:
    """R^d with eta = diag(-1, 1, ..., 1)"""
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("a Lorentzian flat space needs at least 2 dimensions")

    @cached_property
    def metric(self) -> np.ndarray:
        return np.diag([-1] + [1] * (self.dim - 1))

    def eta(self, u: Sequence[float], v: Sequence[float]) -> float:
        return float(np.asarray(u) @ self.metric @ np.asarray(v))

    def norm2(self, u: Sequence[float]) -> float:
        return self.eta(u, u)


MINKOWSKI = FlatSpace(4)
AMBIENT_DE_SITTER = FlatSpace(5)


@dataclass(frozen=True, eq=False)
class AffineKillingField:
    """X(x) = A x + b with integer A and b for every generator"""
    space: FlatSpace
    A: np.ndarray
    b: np.ndarray
    label: str = ""

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) + self.b

    def __neg__(self) -> "AffineKillingField":
        label = self.label[1:] if self.label.startswith("-") else f"-{self.label}"
        return AffineKillingField(self.space, -self.A, -self.b, label)


def translation(space: FlatSpace, i: int) -> AffineKillingField:
    b = np.zeros(space.dim, dtype=int)
    b[i] = 1
    return AffineKillingField(space, np.zeros((space.dim, space.dim), dtype=int), b, f"T{i}")


def lorentz(space: FlatSpace, mu: int, nu: int) -> AffineKillingField:
    """L_{mu nu} = x_mu d_nu - x_nu d_mu"""
    eta = space.metric
    A = np.zeros((space.dim, space.dim), dtype=int)
    A[nu, mu] += eta[mu, mu]
    A[mu, nu] -= eta[nu, nu]
    return AffineKillingField(space, A, np.zeros(space.dim, dtype=int), f"L{mu}{nu}")


def dilation(space: FlatSpace) -> AffineKillingField:
    """X(x) = x; conformal, not Killing"""
    return AffineKillingField(space, np.eye(space.dim, dtype=int), np.zeros(space.dim, dtype=int), "D")


def generators(space: FlatSpace) -> List[AffineKillingField]:
    """The d translations followed by the d(d-1)/2 Lorentz fields"""
    fields = [translation(space, i) for i in range(space.dim)]
    fields += [lorentz(space, mu, nu) for mu, nu in combinations(range(space.dim), 2)]
    return fields


def killing_residual(field: AffineKillingField) -> float:
    """Max-norm of (eta A) + (eta A)^T; zero iff the field is Killing for eta"""
    lowered = field.space.metric @ field.A
    return float(np.max(np.abs(lowered + lowered.T)))


def isometry_algebra_dim(space: FlatSpace) -> int:
    """Null-space dimension of the symmetrisation map on affine fields (A, b)"""
    d = space.dim
    eta = space.metric
    columns = []
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=int)
            unit[i, j] = 1
            lowered = eta @ unit
            columns.append((lowered + lowered.T).reshape(-1))
    rank = int(np.linalg.matrix_rank(np.array(columns, dtype=float).T))
    return d * d + d - rank


def boost_flow(x: Sequence[float], t: float) -> np.ndarray:
    """(x0 cosh t + x1 sinh t, x0 sinh t + x1 cosh t, x2, ...)"""
    x = np.asarray(x, dtype=float)
    y = x.copy()
    y[0] = x[0] * np.cosh(t) + x[1] * np.sinh(t)
    y[1] = x[0] * np.sinh(t) + x[1] * np.cosh(t)
    return y


def field_flow(field: AffineKillingField, x: Sequence[float], t: float) -> np.ndarray:
    """Integral curve of an affine field through x, via the augmented matrix exponential"""
    d = field.space.dim
    augmented = np.zeros((d + 1, d + 1))
    augmented[:d, :d] = field.A
    augmented[:d, d] = field.b
    point = np.append(np.asarray(x, dtype=float), 1.0)
    return (expm(t * augmented) @ point)[:d]


def wedge_classify(space: FlatSpace, x: Sequence[float], tol: float = None) -> WedgeLabel:
    """
    Seven-region split on (x0, x1): the bifurcation surface S, the horizons hA (x0 = x1)
    and hB (x0 = -x1), the cones W1 (future) and W2 (past), and the side wedges W3
    (x1 > |x0|) and W4 (x1 < -|x0|). Boundaries resolve within tol.
    """
    tol = WorkbenchConfig.HORIZON_BAND if tol is None else tol
    x = np.asarray(x, dtype=float)
    if x.shape != (space.dim,):
        raise ValueError(f"point must have {space.dim} components")
    x0, x1 = x[0], x[1]
    if abs(x0) <= tol and abs(x1) <= tol:
        return WedgeLabel.S
    if abs(x0 - x1) <= tol:
        return WedgeLabel.HA
    if abs(x0 + x1) <= tol:
        return WedgeLabel.HB
    if abs(x1) < abs(x0):
        return WedgeLabel.W1 if x0 > 0 else WedgeLabel.W2
    return WedgeLabel.W3 if x1 > 0 else WedgeLabel.W4


def printed_regions(x: Sequence[float], tol: float = None) -> List[WedgeLabel]:
    """
    Every label whose region inequality, read literally, holds at x:
    W1 |x1| < x0 and x0 > 0, W2 |x1| < x0 and x0 < 0, W3 |x1| > x0 and x1 > 0,
    W4 |x1| > x0 and x1 < 0, plus the horizons. Read this way W2 is empty and
    W3, W4 reach into the past cone.
    """
    tol = WorkbenchConfig.HORIZON_BAND if tol is None else tol
    x0, x1 = float(x[0]), float(x[1])
    labels = []
    if abs(x1) < x0 and x0 > 0:
        labels.append(WedgeLabel.W1)
    if abs(x1) < x0 and x0 < 0:
        labels.append(WedgeLabel.W2)
    if abs(x1) > x0 and x1 > 0:
        labels.append(WedgeLabel.W3)
    if abs(x1) > x0 and x1 < 0:
        labels.append(WedgeLabel.W4)
    if abs(x0 - x1) <= tol:
        labels.append(WedgeLabel.HA)
    if abs(x0 + x1) <= tol:
        labels.append(WedgeLabel.HB)
    if abs(x0) <= tol and abs(x1) <= tol:
        labels.append(WedgeLabel.S)
    return labels


def timelike_character(field: AffineKillingField, x: Sequence[float], tol: float = None) -> CausalCharacter:
    tol = WorkbenchConfig.NULL_BAND if tol is None else tol
    norm2 = field.space.norm2(field(x))
    if norm2 < -tol:
        return CausalCharacter.TIMELIKE
    if norm2 > tol:
        return CausalCharacter.SPACELIKE
    return CausalCharacter.NULL


def horizon_residual(field: AffineKillingField, points: np.ndarray) -> float:
    """Largest |X(x)| over points; zero when the field vanishes on them"""
    return max((float(np.max(np.abs(field(p)))) for p in points), default=0.0)


def sample_points(space: FlatSpace, count: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return rng.normal(scale=scale, size=(count, space.dim))


def sample_bifurcation_surface(space: FlatSpace, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points with x0 = x1 = 0"""
    points = sample_points(space, count, rng)
    points[:, :2] = 0.0
    return points


def wedge_audit(space: FlatSpace, points: np.ndarray, field: Optional[AffineKillingField] = None) -> Dict[str, float]:
    """
    Causal character of the boost field against both region readings.
    Returns the fraction of points in each group where the expected character holds:
    timelike on W3/W4, spacelike on W1/W2, for the symmetric labels and for the literal
    inequalities.
    """
    field = lorentz(space, 0, 1) if field is None else field
    groups = {"side": [], "cone": [], "printed_side": [], "printed_cone": []}
    for x in points:
        character = timelike_character(field, x)
        label = wedge_classify(space, x)
        printed = printed_regions(x)
        if label in (WedgeLabel.W3, WedgeLabel.W4):
            groups["side"].append(character is CausalCharacter.TIMELIKE)
        elif label in (WedgeLabel.W1, WedgeLabel.W2):
            groups["cone"].append(character is CausalCharacter.SPACELIKE)
        if WedgeLabel.W3 in printed or WedgeLabel.W4 in printed:
            groups["printed_side"].append(character is CausalCharacter.TIMELIKE)
        if WedgeLabel.W1 in printed or WedgeLabel.W2 in printed:
            groups["printed_cone"].append(character is CausalCharacter.SPACELIKE)
    audit = {f"{k}_agreement": (float(np.mean(v)) if v else float("nan")) for k, v in groups.items()}
    audit.update({f"{k}_count": float(len(v)) for k, v in groups.items()})
    if audit["printed_side_agreement"] < 1.0:
        logger.info("Literal wedge inequalities disagree with the boost causal character "
                    f"on {1.0 - audit['printed_side_agreement']:.1%} of the side-wedge sample")
    return audit


# ---------------------------------------------------------------
# de Sitter hyperboloid
# ---------------------------------------------------------------
def sample_de_sitter(count: int, rng: np.random.Generator, tau_max: float = None) -> np.ndarray:
    """x = (sinh tau, cosh tau n) with tau uniform in [-tau_max, tau_max] and n uniform on S^3"""
    tau_max = WorkbenchConfig.DS_TAU_MAX if tau_max is None else tau_max
    tau = rng.uniform(-tau_max, tau_max, size=count)
    n = rng.normal(size=(count, 4))
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    return np.column_stack([np.sinh(tau), np.cosh(tau)[:, None] * n])


def check_on_hyperboloid(p: Sequence[float], tol: float = None) -> np.ndarray:
    tol = WorkbenchConfig.TOL if tol is None else tol
    p = np.asarray(p, dtype=float)
    if p.shape != (5,):
        raise OffHyperboloid("de Sitter points have 5 ambient components")
    defect = abs(AMBIENT_DE_SITTER.norm2(p) - 1.0)
    if defect > tol * max(1.0, float(p @ p)):
        raise OffHyperboloid(f"eta(x, x) differs from 1 by {defect:.3e}")
    return p


def ds_tangency_residual(field: AffineKillingField, p: Sequence[float], tol: float = None) -> float:
    """|eta(X(p), p)|; zero iff X(p) is tangent to the hyperboloid at p"""
    if field.space.dim != 5:
        raise ValueError("tangency is tested for fields on the 5-dimensional ambient space")
    p = check_on_hyperboloid(p, tol)
    return abs(AMBIENT_DE_SITTER.eta(field(p), p))


def tangency_fractions(samples: np.ndarray, tol: float = None) -> Dict[str, float]:
    """For each ambient generator, the fraction of samples where it is tangent"""
    tol = WorkbenchConfig.TOL if tol is None else tol
    fractions = {}
    for field in generators(AMBIENT_DE_SITTER):
        tangent = [ds_tangency_residual(field, p) <= tol for p in samples]
        fractions[field.label] = float(np.mean(tangent))
    return fractions


def tangent_generators(samples: np.ndarray, tol: float = None) -> List[str]:
    """Labels of the generators tangent at every sample; these span the de Sitter isometries"""
    return [label for label, fraction in tangency_fractions(samples, tol).items() if fraction == 1.0]


def induced_metric(p: Sequence[float], u: Sequence[float], v: Sequence[float], tol: float = None) -> float:
    """Pullback of eta to the hyperboloid: eta(u, v) for tangent u, v"""
    tol = WorkbenchConfig.TOL if tol is None else tol
    p = check_on_hyperboloid(p, tol)
    for w in (u, v):
        residual = abs(AMBIENT_DE_SITTER.eta(w, p))
        if residual > tol * max(1.0, float(np.linalg.norm(w) * np.linalg.norm(p))):
            raise NotTangent(f"vector is not tangent at p (eta(w, p) = {residual:.3e})")
    return AMBIENT_DE_SITTER.eta(u, v)


def de_sitter_wedge(p: Sequence[float], tol: float = None) -> WedgeLabel:
    """H_i = W_i restricted to the hyperboloid"""
    return wedge_classify(AMBIENT_DE_SITTER, check_on_hyperboloid(p), tol)
