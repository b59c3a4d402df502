"""
modular.py
==========
Modular theory for faithful states on matrix algebras: modular flow and
Hamiltonian, KMS residuals, the Takesaki gate and the state-preserving
conditional expectation built as a GNS projection.

Sign conventions
----------------
automorphism(h, a, t) = e^{ith} a e^{-ith}, and kms_residual(state, h, beta)
tests omega(a e^{-beta h} b e^{beta h}) = omega(ba). With H = -log(rho) the modular
flow is sigma_t = automorphism(-H, ., t), and omega is KMS at beta = 1 for the
flow generated by +H, i.e. for sigma_{-t}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import solve

from config import WorkbenchConfig
from errors import (
    KMSOverflowError,
    ModularViolation,
    NonFaithfulState,
    NotASubalgebra,
    PropertyFailure,
)
from ncprob import AlgebraBasis, AlgState, hs_norm

logger = logging.getLogger("WedgeBayes")


def _hermitian(h: np.ndarray, tol: float) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if float(np.max(np.abs(h - h.conj().T))) > tol:
        raise ValueError("generator must be Hermitian")
    return (h + h.conj().T) / 2


def faithful_spectrum(state: AlgState) -> Tuple[np.ndarray, np.ndarray, Tuple[str, ...]]:
    """Eigen-decomposition of rho, refusing singular densities"""
    rho = (state.density + state.density.conj().T) / 2
    w, v = np.linalg.eigh(rho)
    if w[0] <= WorkbenchConfig.FAITHFUL_THRESHOLD:
        raise NonFaithfulState(float(w[0]))
    warnings = ()
    if w[0] < WorkbenchConfig.CONDITIONING_WARN:
        message = f"near-singular density (min eigenvalue {w[0]:.3e}); log(rho) is ill-conditioned"
        logger.warning(message)
        warnings = (message,)
    return w, v, warnings


@dataclass(frozen=True, eq=False)
class ModularFlow:
    """sigma_t(a) = rho^{it} a rho^{-it} for a faithful state"""
    state: AlgState
    generator: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    warnings: Tuple[str, ...] = ()

    @classmethod
    def of(cls, state: AlgState) -> "ModularFlow":
        w, v, warnings = faithful_spectrum(state)
        generator = (v * -np.log(w)) @ v.conj().T
        return cls(state, generator, w, v, warnings)

    def unitary(self, t: float) -> np.ndarray:
        v = self.eigenvectors
        return (v * np.exp(1j * t * np.log(self.eigenvalues))) @ v.conj().T

    def apply(self, a: np.ndarray, t: float) -> np.ndarray:
        u = self.unitary(t)
        return u @ a @ u.conj().T

    __call__ = apply


def modular_flow(state: AlgState, a: np.ndarray, t: float) -> np.ndarray:
    return ModularFlow.of(state).apply(np.asarray(a, dtype=complex), t)


def modular_hamiltonian(state: AlgState) -> np.ndarray:
    """H = -log(rho); omega is KMS at beta = 1 for the flow generated by H (sigma_{-t})"""
    return ModularFlow.of(state).generator


def automorphism(h: np.ndarray, a: np.ndarray, t: float) -> np.ndarray:
    """e^{ith} a e^{-ith}"""
    lam, v = np.linalg.eigh(_hermitian(h, WorkbenchConfig.TOL))
    u = (v * np.exp(1j * t * lam)) @ v.conj().T
    return u @ a @ u.conj().T


def gibbs_state(alg: AlgebraBasis, h: np.ndarray, beta: float) -> AlgState:
    """rho = e^{-beta h} / Z"""
    lam, v = np.linalg.eigh(_hermitian(h, WorkbenchConfig.TOL))
    weights = np.exp(-beta * (lam - lam.min()))
    weights = weights / weights.sum()
    return AlgState(alg, (v * weights) @ v.conj().T)


def kms_residual(state: AlgState, h: np.ndarray, beta: float) -> float:
    """
    max over basis pairs (a, b) of |omega(a e^{-beta h} b e^{beta h}) - omega(ba)|.
    Zero certifies the KMS condition at beta for the flow generated by h.
    """
    lam, v = np.linalg.eigh(_hermitian(h, WorkbenchConfig.TOL))
    shift = (lam.max() + lam.min()) / 2
    spread = abs(beta) * (lam.max() - lam.min()) / 2
    if spread > WorkbenchConfig.EXP_SAFE_BOUND:
        raise KMSOverflowError(f"|beta h| spread {spread:.1f} exceeds the exp-safe bound")
    forward = (v * np.exp(-beta * (lam - shift))) @ v.conj().T
    backward = (v * np.exp(beta * (lam - shift))) @ v.conj().T

    basis = state.algebra.basis
    rho = state.density
    # trace(X Y) = sum(X.T * Y)
    weighted = np.array([(rho @ a).T.reshape(-1) for a in basis])
    plain = np.array([a.reshape(-1) for a in basis])
    moved = np.array([(forward @ b @ backward).reshape(-1) for b in basis])
    lhs = weighted @ moved.T
    rhs = (weighted @ plain.T).T
    return float(np.max(np.abs(lhs - rhs)))


def invariance_residual(state: AlgState, h: np.ndarray) -> float:
    """max over basis b of |omega([h, b])|; zero iff omega is invariant under the flow of h"""
    h = _hermitian(h, WorkbenchConfig.TOL)
    return max(abs(state.expect(h @ b - b @ h)) for b in state.algebra.basis)


def takesaki_check(state: AlgState, sub: AlgebraBasis, tol: float = None) -> float:
    """
    Largest residual of [H_mod, a] outside span(sub) over the sub basis.
    Zero iff the modular flow of the state maps sub into itself.
    """
    tol = WorkbenchConfig.TOL if tol is None else tol
    containment = state.algebra.contains(sub)
    if containment > tol:
        raise NotASubalgebra(containment)
    h = ModularFlow.of(state).generator
    return max(sub.residual(h @ a - a @ h) for a in sub.basis)


@dataclass(frozen=True, eq=False)
class CondExpectation:
    """Linear map A -> A0 stored through its images of the A basis"""
    source: AlgebraBasis
    target: AlgebraBasis
    images: Tuple[np.ndarray, ...]
    state: AlgState
    residuals: Dict[str, float] = field(default_factory=dict)
    warnings: Tuple[str, ...] = ()

    @cached_property
    def stacked_images(self) -> np.ndarray:
        return np.array(self.images)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """E(x); x is first projected onto span(A)"""
        coeffs = self.source.coefficients(x)
        return np.tensordot(coeffs, self.stacked_images, axes=1)

    __call__ = apply


def gns_projection(state: AlgState, sub: AlgebraBasis) -> CondExpectation:
    """
    Orthogonal projection of A onto sub for <a, b> = omega(a^dagger b), without any check.
    It is the omega-preserving conditional expectation whenever one exists.
    """
    target = list(sub.basis)
    source = list(state.algebra.basis)
    gram = np.array([[state.expect(bi.conj().T @ bj) for bj in target] for bi in target])
    overlaps = np.array([[state.expect(bj.conj().T @ s) for s in source] for bj in target])
    coeffs = solve(gram, overlaps, assume_a="her")
    images = tuple(np.tensordot(coeffs[:, k], np.array(target), axes=1) for k in range(len(source)))
    return CondExpectation(state.algebra, sub, images, state)


def ce_property_residuals(ce: CondExpectation, rng: Optional[np.random.Generator] = None,
                          samples: int = None) -> Dict[str, float]:
    """Residuals of the five conditional-expectation axioms"""
    rng = np.random.default_rng(WorkbenchConfig.SEED) if rng is None else rng
    samples = WorkbenchConfig.POSITIVITY_SAMPLES if samples is None else samples
    n = ce.source.ambient_dim
    state = ce.state
    source = ce.source.basis
    target = ce.target.basis

    unital = hs_norm(ce(np.eye(n)) - np.eye(n))

    idempotent = max(hs_norm(ce(image) - image) for image in ce.images)
    idempotent = max([idempotent] + [hs_norm(ce(b) - b) for b in target])
    idempotent = max([idempotent] + [ce.target.residual(image) for image in ce.images])

    # Left and right module properties together give E(bac) = b E(a) c
    module = 0.0
    for b in target:
        for a, image in zip(source, ce.images):
            module = max(module, hs_norm(ce(b @ a) - b @ image), hs_norm(ce(a @ b) - image @ b))

    preserving = max(abs(state.expect(image) - state.expect(a)) for a, image in zip(source, ce.images))

    matrix = ce.source.matrix
    worst_eigenvalue = 0.0
    for _ in range(samples):
        c = (rng.standard_normal(len(source)) + 1j * rng.standard_normal(len(source))) / np.sqrt(2 * len(source))
        x = (c @ matrix).reshape(n, n)
        y = ce(x.conj().T @ x)
        worst_eigenvalue = min(worst_eigenvalue, float(np.linalg.eigvalsh((y + y.conj().T) / 2)[0]))

    return {
        "unital": float(unital),
        "idempotent": float(idempotent),
        "module": float(module),
        "state_preserving": float(preserving),
        "positivity": float(-worst_eigenvalue),
    }


def conditional_expectation(state: AlgState, sub: AlgebraBasis, tol: float = None,
                            rng: Optional[np.random.Generator] = None) -> CondExpectation:
    """
    The omega-preserving conditional expectation onto sub, gated by the Takesaki check.
    Raises ModularViolation when the gate fails and PropertyFailure when an axiom does not hold.
    """
    tol = WorkbenchConfig.TOL if tol is None else tol
    residual = takesaki_check(state, sub, tol)
    if residual > tol:
        logger.debug(f"Takesaki gate closed: residual {residual:.3e}")
        raise ModularViolation(residual)
    warnings = ModularFlow.of(state).warnings
    ce = gns_projection(state, sub)
    residuals = ce_property_residuals(ce, rng)
    residuals["takesaki"] = residual
    failing = {k: v for k, v in residuals.items() if v > tol}
    if failing:
        raise PropertyFailure(failing)
    logger.debug(f"Conditional expectation onto a {sub.dim}-dimensional subalgebra built")
    return replace(ce, residuals=residuals, warnings=warnings)
