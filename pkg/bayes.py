"""
bayes.py
========
Inference recipes: classical Bayes on a finite space, the noncommutative Bayes
rule posterior(.) = omega_accessible(E_prior .), the classical/noncommutative
consistency check, and the modified recipe whose prior is the restriction of a
global pure state (thermofield double) to a wedge factor.

Infeasibility (the modular constraint failing for the chosen prior) is a result,
not an exception.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from config import WorkbenchConfig
from errors import (
    InvalidState,
    ModularViolation,
    NonFaithfulPrior,
    NotASubalgebra,
    ZeroConditioningEvent,
)
from modular import conditional_expectation, kms_residual, modular_hamiltonian, takesaki_check
from ncprob import (
    PAULI_Z,
    AlgebraBasis,
    AlgState,
    FiniteProbabilitySpace,
    embed_classical,
    full_matrix_algebra,
    generate_algebra,
    random_unitary,
    tensor_factor,
    tracial_state,
)

logger = logging.getLogger("WedgeBayes")


class PriorPolicy(Enum):
    TRACIAL = "tracial"
    SUPPLIED = "supplied"


@dataclass(frozen=True, eq=False)
class InferenceProblem:
    """Estimate the state on total_algebra knowing only its restriction to accessible"""
    total_algebra: AlgebraBasis
    accessible: AlgebraBasis
    true_state: AlgState
    prior_policy: PriorPolicy = PriorPolicy.TRACIAL
    supplied_prior: Optional[AlgState] = None

    def validate(self, tol: float = None) -> "InferenceProblem":
        tol = WorkbenchConfig.TOL if tol is None else tol
        containment = self.total_algebra.contains(self.accessible)
        if containment > tol:
            raise NotASubalgebra(containment)
        if self.accessible.residual(np.eye(self.accessible.ambient_dim)) > tol:
            raise NotASubalgebra(self.accessible.residual(np.eye(self.accessible.ambient_dim)))
        self.true_state.validate(tol)
        if self.prior_policy is PriorPolicy.SUPPLIED:
            if self.supplied_prior is None:
                raise InvalidState("prior policy 'supplied' needs a prior state")
            self.supplied_prior.validate(tol)
        return self


@dataclass(frozen=True, eq=False)
class InferenceResult:
    """Prior, posterior functional (values on the total-algebra basis) and diagnostics"""
    algebra: AlgebraBasis
    prior: AlgState
    posterior: Optional[np.ndarray]
    feasible: bool
    diagnostics: Dict[str, float] = field(default_factory=dict)
    warnings: Tuple[str, ...] = ()

    def evaluate(self, x: np.ndarray) -> complex:
        if self.posterior is None:
            raise ModularViolation(self.diagnostics.get("takesaki", float("nan")))
        return complex(self.algebra.coefficients(x) @ self.posterior)

    __call__ = evaluate

    def positivity_residual(self, rng: np.random.Generator = None, samples: int = None) -> float:
        """max(0, -min posterior(x^dagger x)) over random x in the algebra"""
        rng = np.random.default_rng(WorkbenchConfig.SEED) if rng is None else rng
        samples = WorkbenchConfig.POSITIVITY_SAMPLES if samples is None else samples
        n = self.algebra.ambient_dim
        k = self.algebra.dim
        worst = 0.0
        for _ in range(samples):
            c = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2 * k)
            x = self.algebra.combine(c)
            worst = min(worst, self.evaluate(x.conj().T @ x).real)
        return -worst


def classical_posterior(space: FiniteProbabilitySpace, B: Iterable, A: Iterable,
                        prior: Optional[Sequence[float]] = None) -> float:
    """
    prior(A & B) / prior(B). The default prior is uniform, which reduces to |A & B| / |B|.
    """
    b_idx = space.indices(B)
    if not b_idx:
        raise ZeroConditioningEvent("conditioning event is empty")
    both = sorted(set(b_idx) & set(space.indices(A)))
    if prior is None:
        return len(both) / len(b_idx)
    weights = np.asarray(prior, dtype=float)
    mass = float(weights[b_idx].sum())
    if mass <= 0:
        raise ZeroConditioningEvent("conditioning event has zero prior mass")
    return float(weights[both].sum()) / mass


def nc_prior(alg: AlgebraBasis) -> AlgState:
    """
    The unbiased prior, i.e. the tracial state. Only finite algebras are handled;
    an infinite (non-finite) algebra has no tracial state at all.
    """
    return tracial_state(alg)


def _prior_for(problem: InferenceProblem) -> AlgState:
    if problem.prior_policy is PriorPolicy.TRACIAL:
        return nc_prior(problem.total_algebra)
    prior = problem.supplied_prior
    if prior.algebra is not problem.total_algebra:
        prior = AlgState(problem.total_algebra, prior.density)
    return prior


def nc_bayes_update(problem: InferenceProblem, tol: float = None,
                    rng: Optional[np.random.Generator] = None) -> InferenceResult:
    """posterior(a) = omega_accessible(E_prior(a)) for every basis element a of the total algebra"""
    tol = WorkbenchConfig.TOL if tol is None else tol
    problem.validate(tol)
    prior = _prior_for(problem)
    if not prior.is_faithful():
        raise NonFaithfulPrior(prior.min_eigenvalue, "prior is not faithful; modular theory is undefined")

    try:
        ce = conditional_expectation(prior, problem.accessible, tol, rng)
    except ModularViolation as e:
        logger.warning(f"Inference infeasible: modular constraint residual {e.residual:.3e}")
        return InferenceResult(problem.total_algebra, prior, None, False, {"takesaki": e.residual})

    posterior = np.array([problem.true_state.expect(image) for image in ce.images])
    logger.debug(f"Posterior computed on {problem.total_algebra.dim} basis elements")
    return InferenceResult(problem.total_algebra, prior, posterior, True, dict(ce.residuals), ce.warnings)


def classical_equivalence_check(space: FiniteProbabilitySpace, B_event: Iterable, A_event: Iterable,
                                tol: float = None) -> float:
    """
    |noncommutative posterior - classical posterior| through the diagonal embedding.
    The accessible algebra is span{I, P_B}; the noncommutative answer is
    posterior(P_(A & B)) / posterior(P_B). When the true state gives B no mass the
    ratio is read off the tracial prior, whose conditional expectation fixes it.
    """
    tol = WorkbenchConfig.TOL if tol is None else tol
    B_event = list(B_event)
    A_event = list(A_event)
    classical = classical_posterior(space, B_event, A_event)

    alg, state = embed_classical(space)
    p_b = space.indicator(B_event)
    accessible = generate_algebra([p_b], space.size)
    result = nc_bayes_update(InferenceProblem(alg, accessible, state), tol)

    both = [label for label in A_event if label in set(B_event)]
    p_both = space.indicator(both)
    b_mass = result(p_b).real
    if b_mass <= tol:
        logger.warning("Conditioning event has zero mass under the true state; comparing against the prior")
        noncommutative = result.prior(p_both).real / result.prior(p_b).real
    else:
        noncommutative = result(p_both).real / b_mass
    return abs(noncommutative - classical)


def partial_trace(rho: np.ndarray, d1: int, d2: int, keep: int = 0) -> np.ndarray:
    blocks = rho.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ijkj->ik", blocks)
    return np.einsum("ijil->jl", blocks)


def thermofield_double(levels: int, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pure state sum_k sqrt(p_k) |k>|k> with p the Gibbs weights of h = diag(0, ..., levels - 1).
    Returns (global density, h).
    """
    h = np.diag(np.arange(levels, dtype=float)).astype(complex)
    weights = np.exp(-beta * np.arange(levels))
    weights = weights / weights.sum()
    vector = np.zeros(levels * levels, dtype=complex)
    for k in range(levels):
        vector[k * levels + k] = np.sqrt(weights[k])
    return np.outer(vector, vector.conj()), h


def modified_bayes_demo(levels: int, beta: float = 2 * np.pi, tol: float = None,
                        rng: Optional[np.random.Generator] = None) -> InferenceResult:
    """
    Bayes update with the vacuum-restriction prior. The global state is the thermofield
    double on M_d (x) M_d, the accessible algebra is the wedge factor M_d (x) 1, and the prior
    is the wedge restriction (the Gibbs state of h at beta) extended by the trace on the far
    factor, so its conditional expectation is the slice map a (x) b -> tr(b)/d a.
    Diagnostics carry the Takesaki residual, the KMS residual of the wedge state against h at beta,
    and its KMS residual at beta = 1 against its modular Hamiltonian.
    """
    tol = WorkbenchConfig.TOL if tol is None else tol
    if levels < 2:
        raise ValueError("levels must be at least 2")
    if beta <= 0:
        raise ValueError("beta must be positive")

    global_density, h_boost = thermofield_double(levels, beta)
    wedge_density = partial_trace(global_density, levels, levels, keep=0)

    total = full_matrix_algebra(levels * levels)
    wedge = tensor_factor(levels, levels, which=0)
    true_state = AlgState(total, global_density)
    # trace on the far factor keeps the prior as faithful as the wedge state
    prior = AlgState(total, np.kron(wedge_density, np.eye(levels) / levels))
    problem = InferenceProblem(total, wedge, true_state, PriorPolicy.SUPPLIED, prior)
    result = nc_bayes_update(problem, tol, rng)

    local = AlgState(full_matrix_algebra(levels), wedge_density)
    diagnostics = dict(result.diagnostics)
    diagnostics["kms_beta"] = kms_residual(local, h_boost, beta)
    diagnostics["kms_modular"] = kms_residual(local, modular_hamiltonian(local), 1.0)
    logger.info(f"Thermofield double demo: levels={levels}, beta={beta:.6g}, "
                f"KMS residual {diagnostics['kms_beta']:.3e}")
    return replace(result, diagnostics=diagnostics)


def entangled_prior_counterexample(seed: int = 0, attempts: int = 20,
                                   tol: float = None) -> Tuple[AlgState, AlgebraBasis, float]:
    """
    Searches a full-rank entangled prior on M_2 (x) M_2 for which the abelian accessible
    algebra generated by sigma_z (x) 1 violates the modular constraint.
    """
    tol = WorkbenchConfig.TOL if tol is None else tol
    rng = np.random.default_rng(seed)
    total = full_matrix_algebra(4)
    accessible = generate_algebra([np.kron(PAULI_Z, np.eye(2))], 4)
    residual = 0.0
    for _ in range(attempts):
        psi = random_unitary(4, rng)[:, 0]
        mix = rng.uniform(0.2, 0.8)
        density = mix * np.outer(psi, psi.conj()) + (1 - mix) * np.eye(4) / 4
        prior = AlgState(total, density)
        residual = takesaki_check(prior, accessible, tol)
        if residual > 10 * tol:
            return prior, accessible, residual
    raise RuntimeError(f"no violating prior found in {attempts} attempts (last residual {residual:.3e})")
