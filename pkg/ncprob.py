"""
ncprob.py
=========
Finite-dimensional *-algebras living inside M_n(C), states given by density
matrices, and finite classical probability spaces embedded as diagonal algebras.

All algebras are stored as a basis that is orthonormal for the normalised
Hilbert-Schmidt product <a, b> = trace(a^dagger b) / n, so the identity has unit norm.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from config import WorkbenchConfig
from errors import (
    AmbientDimensionError,
    ClosureError,
    InvalidAlgebra,
    InvalidState,
)

logger = logging.getLogger("WedgeBayes")

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Normalised Hilbert-Schmidt inner product trace(a^dagger b) / n"""
    return np.vdot(a, b) / a.shape[0]


def hs_norm(a: np.ndarray) -> float:
    return float(np.sqrt(abs(hs_inner(a, a))))


def _extend_orthonormal(basis: List[np.ndarray], candidates: Iterable[np.ndarray],
                        threshold: float) -> List[np.ndarray]:
    """
    Gram-Schmidt the candidates against the basis (two passes).
    Candidates whose residual after projection is below threshold are dropped.
    """
    out = list(basis)
    for candidate in candidates:
        v = np.array(candidate, dtype=complex)
        norm = hs_norm(v)
        if norm < threshold:
            continue
        v = v / norm
        for _ in range(2):
            if out:
                stacked = np.array([b.reshape(-1) for b in out])
                coeffs = stacked.conj() @ v.reshape(-1) / v.shape[0]
                v = v - (coeffs @ stacked).reshape(v.shape)
        residual = hs_norm(v)
        if residual < threshold:
            continue
        out.append(v / residual)
    return out


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """A unital *-algebra of n x n matrices, given by an orthonormal basis of its span"""
    ambient_dim: int
    basis: Tuple[np.ndarray, ...]
    contains_identity: bool = True

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Basis elements flattened row-major, one per row"""
        n = self.ambient_dim
        if not self.basis:
            return np.zeros((0, n * n), dtype=complex)
        return np.array([b.reshape(-1) for b in self.basis])

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of the orthogonal projection of x in this basis"""
        return self.matrix.conj() @ np.asarray(x, dtype=complex).reshape(-1) / self.ambient_dim

    def project(self, x: np.ndarray) -> np.ndarray:
        n = self.ambient_dim
        return (self.coefficients(x) @ self.matrix).reshape(n, n)

    def residual(self, x: np.ndarray) -> float:
        """Normalised Hilbert-Schmidt distance from x to the span"""
        return hs_norm(np.asarray(x, dtype=complex) - self.project(x))

    def contains(self, other: "AlgebraBasis") -> float:
        """Largest residual of the other algebra's basis; zero means other is a subspace"""
        if other.ambient_dim != self.ambient_dim:
            return float("inf")
        if not other.basis:
            return 0.0
        return max(self.residual(b) for b in other.basis)

    def combine(self, coeffs: np.ndarray) -> np.ndarray:
        n = self.ambient_dim
        return (np.asarray(coeffs) @ self.matrix).reshape(n, n)

    def is_abelian(self, tol: float = None) -> bool:
        tol = WorkbenchConfig.TOL if tol is None else tol
        for i, a in enumerate(self.basis):
            for b in self.basis[i + 1:]:
                if hs_norm(a @ b - b @ a) > tol:
                    return False
        return True

    def validate(self, tol: float = None) -> "AlgebraBasis":
        """Checks orthonormality, *-closure and the identity; returns self"""
        tol = WorkbenchConfig.TOL if tol is None else tol
        n = self.ambient_dim
        if n < 1:
            raise InvalidAlgebra("ambient dimension must be positive")
        for b in self.basis:
            if b.shape != (n, n):
                raise InvalidAlgebra(f"basis element of shape {b.shape} in M_{n}")
        gram = self.matrix.conj() @ self.matrix.T / n
        gram_error = float(np.max(np.abs(gram - np.eye(self.dim)))) if self.dim else 0.0
        if gram_error > tol:
            raise InvalidAlgebra(f"basis is not orthonormal (Gram error {gram_error:.3e})")
        if not self.contains_identity or self.residual(np.eye(n)) > tol:
            raise InvalidAlgebra("identity is not in the span")
        for a in self.basis:
            if self.residual(a.conj().T) > tol:
                raise InvalidAlgebra("span is not closed under the adjoint")
            for b in self.basis:
                if self.residual(a @ b) > tol:
                    raise InvalidAlgebra("span is not closed under the product")
        return self


def span_distance(a: AlgebraBasis, b: AlgebraBasis) -> float:
    """Symmetric containment residual; zero iff the two spans coincide"""
    return max(a.contains(b), b.contains(a))


def _check_ambient(n: int):
    if n < 1:
        raise InvalidAlgebra("ambient dimension must be positive")
    if n > WorkbenchConfig.MAX_AMBIENT_DIM:
        raise AmbientDimensionError(
            f"ambient dimension {n} exceeds the configured maximum {WorkbenchConfig.MAX_AMBIENT_DIM}"
        )


def generate_algebra(generators: Sequence[np.ndarray], ambient_dim: Optional[int] = None) -> AlgebraBasis:
    """
    Smallest unital *-closed span containing the generators.
    Products and adjoints are adjoined round by round until the dimension stops growing.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if ambient_dim is None:
        if not gens:
            raise InvalidAlgebra("ambient dimension is required when there are no generators")
        ambient_dim = gens[0].shape[0]
    n = int(ambient_dim)
    _check_ambient(n)
    for g in gens:
        if g.shape != (n, n):
            raise InvalidAlgebra(f"generator of shape {g.shape} in M_{n}")

    threshold = WorkbenchConfig.DISCARD_THRESHOLD
    seeds = [np.eye(n, dtype=complex)] + gens + [g.conj().T for g in gens]
    basis = _extend_orthonormal([], seeds, threshold)
    fresh = basis

    for round_no in range(1, WorkbenchConfig.MAX_CLOSURE_ROUNDS + 1):
        candidates = []
        for a in basis:
            for b in fresh:
                candidates.append(a @ b)
                candidates.append(b @ a)
        candidates.extend(b.conj().T for b in fresh)
        grown = _extend_orthonormal(basis, candidates, threshold)
        if len(grown) > n * n:
            raise ClosureError(f"closure exceeded n^2 = {n * n} basis elements")
        if len(grown) == len(basis):
            logger.debug(f"Closure saturated at dimension {len(basis)} in M_{n} after {round_no} round(s)")
            return AlgebraBasis(n, tuple(basis))
        fresh = grown[len(basis):]
        basis = grown

    raise ClosureError(f"closure did not saturate within {WorkbenchConfig.MAX_CLOSURE_ROUNDS} rounds")


def commutant(alg: AlgebraBasis) -> AlgebraBasis:
    """{x : xa = ax for every basis element a}, from the null space of the stacked commutator maps"""
    n = alg.ambient_dim
    eye = np.eye(n)
    blocks = [np.kron(eye, a.T) - np.kron(a, eye) for a in alg.basis]
    if not blocks:
        blocks = [np.zeros((1, n * n))]
    kernel = null_space(np.vstack(blocks), rcond=WorkbenchConfig.TOL)
    candidates = [np.eye(n, dtype=complex)] + [kernel[:, k].reshape(n, n) for k in range(kernel.shape[1])]
    basis = _extend_orthonormal([], candidates, WorkbenchConfig.DISCARD_THRESHOLD)
    logger.debug(f"Commutant of a {alg.dim}-dimensional algebra in M_{n} has dimension {len(basis)}")
    return AlgebraBasis(n, tuple(basis))


def full_matrix_algebra(n: int) -> AlgebraBasis:
    """M_n itself, with the scaled matrix units as basis"""
    _check_ambient(n)
    basis = []
    for i in range(n):
        for j in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[i, j] = np.sqrt(n)
            basis.append(unit)
    return AlgebraBasis(n, tuple(basis))


def scalar_algebra(n: int) -> AlgebraBasis:
    _check_ambient(n)
    return AlgebraBasis(n, (np.eye(n, dtype=complex),))


def diagonal_algebra(n: int) -> AlgebraBasis:
    _check_ambient(n)
    basis = []
    for i in range(n):
        unit = np.zeros((n, n), dtype=complex)
        unit[i, i] = np.sqrt(n)
        basis.append(unit)
    return AlgebraBasis(n, tuple(basis))


def tensor_factor(d1: int, d2: int, which: int = 0) -> AlgebraBasis:
    """M_d1 (x) 1 when which == 0, 1 (x) M_d2 when which == 1, inside M_(d1 d2)"""
    n = d1 * d2
    _check_ambient(n)
    d = d1 if which == 0 else d2
    basis = []
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = np.sqrt(d)
            if which == 0:
                basis.append(np.kron(unit, np.eye(d2)))
            else:
                basis.append(np.kron(np.eye(d1), unit))
    return AlgebraBasis(n, tuple(basis))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_subalgebra(n: int, rng: np.random.Generator) -> AlgebraBasis:
    """
    A random unital *-subalgebra of M_n: either U (M_k + C) U^dagger for a random
    block size k, or the abelian algebra of a Hermitian matrix with repeated eigenvalues.
    """
    u = random_unitary(n, rng)
    if n >= 2 and rng.integers(2) == 0:
        k = int(rng.integers(1, n))
        block = np.zeros((n, n), dtype=complex)
        block[:k, :k] = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        generator = u @ block @ u.conj().T
    else:
        levels = int(rng.integers(1, n + 1))
        labels = rng.integers(0, levels, size=n).astype(float)
        generator = u @ np.diag(labels) @ u.conj().T
    return generate_algebra([generator], n)


@dataclass(frozen=True, eq=False)
class AlgState:
    """A state omega(a) = trace(rho a) on an algebra"""
    algebra: AlgebraBasis
    density: np.ndarray

    @classmethod
    def from_density(cls, algebra: AlgebraBasis, density: np.ndarray, tol: float = None) -> "AlgState":
        state = cls(algebra, np.asarray(density, dtype=complex))
        return state.validate(tol)

    def expect(self, a: np.ndarray) -> complex:
        return complex(np.trace(self.density @ a))

    __call__ = expect

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        hermitian = (self.density + self.density.conj().T) / 2
        return np.linalg.eigvalsh(hermitian)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def is_faithful(self, threshold: float = None) -> bool:
        threshold = WorkbenchConfig.FAITHFUL_THRESHOLD if threshold is None else threshold
        return self.min_eigenvalue > threshold

    def validate(self, tol: float = None) -> "AlgState":
        tol = WorkbenchConfig.TOL if tol is None else tol
        n = self.algebra.ambient_dim
        if self.density.shape != (n, n):
            raise InvalidState(f"density of shape {self.density.shape} for an algebra in M_{n}")
        hermiticity = float(np.max(np.abs(self.density - self.density.conj().T)))
        if hermiticity > tol:
            raise InvalidState(f"density is not Hermitian (residual {hermiticity:.3e})")
        if self.min_eigenvalue < -tol:
            raise InvalidState(f"density has a negative eigenvalue {self.min_eigenvalue:.3e}")
        trace_error = abs(np.trace(self.density) - 1)
        if trace_error > tol:
            raise InvalidState(f"density trace differs from 1 by {trace_error:.3e}")
        return self


def tracial_state(alg: AlgebraBasis) -> AlgState:
    """The unbiased state rho = I / n; in finite dimension it always exists"""
    n = alg.ambient_dim
    return AlgState(alg, np.eye(n, dtype=complex) / n)


def trace_residual(state: AlgState) -> float:
    """max over basis pairs of |omega(ab) - omega(ba)|"""
    worst = 0.0
    for a in state.algebra.basis:
        for b in state.algebra.basis:
            worst = max(worst, abs(state.expect(a @ b) - state.expect(b @ a)))
    return worst


@dataclass(frozen=True)
class FiniteProbabilitySpace:
    """(X, power set, mu) with X finite"""
    outcomes: Tuple
    mu: Tuple[float, ...]

    def __post_init__(self):
        if len(self.outcomes) < 1:
            raise InvalidState("a probability space needs at least one outcome")
        if len(self.outcomes) != len(self.mu):
            raise InvalidState("outcomes and probabilities differ in length")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise InvalidState("outcome labels must be distinct")
        if min(self.mu) < 0:
            raise InvalidState("probabilities must be nonnegative")
        if abs(sum(self.mu) - 1) > WorkbenchConfig.TOL:
            raise InvalidState(f"probabilities sum to {sum(self.mu)!r}, not 1")

    @classmethod
    def uniform(cls, outcomes) -> "FiniteProbabilitySpace":
        labels = tuple(range(1, outcomes + 1)) if isinstance(outcomes, int) else tuple(outcomes)
        return cls(labels, tuple([1.0 / len(labels)] * len(labels)))

    @property
    def size(self) -> int:
        return len(self.outcomes)

    def indices(self, event: Iterable) -> List[int]:
        position = {label: i for i, label in enumerate(self.outcomes)}
        try:
            return sorted({position[label] for label in event})
        except KeyError as e:
            raise InvalidState(f"event mentions unknown outcome {e.args[0]!r}") from None

    def probability(self, event: Iterable) -> float:
        return float(sum(self.mu[i] for i in self.indices(event)))

    def indicator(self, event: Iterable) -> np.ndarray:
        projection = np.zeros((self.size, self.size), dtype=complex)
        for i in self.indices(event):
            projection[i, i] = 1.0
        return projection


def embed_classical(space: FiniteProbabilitySpace) -> Tuple[AlgebraBasis, AlgState]:
    """Diagonal subalgebra of M_m with rho = diag(mu)"""
    alg = diagonal_algebra(space.size)
    state = AlgState(alg, np.diag(np.asarray(space.mu, dtype=complex)))
    return alg, state
