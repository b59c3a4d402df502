"""
gaussian.py
===========
Gaussian states of a harmonic chain with Dirichlet walls: ground states, region
restriction, symplectic spectra, entanglement Hamiltonians, thermofield doubles,
and the comparison of the half-chain entanglement Hamiltonian with the boost weight.

Conventions: hbar = 1, quadratures ordered x_1..x_M, p_1..p_M, symplectic form
Omega = [[0, I], [-I, 0]], covariance gamma_ij = <{R_i, R_j}>/2 so the vacuum has
symplectic eigenvalue 1/2. A quadratic kernel h stands for H = (1/2) R^T h R.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag, expm, schur

from config import WorkbenchConfig
from errors import EmptyRegion, NonFaithfulReduced, SingularCoupling, UncertaintyViolation

logger = logging.getLogger("WedgeBayes")


def sympmat(modes: int) -> np.ndarray:
    identity = np.identity(modes)
    zero = np.zeros((modes, modes))
    return np.block([[zero, identity], [-identity, zero]])


def changebasis(modes: int) -> np.ndarray:
    """Permutation taking x_1, p_1, ..., x_M, p_M ordering to x_1, ..., x_M, p_1, ..., p_M"""
    m = np.zeros((2 * modes, 2 * modes))
    for i in range(modes):
        m[2 * i, i] = 1
        m[2 * i + 1, i + modes] = 1
    return m


def _sym_power(matrix: np.ndarray, power: float) -> np.ndarray:
    w, v = np.linalg.eigh((matrix + matrix.T) / 2)
    return (v * w ** power) @ v.T


@dataclass(frozen=True)
class HarmonicChain:
    """N oscillators, on-site mass m, nearest-neighbour coupling kappa, fixed ends"""
    sites: int
    mass: float = 1e-3
    coupling: float = 1.0

    def __post_init__(self):
        if self.sites < 1:
            raise ValueError("a chain needs at least one site")
        if self.mass < 0:
            raise ValueError("mass must be nonnegative")
        if self.coupling <= 0:
            raise ValueError("coupling must be positive")

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        n = self.sites
        K = np.diag(np.full(n, self.mass ** 2 + 2 * self.coupling))
        K -= self.coupling * (np.eye(n, k=1) + np.eye(n, k=-1))
        return K


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Zero-mean Gaussian state given by its covariance matrix"""
    cov: np.ndarray

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    def uncertainty_residual(self) -> float:
        """min eigenvalue of gamma + (i/2) Omega; nonnegative for a physical state"""
        return float(np.linalg.eigvalsh(self.cov + 0.5j * sympmat(self.modes))[0])

    def validate(self, tol: float = None) -> "GaussianState":
        tol = WorkbenchConfig.TOL if tol is None else tol
        cov = np.asarray(self.cov)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError("covariance must be a square matrix of even size")
        if float(np.max(np.abs(cov - cov.T))) > tol:
            raise UncertaintyViolation("covariance is not symmetric")
        if self.uncertainty_residual() < -tol:
            raise UncertaintyViolation(f"uncertainty relation violated by {-self.uncertainty_residual():.3e}")
        return self

    def is_pure(self, tol: float = None) -> bool:
        tol = WorkbenchConfig.TOL if tol is None else tol
        return bool(np.all(np.abs(symplectic_spectrum(self) - 0.5) <= tol))


@dataclass(frozen=True, eq=False)
class EntanglementHamiltonian:
    """rho = exp(-(1/2) R^T kernel R) / Z with log Z = log_norm"""
    kernel: np.ndarray
    mode_energies: np.ndarray
    log_norm: float
    symplectic: np.ndarray
    saturated: int = 0

    @property
    def modes(self) -> int:
        return self.kernel.shape[0] // 2


def vacuum(modes: int) -> GaussianState:
    return GaussianState(np.eye(2 * modes) / 2)


def thermal_mode(nbar: float) -> GaussianState:
    return GaussianState(np.eye(2) * (nbar + 0.5))


def ground_state(chain: HarmonicChain) -> GaussianState:
    """x-block K^{-1/2}/2, p-block K^{1/2}/2, no x-p correlations"""
    w, v = np.linalg.eigh(chain.coupling_matrix)
    if w[0] <= WorkbenchConfig.FAITHFUL_THRESHOLD:
        raise SingularCoupling(f"coupling matrix has a zero mode (min eigenvalue {w[0]:.3e})")
    gx = 0.5 * (v * w ** -0.5) @ v.T
    gp = 0.5 * (v * w ** 0.5) @ v.T
    return GaussianState(block_diag(gx, gp))


def chain_hamiltonian(chain: HarmonicChain) -> np.ndarray:
    """Kernel K (+) I of H = (1/2) sum p^2 + (1/2) x^T K x"""
    return block_diag(chain.coupling_matrix, np.eye(chain.sites))


def restrict(state: GaussianState, region: Iterable[int]) -> GaussianState:
    region = sorted(set(int(i) for i in region))
    if not region:
        raise EmptyRegion("region has no sites")
    if region[0] < 0 or region[-1] >= state.modes:
        raise ValueError(f"region must lie within 0..{state.modes - 1}")
    index = region + [state.modes + i for i in region]
    return GaussianState(state.cov[np.ix_(index, index)])


def symplectic_spectrum(state: GaussianState) -> np.ndarray:
    """Symplectic eigenvalues, sorted descending, from the Hermitian matrix gamma^{1/2} (i Omega) gamma^{1/2}"""
    w, v = np.linalg.eigh(state.cov)
    if w[0] < -WorkbenchConfig.TOL:
        raise UncertaintyViolation(f"covariance is not positive (min eigenvalue {w[0]:.3e})")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    spectrum = np.linalg.eigvalsh(root @ (1j * sympmat(state.modes)) @ root)
    return np.sort(spectrum[state.modes:])[::-1]


def williamson(cov: np.ndarray, tol: float = 1e-11) -> Tuple[np.ndarray, np.ndarray]:
    """
    Williamson decomposition of a positive-definite symmetric matrix.

    Returns (nu, S) with cov = S diag(nu, nu) S^T and S symplectic for Omega.
    """
    (n, m) = cov.shape
    if n != m:
        raise ValueError("The input matrix is not square")
    if np.linalg.norm(cov - cov.T) >= tol:
        raise ValueError("The input matrix is not symmetric")
    if n % 2 != 0:
        raise ValueError("The input matrix must have an even number of rows/columns")
    if np.linalg.eigvalsh(cov)[0] <= 0:
        raise ValueError("Input matrix is not positive definite")

    n = n // 2
    omega = sympmat(n)
    rotmat = changebasis(n)
    inv_root = _sym_power(cov, -0.5)
    s1, K = schur(inv_root @ omega @ inv_root)

    # Flip 2x2 Schur blocks so every block has a positive upper entry; the Schur form
    # is in xpxp ordering and rotmat takes it to xxpp
    swap = np.array([[0, 1], [1, 0]])
    p = block_diag(*[np.identity(2) if s1[2 * i, 2 * i + 1] > 0 else swap for i in range(n)])
    Kt = K @ p
    s1t = p @ s1 @ p
    dd = rotmat.T @ s1t @ rotmat
    Ktt = Kt @ rotmat
    nu = np.array([1 / dd[i, i + n] for i in range(n)])
    S_inv = inv_root @ Ktt @ np.diag(np.sqrt(np.concatenate([nu, nu])))
    return nu, np.linalg.inv(S_inv).T


def entanglement_hamiltonian(state: GaussianState, tol: float = None,
                             saturate: bool = False) -> EntanglementHamiltonian:
    """
    Quadratic kernel of -log(rho). In the Williamson frame it is diagonal with
    eps_k = log((nu_k + 1/2)/(nu_k - 1/2)).

    A mode within SYMPLECTIC_FLOOR of 1/2 is a pure direction and raises NonFaithfulReduced.
    With saturate=True such modes are instead capped at eps = log((1 + floor)/floor),
    as boost_comparison does for long chains, whose inner modes are pure to machine precision.
    A state with only pure modes always raises.
    """
    tol = WorkbenchConfig.TOL if tol is None else tol
    state.validate(tol)
    floor = WorkbenchConfig.SYMPLECTIC_FLOOR
    nu, S = williamson((state.cov + state.cov.T) / 2)
    excess = nu - 0.5
    saturated = excess < floor
    if np.all(saturated):
        raise NonFaithfulReduced("every symplectic eigenvalue is 1/2; the state is pure")
    if np.any(saturated) and not saturate:
        raise NonFaithfulReduced(f"{int(saturated.sum())} of {len(nu)} symplectic eigenvalues are 1/2; "
                                 f"the entanglement Hamiltonian diverges")
    cap = np.log((1 + floor) / floor)
    energies = np.where(saturated, cap, np.log((nu + 0.5) / np.maximum(excess, floor)))
    if np.any(saturated):
        logger.debug(f"{int(saturated.sum())} of {len(nu)} modes saturated at eps = {cap:.2f}")
    S_inv = np.linalg.inv(S)
    kernel = S_inv.T @ np.diag(np.concatenate([energies, energies])) @ S_inv
    log_norm = -float(np.sum(np.log(2 * np.sinh(energies / 2))))
    return EntanglementHamiltonian((kernel + kernel.T) / 2, energies, log_norm, S, int(saturated.sum()))


def gibbs_covariance(h: np.ndarray, beta: float) -> np.ndarray:
    """Covariance of exp(-beta H) / Z for H = (1/2) R^T h R, h positive definite"""
    if beta <= 0:
        raise ValueError("beta must be positive")
    omega, S = williamson(np.asarray(h, dtype=float))
    nu = 0.5 / np.tanh(beta * omega / 2)
    frame = np.linalg.inv(S).T
    cov = frame @ np.diag(np.concatenate([nu, nu])) @ frame.T
    return (cov + cov.T) / 2


def thermal_state(h: np.ndarray, beta: float) -> GaussianState:
    return GaussianState(gibbs_covariance(h, beta))


def two_mode_squeezed(r: float) -> GaussianState:
    """Two-mode squeezed vacuum: <x1 x2> = sinh(2r)/2, <p1 p2> = -sinh(2r)/2"""
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    cov = np.array([
        [c, s, 0, 0],
        [s, c, 0, 0],
        [0, 0, c, -s],
        [0, 0, -s, c],
    ])
    return GaussianState(cov)


def _embed_copy(transform: np.ndarray, copy: int, modes: int) -> np.ndarray:
    """Place a single-copy transformation on copy 0 or 1 of a doubled system"""
    index = [copy * modes + k for k in range(modes)] + [2 * modes + copy * modes + k for k in range(modes)]
    big = np.eye(4 * modes)
    big[np.ix_(index, index)] = transform
    return big


def tfd(h: np.ndarray, beta: float) -> GaussianState:
    """
    Pure state on two copies whose restriction to copy 0 is the Gibbs state of h at beta.
    Copy 0 holds modes 0..M-1, copy 1 modes M..2M-1; each normal mode is two-mode squeezed
    with cosh(2 r_k) = coth(beta w_k / 2), i.e. tanh(r_k) = exp(-beta w_k / 2).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    h = np.asarray(h, dtype=float)
    M = h.shape[0] // 2
    omega, S = williamson(h)
    cosh2r = 1 / np.tanh(beta * omega / 2)
    sinh2r = np.sqrt(np.maximum(cosh2r ** 2 - 1, 0.0))

    cov = np.zeros((4 * M, 4 * M))
    for k in range(M):
        x0, x1, p0, p1 = k, M + k, 2 * M + k, 3 * M + k
        for i in (x0, x1, p0, p1):
            cov[i, i] = cosh2r[k] / 2
        cov[x0, x1] = cov[x1, x0] = sinh2r[k] / 2
        cov[p0, p1] = cov[p1, p0] = -sinh2r[k] / 2

    frame = np.linalg.inv(S).T
    transform = _embed_copy(frame, 0, M) @ _embed_copy(frame, 1, M)
    cov = transform @ cov @ transform.T
    logger.debug(f"Thermofield double on {M} + {M} modes at beta={beta:.6g}")
    return GaussianState((cov + cov.T) / 2)


def symplectic_transform(state: GaussianState, S: np.ndarray) -> GaussianState:
    return GaussianState(S @ state.cov @ S.T)


def random_symplectic(modes: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """exp(Omega H) with H random symmetric; exponentials of Hamiltonian matrices are symplectic"""
    H = rng.normal(scale=scale, size=(2 * modes, 2 * modes))
    return expm(sympmat(modes) @ (H + H.T) / 2)


def flow_invariance_residual(state: GaussianState, h: np.ndarray,
                             times: Sequence[float] = (0.1, 0.7, 1.9)) -> float:
    """Largest change of gamma under R -> exp(Omega h t) R over the given times"""
    generator = sympmat(state.modes) @ np.asarray(h, dtype=float)
    worst = 0.0
    for t in times:
        M = expm(generator * t)
        worst = max(worst, float(np.max(np.abs(M @ state.cov @ M.T - state.cov))))
    return worst


# ---------------------------------------------------------------
# Entanglement Hamiltonian versus boost weight
# ---------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BoostComparison:
    """Site profile of the half-chain entanglement Hamiltonian against 2 pi d (m^2 + 2 kappa)"""
    chain: HarmonicChain
    sites: np.ndarray
    distance: np.ndarray
    h_E_weight: np.ndarray
    bw_weight: np.ndarray
    rel_dev: np.ndarray
    deviation: float
    slope: float
    r_squared: float
    increasing: bool
    saturated: int = 0
    extras: Dict[str, float] = field(default_factory=dict)

    def table(self) -> np.ndarray:
        """Columns: site_index, h_E_weight, bw_weight, rel_dev"""
        return np.column_stack([self.sites, self.h_E_weight, self.bw_weight, self.rel_dev])


def _linear_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    total = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum((y - fitted) ** 2)) / total if total > 0 else 1.0
    return float(slope), r_squared


def boost_comparison(chain: HarmonicChain, window: int = None, tol: float = None) -> BoostComparison:
    """
    Left half of the ground state: sites 0..L-1 with the cut between L-1 and L.
    Site j sits at distance d_j = L - j - 1/2 from the cut. The summary deviation
    is the mean |rel_dev| over the `window` sites nearest the cut.
    """
    window = WorkbenchConfig.BW_WINDOW if window is None else window
    if chain.sites < 4:
        raise ValueError("boost comparison needs at least 4 sites")
    half = chain.sites // 2
    reduced = restrict(ground_state(chain), range(half))
    hamiltonian = entanglement_hamiltonian(reduced, tol, saturate=True)

    sites = np.arange(half)
    distance = half - sites - 0.5
    weight = np.diag(hamiltonian.kernel)[:half]
    bw = 2 * np.pi * distance * (chain.mass ** 2 + 2 * chain.coupling)
    rel_dev = (weight - bw) / bw

    nearest = np.argsort(distance)[:min(window, half)]
    deviation = float(np.mean(np.abs(rel_dev[nearest])))

    quarter = np.argsort(distance)[:max(2, half // 4)]
    slope, r_squared = _linear_fit(distance[quarter], weight[quarter])
    ordered = weight[quarter][np.argsort(distance[quarter])]
    increasing = bool(np.all(np.diff(ordered) > 0))

    logger.info(f"Boost comparison N={chain.sites}, m={chain.mass:g}: deviation {deviation:.4f}, "
                f"R^2 {r_squared:.6f}, {hamiltonian.saturated} saturated modes")
    reconstruction = float(np.max(np.abs(gibbs_covariance(hamiltonian.kernel, 1.0) - reduced.cov)))
    return BoostComparison(chain, sites, distance, weight, bw, rel_dev, deviation, slope, r_squared,
                           increasing, hamiltonian.saturated, {"reconstruction": reconstruction})


def convergence_study(sizes: Sequence[int] = (50, 100, 200), mass: float = 1e-3,
                      coupling: float = 1.0, window: int = None) -> Dict[int, BoostComparison]:
    return {n: boost_comparison(HarmonicChain(n, mass, coupling), window) for n in sizes}
