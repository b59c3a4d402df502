r"""Unit tests for modular flows, KMS residuals and conditional expectations"""
import numpy as np
import pytest

from conftest import random_density
from errors import KMSOverflowError, ModularViolation, NonFaithfulState
from modular import (
    ModularFlow,
    automorphism,
    ce_property_residuals,
    conditional_expectation,
    gibbs_state,
    gns_projection,
    invariance_residual,
    kms_residual,
    modular_flow,
    modular_hamiltonian,
    takesaki_check,
)
from ncprob import (
    PAULI_X,
    PAULI_Z,
    AlgState,
    diagonal_algebra,
    full_matrix_algebra,
    generate_algebra,
    random_subalgebra,
    tensor_factor,
    tracial_state,
)


@pytest.fixture
def skewed_state():
    return AlgState(full_matrix_algebra(2), np.diag([0.9, 0.1]).astype(complex))


@pytest.fixture
def x_algebra():
    return generate_algebra([PAULI_X])


class TestModularFlow:
    """Tests for sigma_t(a) = rho^{it} a rho^{-it}"""

    def test_time_zero_is_identity(self, density_factory):
        state = AlgState(full_matrix_algebra(3), density_factory(3))
        a = np.arange(9, dtype=complex).reshape(3, 3)
        assert np.allclose(modular_flow(state, a, 0.0), a)

    @pytest.mark.parametrize("t", [-1.3, 0.4, 2.0])
    def test_state_is_invariant(self, t, density_factory):
        state = AlgState(full_matrix_algebra(3), density_factory(3))
        a = np.arange(9, dtype=complex).reshape(3, 3) + 1j
        assert state(modular_flow(state, a, t)) == pytest.approx(state(a), abs=1e-10)

    @pytest.mark.parametrize("t", [-0.7, 1.1])
    def test_matches_automorphism_of_minus_hamiltonian(self, t, density_factory):
        state = AlgState(full_matrix_algebra(3), density_factory(3))
        a = np.eye(3, k=1, dtype=complex)
        h = modular_hamiltonian(state)
        assert np.allclose(modular_flow(state, a, t), automorphism(-h, a, t), atol=1e-10)

    def test_hamiltonian_is_minus_log_rho(self, skewed_state):
        h = modular_hamiltonian(skewed_state)
        assert np.allclose(h, np.diag(-np.log([0.9, 0.1])), atol=1e-12)

    def test_non_faithful(self):
        state = AlgState(full_matrix_algebra(2), np.diag([1.0, 0.0]).astype(complex))
        with pytest.raises(NonFaithfulState):
            ModularFlow.of(state)

    def test_near_singular_warns(self):
        state = AlgState(full_matrix_algebra(2), np.diag([1 - 1e-10, 1e-10]).astype(complex))
        assert ModularFlow.of(state).warnings


class TestKMS:
    """Tests for the KMS residual"""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_faithful_state_is_kms_for_its_modular_hamiltonian(self, n, rng, tol):
        for _ in range(5):
            state = AlgState(full_matrix_algebra(n), random_density(n, rng))
            assert kms_residual(state, modular_hamiltonian(state), 1.0) <= tol

    def test_reversed_generator_fails_off_trace(self, skewed_state):
        assert kms_residual(skewed_state, -modular_hamiltonian(skewed_state), 1.0) > 1e-3

    @pytest.mark.parametrize("beta", [1.0, 2 * np.pi, 0.3])
    def test_gibbs_state(self, beta, tol):
        h = np.diag([0.0, 1.0, 2.5]).astype(complex)
        state = gibbs_state(full_matrix_algebra(3), h, beta)
        assert kms_residual(state, h, beta) <= tol
        assert invariance_residual(state, h) <= tol

    def test_tracial_state_is_kms_for_zero(self, tol):
        state = tracial_state(full_matrix_algebra(3))
        assert kms_residual(state, np.zeros((3, 3)), 5.0) <= tol

    def test_overflow_guard(self, skewed_state):
        with pytest.raises(KMSOverflowError):
            kms_residual(skewed_state, np.diag([0.0, 2000.0]), 1.0)

    def test_non_hermitian_generator(self, skewed_state):
        with pytest.raises(ValueError):
            kms_residual(skewed_state, np.array([[0, 1], [0, 0]]), 1.0)


class TestTakesaki:
    """Tests for the modular constraint"""

    def test_documented_failure(self, skewed_state, x_algebra):
        assert takesaki_check(skewed_state, x_algebra) > 0.1

    def test_tracial_prior_passes(self, x_algebra, tol):
        assert takesaki_check(tracial_state(full_matrix_algebra(2)), x_algebra) <= tol

    def test_commuting_subalgebra_passes(self, skewed_state, tol):
        assert takesaki_check(skewed_state, diagonal_algebra(2)) <= tol

    def test_product_state_preserves_tensor_factor(self, density_factory, tol):
        rho = np.kron(density_factory(2), density_factory(2))
        state = AlgState(full_matrix_algebra(4), rho)
        assert takesaki_check(state, tensor_factor(2, 2, 0)) <= tol


class TestConditionalExpectation:
    """Tests for the state-preserving conditional expectation"""

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_tracial_prior_admits_expectation(self, n, rng, tol):
        state = tracial_state(full_matrix_algebra(n))
        for _ in range(4):
            sub = random_subalgebra(n, rng)
            ce = conditional_expectation(state, sub, tol, rng)
            assert max(ce.residuals.values()) <= tol

    def test_expectation_onto_commutant_of_state(self, skewed_state, tol):
        ce = conditional_expectation(skewed_state, diagonal_algebra(2), tol)
        assert np.allclose(ce(PAULI_X), np.zeros((2, 2)), atol=tol)
        assert np.allclose(ce(PAULI_Z), PAULI_Z, atol=tol)

    def test_gate_raises(self, skewed_state, x_algebra, tol):
        with pytest.raises(ModularViolation) as info:
            conditional_expectation(skewed_state, x_algebra, tol)
        assert info.value.residual > 0.1

    def test_unchecked_projection_breaks_an_axiom(self, skewed_state, x_algebra, tol):
        residuals = ce_property_residuals(gns_projection(skewed_state, x_algebra))
        assert residuals["state_preserving"] <= tol
        assert max(residuals["module"], residuals["positivity"]) > tol
