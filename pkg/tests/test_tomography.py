"""Linear-inversion tomography baseline."""

import math

import numpy as np
import pytest

from modval.hilbert import PureState
from modval.presets import phase_bell
from modval.tomography import (
    DensityMatrix,
    fidelity_pure,
    fidelity_states,
    linear_inversion,
    pauli_expectations,
    tomography_settings,
)
from tests.conftest import random_state


class TestSettings:
    def test_sixteen_observables(self):
        assert len(tomography_settings()) == 16

    def test_contains_identity(self):
        assert any(np.allclose(obs.mat, np.eye(4)) for obs in tomography_settings())

    def test_hermitian_and_unitary(self):
        for obs in tomography_settings():
            np.testing.assert_allclose(obs.mat, obs.mat.conj().T, atol=1e-15)
            np.testing.assert_allclose(obs.mat @ obs.mat, np.eye(4), atol=1e-15)


class TestLinearInversion:
    def test_computational_basis_state(self):
        rho = linear_inversion(pauli_expectations(PureState((2, 2), [1, 0, 0, 0])))
        np.testing.assert_allclose(rho.mat, np.diag([1, 0, 0, 0]), atol=1e-14)
        assert rho.positive

    def test_correlated_state_corners(self):
        # outer-product oracle for the maximally correlated state
        bell = phase_bell(0.0)
        expected = np.outer(bell.amps, bell.amps.conj())
        rho = linear_inversion(pauli_expectations(bell))
        np.testing.assert_allclose(rho.mat, expected, atol=1e-14)

    def test_noisy_input_flags_negativity(self):
        values = pauli_expectations(phase_bell(0.0))
        values[1:] = values[1:] + 0.05
        rho = linear_inversion(values)
        assert not rho.positive
        assert rho.min_eigenvalue < 0
        assert abs(np.trace(rho.mat).real - 1.0) <= 1e-12

    def test_random_pure_states_round_trip(self, rng):
        for _ in range(25):
            psi = random_state(rng)
            rho = linear_inversion(pauli_expectations(psi))
            np.testing.assert_allclose(rho.mat, np.outer(psi.amps, psi.amps.conj()),
                                       atol=1e-12)

    def test_identity_expectation_checked(self):
        values = pauli_expectations(phase_bell(0.0))
        values[0] = 0.9
        with pytest.raises(ValueError, match="identity"):
            linear_inversion(values)

    def test_length_checked(self):
        with pytest.raises(ValueError, match="16"):
            linear_inversion(np.ones(15))


class TestFidelity:
    def test_pure_projector_fidelity(self):
        state = PureState((2, 2), [1, 0, 0, 0])
        rho = linear_inversion(pauli_expectations(state))
        assert abs(fidelity_pure(rho, state) - 1.0) <= 1e-12

    def test_orthogonal_states(self):
        a = PureState((2, 2), [1, 0, 0, 0])
        b = PureState((2, 2), [0, 0, 0, 1])
        assert fidelity_states(a, b) == 0

    def test_symmetric_and_phase_invariant(self, rng):
        for _ in range(10):
            a, b = random_state(rng), random_state(rng)
            assert abs(fidelity_states(a, b) - fidelity_states(b, a)) <= 1e-12
            rotated = PureState((2, 2), np.exp(1j * rng.uniform(0, 2 * math.pi)) * a.amps)
            assert abs(fidelity_states(a, b) - fidelity_states(rotated, b)) <= 1e-12

    def test_direct_vs_tomography_on_exact_inputs(self):
        from modval.presets import uniform_plus
        from modval.protocol import ProtocolConfig
        from modval.reconstruction import reconstruct_state

        truth = phase_bell(0.0)
        cfg = ProtocolConfig(system_state=truth, postselection=uniform_plus())
        direct = reconstruct_state(cfg, "exact_inversion").state()
        rho = linear_inversion(pauli_expectations(truth))
        assert abs(fidelity_pure(rho, direct) - 1.0) <= 1e-10


class TestDensityMatrixValidation:
    def test_hermiticity_required(self):
        mat = np.diag([1.0, 0, 0, 0]).astype(complex)
        mat[0, 1] = 0.5
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(mat, 0.0, True)

    def test_trace_required(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(4, dtype=complex), 0.25, True)
