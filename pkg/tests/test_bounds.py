import unittest

import ddt
import numpy as np
from basis_speed_limits import bounds
from basis_speed_limits import errors
from basis_speed_limits import linalg
from basis_speed_limits import models
from basis_speed_limits import states
from numpy import testing


def _random_state(rng: np.random.Generator, d: int) -> np.ndarray:
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


@ddt.ddt
class TestQubitBounds(unittest.TestCase):
    @ddt.data(
        ((0, 0, 1), (1, 0, 0), 1.0, np.pi / 4),
        ((0, 0, 1), (0, 0, -1), 1.0, np.pi / 2),
        ((0, 0, 1), (0, 1, 0), 2.0, np.pi / 8),
        ((0, 0, 0.5), (0, 0, 1), 1.0, 0.0),
    )
    def test_qubit_transition_bound(self, args):
        """Test the 'qubit_transition_bound' function."""
        r0, r1, energy, expected = args
        report = bounds.qubit_transition_bound(r0, r1, energy)
        self.assertAlmostEqual(report.bound_value, expected, places=12)
        self.assertEqual(report.kind, models.BoundKind.LOWER)
        self.assertEqual(report.tight, models.Tightness.TIGHT)

    def test_qubit_transition_bound_zero_vector(self):
        """Test that a vanishing Bloch vector is rejected."""
        with self.assertRaises(errors.ZeroBlochVectorError):
            bounds.qubit_transition_bound((0, 0, 0), (0, 0, 1), 1.0)

    def test_qubit_transition_bound_zero_energy(self):
        """Test that a vanishing mean energy is rejected."""
        with self.assertRaises(errors.ZeroDenominatorError):
            bounds.qubit_transition_bound((0, 0, 1), (1, 0, 0), 0.0)

    def test_transition_axis_parallel(self):
        """Test the axis chosen for parallel vectors."""
        testing.assert_allclose(bounds.transition_axis((0, 0, 1), (0, 0, 2)), [1, 0, 0])
        with self.assertRaises(errors.ParallelVectorsError):
            bounds.transition_axis((0, 0, 1), (0, 0, -1), allow_parallel=False)

    def test_optimal_qubit_hamiltonian(self):
        """Test that the optimal Hamiltonian reaches the target direction at the bound."""
        rng = np.random.default_rng(4)
        for _ in range(1000):
            r0, r1 = rng.normal(size=3), rng.normal(size=3)
            energy = rng.uniform(0.5, 2.0)
            h = bounds.optimal_qubit_hamiltonian(r0, r1, energy)
            self.assertAlmostEqual(bounds.mean_energy(h), energy, places=12)
            t = bounds.qubit_transition_bound(r0, r1, energy).bound_value
            psi0 = states.state_from_angles(
                np.arccos(r0[2] / np.linalg.norm(r0)), np.arctan2(r0[1], r0[0])
            )
            psi = linalg.mat_exp(h, t).matrix @ psi0
            r = np.array(states.bloch_from_state(states.pure_density(psi)))
            testing.assert_allclose(r, r1 / np.linalg.norm(r1), atol=1e-9)

    def test_mixed_qubit_bound(self):
        """Test that the trace form agrees with the Bloch vector form."""
        rng = np.random.default_rng(5)
        for _ in range(1000):
            r0 = rng.normal(size=3)
            r0 *= rng.uniform(0.1, 1) / np.linalg.norm(r0)
            r1 = rng.normal(size=3)
            r1 *= rng.uniform(0.1, 1) / np.linalg.norm(r1)
            mixed = bounds.mixed_qubit_bound(
                states.state_from_bloch(r0), states.state_from_bloch(r1), 1.0
            )
            self.assertAlmostEqual(
                mixed.bound_value,
                bounds.qubit_transition_bound(r0, r1, 1.0).bound_value,
                places=9,
            )

    def test_mixed_qubit_bound_maximally_mixed(self):
        """Test that the maximally mixed state is rejected."""
        with self.assertRaises(errors.MaximallyMixedInputError):
            bounds.mixed_qubit_bound(np.eye(2) / 2, states.pure_density([1, 0]), 1.0)


@ddt.ddt
class TestPureStateBound(unittest.TestCase):
    @ddt.data(
        ([1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)], np.pi / 4),
        ([1, 0], [0, 1], np.pi / 2),
        ([1, 0, 0], np.ones(3) / np.sqrt(3), np.arccos(-1 / 3) / 3),
        ([1, 0, 0], [1, 0, 0], 0.0),
    )
    def test_pure_state_bound(self, args):
        """Test the 'pure_state_bound' function."""
        psi0, psi1, expected = args
        report = bounds.pure_state_bound(psi0, psi1, 1.0)
        self.assertAlmostEqual(report.bound_value, expected, places=12)
        self.assertEqual(report.tight, models.Tightness.TIGHT)

    def test_pure_state_bound_gap(self):
        """Test the energy gap mode."""
        report = bounds.pure_state_bound([1, 0], [0, 1], 2.0, mode="gap")
        self.assertAlmostEqual(report.bound_value, np.pi / 2, places=12)
        self.assertEqual(report.tight, models.Tightness.UNKNOWN)

    def test_pure_state_bound_bad_mode(self):
        """Test that unknown modes are rejected."""
        with self.assertRaises(errors.BadKindError):
            bounds.pure_state_bound([1, 0], [0, 1], 1.0, mode="variance")

    def test_pure_state_bound_dim_mismatch(self):
        """Test that states of different dimensions are rejected."""
        with self.assertRaises(errors.DimMismatchError):
            bounds.pure_state_bound([1, 0], [1, 0, 0], 1.0)

    @ddt.data(2, 3, 5)
    def test_pure_state_hamiltonian(self, d):
        """Test that the projector Hamiltonian attains the bound between random states."""
        rng = np.random.default_rng(d)
        for _ in range(1000):
            psi0, psi1 = _random_state(rng, d), _random_state(rng, d)
            h = bounds.construct_optimal("pure_state", psi0=psi0, psi1=psi1)
            t = bounds.pure_state_time(psi0, psi1)
            self.assertAlmostEqual(abs(np.vdot(psi1, linalg.mat_exp(h, t).matrix @ psi0)), 1.0)
            report = bounds.pure_state_bound(psi0, psi1, bounds.mean_energy(h))
            self.assertAlmostEqual(report.bound_value, t, places=9)

    def test_fmin(self):
        """Test the smallest survival amplitude of a qubit Hamiltonian."""
        h = linalg.hermitian_eig(states.PAULI_Z)
        value, psi = bounds.fmin(h, np.pi / 4)
        self.assertAlmostEqual(value, np.sqrt(2) / 2, places=12)
        survival = abs(np.vdot(psi, linalg.mat_exp(h, np.pi / 4).matrix @ psi))
        self.assertAlmostEqual(survival, value, places=12)
        with self.assertRaises(errors.TimeOutOfRangeError):
            bounds.fmin(h, np.pi)


@ddt.ddt
class TestUnbiasedBounds(unittest.TestCase):
    @ddt.data(
        (2, 1.0, np.pi / 4, models.Tightness.TIGHT),
        (3, 1.0, 2 * np.pi / 9, models.Tightness.TIGHT),
        (4, 1.0, np.pi / 4, models.Tightness.TIGHT),
        (4, 2.0, np.pi / 8, models.Tightness.TIGHT),
        (5, 1.0, np.pi / 5, models.Tightness.NOT_TIGHT),
        (6, 1.0, np.arccos((4 - np.sqrt(6)) / 2) / 3, models.Tightness.UNKNOWN),
        (8, 1.0, 7 * np.pi / 32, models.Tightness.NOT_TIGHT),
    )
    def test_unbiased_bound(self, args):
        """Test the 'unbiased_bound' function."""
        d, energy, expected, tight = args
        report = bounds.unbiased_bound(d, energy)
        self.assertAlmostEqual(report.bound_value, expected, places=12)
        self.assertEqual(report.tight, tight)

    def test_unbiased_bound_bad_dimension(self):
        """Test that d < 2 is rejected."""
        with self.assertRaises(errors.BadDimensionError):
            bounds.unbiased_bound(1, 1.0)

    def test_general_unbiased_bound(self):
        """Test that the general bound lies below the dimension-specific ones."""
        for d in (2, 3, 4):
            self.assertLess(
                bounds.general_unbiased_bound(d, 1.0).bound_value,
                bounds.unbiased_bound(d, 1.0).bound_value,
            )
        self.assertAlmostEqual(bounds.general_unbiased_bound(4, 1.0).bound_value, 3 * np.pi / 16)

    def test_d6_refined_constant(self):
        """Test the six-dimensional constant."""
        self.assertAlmostEqual(bounds.d6_refined_constant(), 0.2279, places=4)

    def test_qutrit_tilde_bound(self):
        """Test the tilde bound is twice the plus bound."""
        report = bounds.qutrit_tilde_bound(1.0)
        self.assertAlmostEqual(report.bound_value, 4 * np.pi / 9, places=12)
        self.assertEqual(report.tight, models.Tightness.UNKNOWN)

    @ddt.data(0.5, 1.0, 3.0)
    def test_qutrit_tilde_bound_is_strictly_larger(self, energy):
        """Test that the tilde class needs strictly more time than the qutrit bound."""
        tilde = bounds.qutrit_tilde_bound(energy).bound_value
        plus = bounds.unbiased_bound(3, energy).bound_value
        self.assertGreater(tilde, plus)
        self.assertAlmostEqual(tilde / plus, 2.0, places=12)

    def test_nqubit_upper_bound(self):
        """Test the n-qubit upper bound and the non-interacting time."""
        report = bounds.nqubit_upper_bound(3, 1.0)
        self.assertEqual(report.kind, models.BoundKind.UPPER)
        self.assertAlmostEqual(report.bound_value, np.pi / 2, places=12)
        self.assertAlmostEqual(bounds.noninteracting_time(3, 1.0), 3 * np.pi / 4, places=12)
        self.assertIn(f"{3 * np.pi / 4:.17g}", report.note)

    @ddt.data(2, 3, 5, 8)
    def test_perm_bound(self, d):
        """Test the permutation bound and the eigenphase sum."""
        self.assertAlmostEqual(bounds.perm_bound(d, 1.0).bound_value, np.pi * (d - 1) / d)
        self.assertAlmostEqual(bounds.perm_eigenphase_sum(d), np.pi * (d - 1), places=9)


@ddt.ddt
class TestConstraint(unittest.TestCase):
    def test_constraint_check_qutrit(self):
        """Test the cosine sum of the optimal qutrit Hamiltonian."""
        h = bounds.construct_optimal("qutrit_plus")
        value, satisfied = bounds.constraint_check(h, 2 * np.pi / 3)
        self.assertAlmostEqual(value, 1.5, places=12)
        self.assertTrue(satisfied)

    def test_constraint_check_identity(self):
        """Test that zero time violates the constraint."""
        value, satisfied = bounds.constraint_check(bounds.construct_optimal("two_qubit"), 0.0)
        self.assertAlmostEqual(value, 4.0)
        self.assertFalse(satisfied)

    @ddt.data(
        ("qutrit_plus", 1),
        ("qutrit_tilde", 1),
        ("two_qubit", 1),
        ("nqubit_hadamard", 1),
        ("nqubit_hadamard", 3),
    )
    def test_constraint_check_saturating(self, args):
        """Test that every saturating pair satisfies the constraint."""
        kind, n = args
        h, t, _, _ = bounds.saturation_case(kind, n=n)
        self.assertTrue(bounds.constraint_check(h, t)[1])


@ddt.ddt
class TestSaturation(unittest.TestCase):
    @ddt.data(
        ("qutrit_plus", 1, 1 / 3, 2 * np.pi / 3),
        ("qutrit_tilde", 1, 2 / 3, 2 * np.pi / 3),
        ("two_qubit", 1, 1.0, np.pi / 4),
        ("nqubit_hadamard", 1, 1.0, np.pi / 2),
        ("nqubit_hadamard", 2, 1.0, np.pi / 2),
        ("nqubit_hadamard", 4, 1.0, np.pi / 2),
    )
    def test_saturation_case(self, args):
        """Test that each optimal Hamiltonian creates its target basis at the bound."""
        kind, n, energy, time = args
        h, t, src, dst = bounds.saturation_case(kind, n=n)
        self.assertAlmostEqual(bounds.mean_energy(h), energy, places=12)
        self.assertAlmostEqual(t, time, places=12)
        check = bounds.achieves_transform(h, t, src, dst)
        self.assertTrue(check.achieved, msg=f"{kind}: {check.max_column_error}")

    def test_two_qubit_phases(self):
        """Test the phases acquired by the two-qubit basis elements."""
        h, t, src, dst = bounds.saturation_case("two_qubit")
        testing.assert_allclose(h.eigenvalues, [-1, -1, -1, 3], atol=1e-12)
        check = bounds.achieves_transform(h, t, src, dst)
        testing.assert_allclose(
            np.exp(1j * check.recovered_phases), np.exp(1j * np.pi / 4) * np.ones(4), atol=1e-9
        )

    def test_achieves_transform_too_early(self):
        """Test that the target is not reached before the bound."""
        h, t, src, dst = bounds.saturation_case("qutrit_plus")
        self.assertFalse(bounds.achieves_transform(h, t / 2, src, dst).achieved)

    def test_achieves_transform_dim_mismatch(self):
        """Test that mismatched dimensions are rejected."""
        h, t, src, _ = bounds.saturation_case("qutrit_plus")
        with self.assertRaises(errors.DimMismatchError):
            bounds.achieves_transform(h, t, src, states.standard_basis("computational", 2))

    def test_construct_optimal_bad_kind(self):
        """Test that unknown kinds and missing states are rejected."""
        with self.assertRaises(errors.BadKindError):
            bounds.construct_optimal("qutrit_star")
        with self.assertRaises(errors.BadKindError):
            bounds.construct_optimal("pure_state", psi0=[1, 0])


class TestConjugateHamiltonian(unittest.TestCase):
    def test_conjugate_hamiltonian(self):
        """Test that rotated Hamiltonians reach the rotated basis with the same energy."""
        rng = np.random.default_rng(6)
        for kind in ("qutrit_plus", "qutrit_tilde", "two_qubit"):
            h, t, src, dst = bounds.saturation_case(kind)
            v = np.exp(1j * rng.uniform(0, 2 * np.pi, h.dim))
            rotated = bounds.conjugate_hamiltonian(h, np.diag(v))
            self.assertAlmostEqual(bounds.mean_energy(rotated), bounds.mean_energy(h), places=12)
            target = models.OrderedBasis(columns=v[:, None] * dst.columns)
            self.assertTrue(bounds.achieves_transform(rotated, t, src, target).achieved)

    def test_conjugate_hamiltonian_invalid(self):
        """Test that non-diagonal or non-unitary rotations are rejected."""
        h = bounds.construct_optimal("two_qubit")
        with self.assertRaises(errors.NotDiagonalUnitaryError):
            bounds.conjugate_hamiltonian(h, np.ones((4, 4)))
        with self.assertRaises(errors.NotDiagonalUnitaryError):
            bounds.conjugate_hamiltonian(h, [1, 1, 1, 2])
        with self.assertRaises(errors.NotDiagonalUnitaryError):
            bounds.conjugate_hamiltonian(h, [1, 1, 1])


class TestFidelity(unittest.TestCase):
    def test_state_fidelity_pure(self):
        """Test that the fidelity of pure states is the overlap modulus."""
        rho = states.pure_density([1, 0])
        sigma = states.pure_density(np.ones(2) / np.sqrt(2))
        self.assertAlmostEqual(bounds.state_fidelity(rho, sigma), 1 / np.sqrt(2), places=9)
        self.assertAlmostEqual(bounds.state_fidelity(rho, rho), 1.0, places=9)

    def test_reference_mixed_bound(self):
        """Test the mixed-state bound on a qubit rotation."""
        h = bounds.qubit_hamiltonian((0, 1, 0), 1.0)
        rho = states.pure_density([1, 0])
        sigma = states.pure_density(np.ones(2) / np.sqrt(2))
        self.assertAlmostEqual(bounds.reference_mixed_bound(rho, sigma, h), np.pi / 4, places=7)

    def test_reference_mixed_bound_stationary(self):
        """Test that an eigenstate has no energy spread."""
        h = bounds.qubit_hamiltonian((0, 0, 1), 1.0)
        rho = states.pure_density([1, 0])
        with self.assertRaises(errors.ZeroDenominatorError):
            bounds.reference_mixed_bound(rho, rho, h)

    def test_fidelity_curve(self):
        """Test the survival probability of |0> under the optimal qutrit Hamiltonian."""
        t = np.linspace(0, 2 * np.pi, 50)
        testing.assert_allclose(bounds.fidelity_curve(t), (5 + 4 * np.cos(t)) / 9, atol=1e-12)
        self.assertAlmostEqual(float(bounds.fidelity_curve([2 * np.pi / 3])[0]), 1 / 3)


if __name__ == "__main__":
    unittest.main()
