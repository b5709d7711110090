import unittest

import numpy as np
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from ncsym.algebra import grassmann_algebra, matrix_algebra
from ncsym.calculus import AlgebraIsomorphism
from ncsym.states import (
    PObVM,
    StateError,
    cc_check,
    gns,
    make_state,
    tracial_state,
    transform_state,
    transition_probability,
    vector_state,
)
from ncsym.symplectic import quantum_form

M2 = matrix_algebra(2)
M3 = matrix_algebra(3)
M11 = matrix_algebra(2, grading=(1, 1))
G2 = grassmann_algebra(2)

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


class StateBasicsTest(unittest.TestCase):
    def test_density_state_expectations(self):
        rho = np.diag([0.7, 0.3])
        phi = make_state(M2, "densityMatrix", rho)
        sz = M2.element([1, 0, 0, -1])
        self.assertAlmostEqual(phi.expectation(sz).real, 0.4, places=12)
        self.assertAlmostEqual(phi.expectation(M2.unit).real, 1.0, places=12)
        back = phi.density_matrix()
        self.assertLess(np.abs(back - rho).max(), 1e-12)

    def test_mixed_state_not_pure(self):
        self.assertTrue(vector_state(M2, KET0).is_pure())
        self.assertFalse(tracial_state(M2).is_pure())

    def test_negative_density_rejected(self):
        with self.assertRaises(StateError):
            make_state(M2, "densityMatrix", np.diag([1.5, -0.5]))

    def test_unnormalized_rejected(self):
        with self.assertRaises(StateError):
            make_state(M2, "densityMatrix", np.diag([0.7, 0.7]))

    def test_nonpositive_functional_rejected(self):
        # phi(A) = Tr(diag(1.5, -0.5) A) is normalized and hermitian but
        # fails positivity; the Gram check must produce a witness
        f = np.array([1.5, 0, 0, -0.5], dtype=complex)
        with self.assertRaisesRegex(StateError, "not positive"):
            make_state(M2, "functional", f)

    def test_odd_support_rejected(self):
        f = np.array([1.0, 0.2, 0.2, 0.0], dtype=complex)
        with self.assertRaisesRegex(StateError, "odd"):
            make_state(M11, "functional", f)

    def test_transition_probabilities(self):
        s0 = vector_state(M2, KET0)
        s1 = vector_state(M2, KET1)
        sp = vector_state(M2, PLUS)
        self.assertAlmostEqual(transition_probability(s0, s1), 0.0, places=12)
        self.assertAlmostEqual(transition_probability(s0, sp), 0.5, places=12)
        self.assertAlmostEqual(transition_probability(s0, s0), 1.0, places=12)

    @settings(max_examples=25, deadline=None)
    @seed(3)
    @given(st.integers(0, 2**32 - 1))
    def test_transition_symmetric_unit_interval(self, s):
        rng = np.random.default_rng(s)
        v1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        s1, s2 = vector_state(M2, v1), vector_state(M2, v2)
        w12 = transition_probability(s1, s2)
        w21 = transition_probability(s2, s1)
        self.assertAlmostEqual(w12, w21, places=10)
        self.assertGreaterEqual(w12, -1e-12)
        self.assertLessEqual(w12, 1.0 + 1e-12)


class BerezinStateTest(unittest.TestCase):
    def test_g2_density(self):
        # rho = theta2 theta1 integrates to one and kills everything else
        rho = G2.element([0, 0, 0, -1.0])
        phi = make_state(G2, "berezinDensity", rho)
        self.assertAlmostEqual(phi.expectation(G2.unit).real, 1.0, places=12)
        self.assertAlmostEqual(abs(phi.expectation(G2.basis_element(3))), 0.0)

    def test_g2_gns_is_one_dimensional(self):
        rho = G2.element([0, 0, 0, -1.0])
        phi = make_state(G2, "berezinDensity", rho)
        res = gns(G2, phi)
        self.assertEqual(res.dimension, 1)
        self.assertEqual(res.null_space_dimension, 3)
        self.assertTrue(res.irreducible)

    def test_unnormalized_density_rejected(self):
        with self.assertRaises(StateError):
            make_state(G2, "berezinDensity", G2.element([0, 0, 0, 1.0]))


class TransformTest(unittest.TestCase):
    def test_isomorphism_transport(self):
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        iso = AlgebraIsomorphism.unitary_conjugation(M2, h)
        phi = vector_state(M2, KET0)
        moved = transform_state(phi, iso=iso)
        sx = M2.element([0, 1, 1, 0])
        self.assertAlmostEqual(moved.expectation(sx).real, 1.0, places=12)
        rho = moved.density_matrix()
        self.assertLess(np.abs(rho - np.full((2, 2), 0.5)).max(), 1e-12)

    def test_infinitesimal_generator_transport(self):
        ss = quantum_form(M2, 1.0)
        phi = vector_state(M2, PLUS)
        eps = 1e-3
        sz = M2.element([1, 0, 0, -1])
        sy = M2.element([0, -1j, 1j, 0])
        moved = transform_state(phi, generator=(ss, sz, eps), validate=False)
        # first-order rotation about z: <sy> grows like 2 eps <sx>
        self.assertAlmostEqual(moved.expectation(sy).real, 2 * eps, places=9)


class PObVMTest(unittest.TestCase):
    def setUp(self):
        eye = M2.unit
        sz = M2.element([1, 0, 0, -1])
        self.measure = PObVM(M2, {"up": 0.5 * (eye + sz), "down": 0.5 * (eye - sz)})

    def test_probabilities(self):
        phi = vector_state(M2, PLUS)
        self.assertAlmostEqual(self.measure.probability(phi, "up"), 0.5, places=12)
        self.assertAlmostEqual(self.measure.probability(phi, "down"), 0.5, places=12)
        self.assertAlmostEqual(
            self.measure.probability(phi, ["up", "down"]), 1.0, places=12
        )

    def test_incomplete_effects_rejected(self):
        sz = M2.element([1, 0, 0, -1])
        with self.assertRaisesRegex(StateError, "resolve"):
            PObVM(M2, {"up": 0.5 * (M2.unit + sz)})


class SeparationTest(unittest.TestCase):
    def test_full_matrix_algebra_separates(self):
        out = cc_check(M2, "full", "full", rng=np.random.default_rng(11))
        self.assertTrue(out["verdict"])
        self.assertEqual(out["mode"], "constructive")

    def test_single_state_fails_to_separate(self):
        # one state cannot tell two observables with equal expectation apart
        rho = G2.element([0, 0, 0, -1.0])
        phi = make_state(G2, "berezinDensity", rho)
        a = G2.unit + G2.basis_element(3)
        b = G2.unit + 2.0 * G2.basis_element(3)
        out = cc_check(G2, [a, b], [phi])
        self.assertFalse(out["verdict"])
        self.assertEqual(out["clause"], "statesSeparateObservables")
        self.assertEqual(out["witness"], {"observables": [0, 1]})


class GnsTest(unittest.TestCase):
    def test_vector_state_gives_defining_rep(self):
        for alg, n in ((M2, 2), (M3, 3)):
            psi = np.zeros(n)
            psi[0] = 1.0
            res = gns(alg, vector_state(alg, psi))
            self.assertEqual(res.dimension, n)
            self.assertEqual(res.null_space_dimension, n * (n - 1))
            self.assertTrue(res.irreducible)
            self.assertEqual(res.commutant_dimension, 1)
            self.assertLess(res.reproduction_residual, 1e-10)
            self.assertLess(res.homomorphism_residual, 1e-10)
            self.assertLess(res.star_residual, 1e-10)

    def test_tracial_state_gives_square_rep(self):
        res = gns(M2, tracial_state(M2))
        self.assertEqual(res.dimension, 4)
        self.assertEqual(res.null_space_dimension, 0)
        self.assertFalse(res.irreducible)
        self.assertEqual(res.commutant_dimension, 4)
        self.assertLess(res.reproduction_residual, 1e-10)

    def test_cyclic_vector_norm(self):
        res = gns(M2, vector_state(M2, KET0))
        self.assertAlmostEqual(np.linalg.norm(res.cyclic_vector), 1.0, places=12)


if __name__ == "__main__":
    unittest.main()
