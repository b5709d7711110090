import numpy as np
import pytest
from scipy.linalg import expm

from ncsym.algebra import kron_element, matrix_algebra
from ncsym.calculus import check_superderivation, exterior_derivative, koszul_sign
from ncsym.coupling import (
    CouplingError,
    ProductStructure,
    coupled_evolution,
    evolve_functional,
    canonical_factor,
    grassmann_classical_factor,
    product_symplectic,
    quantum_factor,
)
from ncsym.symplectic import SymplecticStructure

M2 = matrix_algebra(2)
M3 = matrix_algebra(3)
SX = M2.element([0, 1, 1, 0])
SY = M2.element([0, -1j, 1j, 0])
SZ = M2.element([1, 0, 0, -1])

QM2 = quantum_factor(M2, 1.0)
GCL2 = grassmann_classical_factor(2)


def test_factor_lambda_values():
    assert abs(quantum_factor(M2, 0.5).lam - 0.5j) < 1e-12
    assert abs(canonical_factor(M2).lam - (-1.0)) < 1e-12
    assert abs(GCL2.lam) < 1e-12
    assert GCL2.commutative and not QM2.commutative
    assert QM2.fit_residual < 1e-12


def test_grassmann_factor_bracket_axioms():
    alg = GCL2.algebra
    rng = np.random.default_rng(7)
    for _ in range(20):
        pa, pb, pc = rng.integers(0, 2, size=3)
        a = alg.sample_element(rng, parity=int(pa))
        b = alg.sample_element(rng, parity=int(pb))
        c = alg.sample_element(rng, parity=int(pc))
        # graded antisymmetry
        anti = GCL2.poisson(a, b).coeffs + koszul_sign(pa, pb) * GCL2.poisson(b, a).coeffs
        assert np.abs(anti).max() < 1e-10
        # Leibniz in the second slot
        lhs = GCL2.poisson(a, b * c).coeffs
        rhs = (GCL2.poisson(a, b) * c).coeffs + koszul_sign(pa, pb) * (
            b * GCL2.poisson(a, c)
        ).coeffs
        assert np.abs(lhs - rhs).max() < 1e-10
        # graded Jacobi
        jac = (
            koszul_sign(pa, pc) * GCL2.poisson(a, GCL2.poisson(b, c)).coeffs
            + koszul_sign(pb, pa) * GCL2.poisson(b, GCL2.poisson(c, a)).coeffs
            + koszul_sign(pc, pb) * GCL2.poisson(c, GCL2.poisson(a, b)).coeffs
        )
        assert np.abs(jac).max() < 1e-10


def test_verdict_matrix():
    g1 = grassmann_classical_factor(2)
    g2 = grassmann_classical_factor(2)
    q_half = quantum_factor(M2, 0.5)
    q3_half = quantum_factor(M3, 0.5)
    q_other = quantum_factor(M2, 0.7)

    r = product_symplectic(g1, g2)
    assert r.verdict == "ExistsCommutative" and r.lam == 0

    r = product_symplectic(g1, q_half)
    assert r.verdict == "NoneExistsMixed" and r.lam is None
    assert product_symplectic(q_half, g1).verdict == "NoneExistsMixed"

    r = product_symplectic(q_half, q3_half)
    assert r.verdict == "ExistsQuantum"
    assert abs(r.lam - 0.5j) < 1e-12

    r = product_symplectic(q_half, q_other)
    assert r.verdict == "MismatchedParameters"
    assert abs(r.evidence["lambdaGap"] - 0.2) < 1e-12


def test_mixed_product_construction_rejected():
    with pytest.raises(CouplingError):
        ProductStructure(GCL2, QM2)


def test_product_poisson_equals_kron_commutator():
    prod = ProductStructure(QM2, QM2)
    alg = prod.algebra
    rng = np.random.default_rng(20250825)
    hbar = 1.0
    for _ in range(100):
        e = alg.sample_element(rng)
        f = alg.sample_element(rng)
        lhs = prod.poisson(e, f).coeffs
        rhs = (1j / hbar) * alg.supercommutator(e, f).coeffs
        assert np.abs(lhs - rhs).max() < 1e-12


def test_three_term_operator_route():
    prod = ProductStructure(QM2, QM2)
    alg = prod.algebra
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = M2.sample_element(rng)
        b = M2.sample_element(rng)
        yop = prod.hamiltonian_operator(a, b)
        h = kron_element(alg, a, b)
        e = alg.sample_element(rng)
        lhs = yop @ e.coeffs
        rhs = prod.poisson(h, e).coeffs
        assert np.abs(lhs - rhs).max() < 1e-12


def test_operator_is_derivation_and_perturbed_lambda_fails():
    prod = ProductStructure(QM2, QM2)
    yop = prod.hamiltonian_operator(SX, SY)
    ok, res = check_superderivation(prod.algebra, yop, 0)
    assert ok and res < 1e-10
    ya = QM2.structure.poisson_operator(SX)
    yb = QM2.structure.poisson_operator(SY)
    la = M2.left_mult_matrix(SX.coeffs)
    lb = M2.left_mult_matrix(SY.coeffs)
    bad = np.kron(ya, lb) + np.kron(la, yb) + (prod.lam + 0.1) * np.kron(ya, yb)
    ok_bad, res_bad = check_superderivation(prod.algebra, bad, 0)
    assert not ok_bad and res_bad > 1e-3


def test_product_form_is_symplectic():
    prod = ProductStructure(QM2, quantum_factor(M2, 1.0))
    assert prod.omega is not None
    # wrap: this enforces closedness, reality and family nondegeneracy
    ss = SymplecticStructure(
        prod.omega, {"kind": "quantum", "hbar": 1.0, "reality": "real"}
    )
    assert ss.closed_residual < 1e-10
    # mixed blocks vanish: factor-1 and factor-2 directions never pair
    m1 = len(QM2.family)
    assert np.abs(prod.omega.tensor[:m1, m1:]).max() == 0.0


def test_commutative_product_bracket_axioms():
    prod = ProductStructure(GCL2, grassmann_classical_factor(2))
    alg = prod.algebra
    assert exterior_derivative(prod.omega).norm() < 1e-12
    rng = np.random.default_rng(11)
    for _ in range(20):
        pa, pb, pc = rng.integers(0, 2, size=3)
        a = alg.sample_element(rng, parity=int(pa))
        b = alg.sample_element(rng, parity=int(pb))
        c = alg.sample_element(rng, parity=int(pc))
        anti = prod.poisson(a, b).coeffs + koszul_sign(pa, pb) * prod.poisson(b, a).coeffs
        assert np.abs(anti).max() < 1e-10
        lhs = prod.poisson(a, b * c).coeffs
        rhs = (prod.poisson(a, b) * c).coeffs + koszul_sign(pa, pb) * (
            b * prod.poisson(a, c)
        ).coeffs
        assert np.abs(lhs - rhs).max() < 1e-10
        jac = (
            koszul_sign(pa, pc) * prod.poisson(a, prod.poisson(b, c)).coeffs
            + koszul_sign(pb, pa) * prod.poisson(b, prod.poisson(c, a)).coeffs
            + koszul_sign(pc, pb) * prod.poisson(c, prod.poisson(a, b)).coeffs
        )
        assert np.abs(jac).max() < 1e-10


def test_coupled_oscillation_closed_form():
    hbar, g = 0.7, 0.3
    q = quantum_factor(M2, hbar)
    prod = ProductStructure(q, quantum_factor(M2, hbar))
    alg = prod.algebra
    h = g * kron_element(alg, SZ, SZ)
    e0 = kron_element(alg, SX, M2.unit)
    times = np.linspace(0.0, 5.0, 7)
    traj = coupled_evolution(prod, h, e0, times)
    sxi = kron_element(alg, SX, M2.unit).coeffs
    syz = kron_element(alg, SY, SZ).coeffs
    for row, t in zip(traj, times):
        w = 2.0 * g / hbar
        expected = np.cos(w * t) * sxi - np.sin(w * t) * syz
        assert np.abs(row - expected).max() < 1e-9
    rk = coupled_evolution(prod, h, e0, times, method="rk4")
    assert np.abs(rk - traj).max() < 1e-6


def test_coupled_oscillation_matches_matrix_conjugation():
    hbar, g = 0.7, 0.3
    prod = ProductStructure(quantum_factor(M2, hbar), quantum_factor(M2, hbar))
    alg = prod.algebra
    h = g * kron_element(alg, SZ, SZ)
    e0 = kron_element(alg, SX, M2.unit)
    hmat = alg.realize(h.coeffs)
    for t in (0.4, 1.3):
        row = coupled_evolution(prod, h, e0, [t])[0]
        u = expm(-1j * t * hmat / hbar)
        oracle = u.conj().T @ alg.realize(e0.coeffs) @ u
        assert np.abs(alg.realize(row) - oracle).max() < 1e-9


def test_functional_evolution_duality():
    hbar, g = 0.7, 0.3
    prod = ProductStructure(quantum_factor(M2, hbar), quantum_factor(M2, hbar))
    alg = prod.algebra
    h = g * kron_element(alg, SZ, SZ)
    rng = np.random.default_rng(3)
    e = alg.sample_element(rng)
    # a product state built from a density matrix on the 4x4 realization
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    phi = np.array([np.trace(rho @ alg.rep_basis[k]) for k in range(alg.dim)])
    t = 0.9
    lhs = evolve_functional(prod, h, phi, t) @ e.coeffs
    rhs = phi @ coupled_evolution(prod, h, e, [t])[0]
    assert abs(lhs - rhs) < 1e-10
    # Schroedinger picture oracle on the density matrix
    hmat = alg.realize(h.coeffs)
    u = expm(-1j * t * hmat / hbar)
    rho_t = u @ rho @ u.conj().T
    oracle = np.trace(rho_t @ alg.realize(e.coeffs))
    assert abs(lhs - oracle) < 1e-9
