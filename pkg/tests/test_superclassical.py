import numpy as np
import pytest

from ncsym.algebra import grassmann_algebra, grassmann_derivative_matrices
from ncsym.calculus import Derivation, check_superderivation
from ncsym.coupling import grassmann_classical_factor
from ncsym.states import berezin_integral_coeffs
from ncsym.superclassical import (
    SuperFunction,
    SuperPBMatrix,
    SuperspaceError,
    berezin_expectation,
    berezin_integral,
    element_from_superfunction,
    even_derivative,
    g3_unique_state,
    hamilton_rk4,
    odd_derivative_left,
    odd_derivative_right,
    super_poisson,
    superfunction_from_element,
    variables,
)

G3 = grassmann_algebra(3)


def random_superfunction(rng, m, n, parity=None, max_exp=2):
    terms = {}
    for _ in range(6):
        exps = tuple(int(e) for e in rng.integers(0, max_exp + 1, size=m))
        mask = int(rng.integers(0, 1 << n))
        if parity is not None and bin(mask).count("1") % 2 != parity:
            continue
        terms[(exps, mask)] = complex(rng.standard_normal(), rng.standard_normal())
    out = SuperFunction(m, n, terms)
    if parity is not None and not out.terms:
        base = ((0,) * m, (1 << parity) - 1 if parity else 0)
        out = SuperFunction(m, n, {base: 1.0})
    return out


def test_grassmann_sign_rules():
    _, (t1, t2, t3) = variables(0, 3)
    assert (t1 * t1).norm() == 0.0
    assert ((t1 * t2) + (t2 * t1)).norm() == 0.0
    prod = t1 * t2 * t3
    assert prod.coefficient((), 0b111) == 1.0
    rev = t3 * t2 * t1
    assert rev.coefficient((), 0b111) == -1.0


def test_even_variables_commute_with_everything():
    (x,), (t1,) = variables(1, 1)
    assert ((x * t1) - (t1 * x)).norm() == 0.0
    sq = x * x
    assert sq.coefficient((2,), 0) == 1.0
    assert even_derivative(sq, 0).coefficient((1,), 0) == 2.0


def test_left_right_derivative_relation():
    rng = np.random.default_rng(8)
    for parity in (0, 1):
        for _ in range(10):
            f = random_superfunction(rng, 2, 3, parity=parity)
            sign = -1.0 if parity == 0 else 1.0
            for a in range(3):
                lhs = odd_derivative_right(f, a)
                rhs = sign * odd_derivative_left(f, a)
                assert (lhs - rhs).norm() < 1e-12


def test_canonical_even_bracket():
    w = SuperPBMatrix.canonical_even(1)
    (q, p), _ = variables(2, 0)
    assert super_poisson(p, q, w).coefficient((0, 0), 0) == 1.0
    assert super_poisson(q, p, w).coefficient((0, 0), 0) == -1.0
    # {f, g} = d_p f d_q g - d_q f d_p g on a worked example
    f = q * q * p
    g = p * p
    out = super_poisson(f, g, w)
    expect = {((1, 2), 0): -4.0}  # -(d_q f)(d_p g) = -(2qp)(2p)
    assert (out - SuperFunction(2, 0, expect)).norm() < 1e-12


def test_unit_odd_bracket():
    w = SuperPBMatrix.unit_odd(2)
    _, (t1, t2) = variables(0, 2)
    assert super_poisson(t1, t1, w).coefficient((), 0) == -1.0
    assert super_poisson(t1, t2, w).norm() == 0.0


def test_mixed_bracket_axioms():
    w = SuperPBMatrix.direct(1, 2)
    rng = np.random.default_rng(21)
    for _ in range(15):
        pa, pb, pc = rng.integers(0, 2, size=3)
        f = random_superfunction(rng, 2, 2, parity=int(pa))
        g = random_superfunction(rng, 2, 2, parity=int(pb))
        h = random_superfunction(rng, 2, 2, parity=int(pc))
        eta = lambda s, t: -1.0 if (s and t) else 1.0
        anti = super_poisson(f, g, w) + eta(pa, pb) * super_poisson(g, f, w)
        assert anti.norm() < 1e-10
        leib = (
            super_poisson(f, g * h, w)
            - super_poisson(f, g, w) * h
            - eta(pa, pb) * (g * super_poisson(f, h, w))
        )
        assert leib.norm() < 1e-10
        jac = (
            eta(pa, pc) * super_poisson(f, super_poisson(g, h, w), w)
            + eta(pb, pa) * super_poisson(g, super_poisson(h, f, w), w)
            + eta(pc, pb) * super_poisson(h, super_poisson(f, g, w), w)
        )
        assert jac.norm() < 1e-10


def test_invalid_bracket_matrices_rejected():
    with pytest.raises(SuperspaceError):
        SuperPBMatrix(2, 0, np.eye(2))  # even block not antisymmetric
    with pytest.raises(SuperspaceError):
        SuperPBMatrix(0, 2, np.array([[0.0, 1.0], [-1.0, 0.0]]))


def test_berezin_values():
    _, (t1, t2, t3) = variables(0, 3)
    assert berezin_integral(t3 * t2 * t1).coefficient((), 0) == 1.0
    assert berezin_integral(t1 * t2 * t3).coefficient((), 0) == -1.0
    one = SuperFunction.scalar(0, 1, 1.0)
    th = SuperFunction.generator(0, 1, 0)
    assert berezin_integral(one).norm() == 0.0
    assert berezin_integral(th).coefficient((), 0) == 1.0


def test_berezin_matches_algebra_route():
    rng = np.random.default_rng(4)
    for _ in range(10):
        e = G3.sample_element(rng)
        f = superfunction_from_element(e)
        lhs = berezin_integral(f).coefficient((), 0)
        rhs = berezin_integral_coeffs(G3, e.coeffs)
        assert abs(lhs - rhs) < 1e-12
        back = element_from_superfunction(G3, f)
        assert np.abs(back.coeffs - e.coeffs).max() < 1e-12


def test_factor_bracket_matches_superspace_bracket():
    gcl = grassmann_classical_factor(2)
    w = SuperPBMatrix.unit_odd(2)
    rng = np.random.default_rng(13)
    for _ in range(10):
        a = gcl.algebra.sample_element(rng)
        b = gcl.algebra.sample_element(rng)
        lhs = gcl.poisson(a, b).coeffs
        sf = super_poisson(
            superfunction_from_element(a), superfunction_from_element(b), w
        )
        rhs = element_from_superfunction(gcl.algebra, sf).coeffs
        assert np.abs(lhs - rhs).max() < 1e-12


def test_harmonic_flow():
    w = SuperPBMatrix.canonical_even(1)
    (q, p), _ = variables(2, 0)
    h = 0.5 * (q * q + p * p)
    times = np.linspace(0.0, 10.0, 21)
    traj = hamilton_rk4(h, w, [1.0, 0.0], times)
    for row, t in zip(traj, times):
        assert abs(row[0] - np.cos(t)) < 1e-6
        assert abs(row[1] + np.sin(t)) < 1e-6
        energy = 0.5 * (row[0] ** 2 + row[1] ** 2)
        assert abs(energy - 0.5) < 1e-8


def test_quartic_conservation():
    w = SuperPBMatrix.canonical_even(1)
    (q, p), _ = variables(2, 0)
    h = 0.5 * (p * p) + 0.25 * (q * q * q * q)
    times = np.linspace(0.0, 8.0, 9)
    traj = hamilton_rk4(h, w, [1.2, 0.3], times)
    e0 = h.evaluate(traj[0]).real
    for row in traj:
        assert abs(h.evaluate(row).real - e0) < 1e-8


def test_g3_state_is_unique():
    out = g3_unique_state()
    assert out["unique"]
    assert out["rejected"] == out["tried"]
    assert out["tried"]["grid"] > 0 and out["tried"]["random"] > 0
    phi = out["state"]
    expected = np.zeros(8)
    expected[0] = 1.0
    assert np.abs(phi.functional - expected).max() < 1e-12
    assert out["ccVerdict"] is False
    assert out["ccReport"]["clause"] == "statesSeparateObservables"


def test_berezin_expectation_on_g3_state():
    _, (t1, t2, t3) = variables(0, 3)
    rho = t3 * t2 * t1
    one = SuperFunction.scalar(0, 3, 1.0)
    assert abs(berezin_expectation(rho, one) - 1.0) < 1e-12
    assert abs(berezin_expectation(rho, t1 * t2)) < 1e-12


def test_vector_fields_are_superderivations():
    dl, _ = grassmann_derivative_matrices(G3)
    for a in range(3):
        ok, res = check_superderivation(G3, dl[a], 1)
        assert ok and res < 1e-12
    # theta1 d/dtheta2 is an even derivation
    even_field = G3.left_mult_matrix(G3.basis_element(1).coeffs) @ dl[1]
    ok, res = check_superderivation(G3, even_field, 0)
    assert ok and res < 1e-12
    # a second order operator is not a derivation
    ok, res = check_superderivation(G3, dl[0] @ dl[1], 0)
    assert not ok and res > 1e-2
