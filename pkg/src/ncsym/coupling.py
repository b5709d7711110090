"""Coupling two mechanical systems on the graded tensor product algebra.

Each factor carries a bracket {,} and the compatibility question is whether
one product bracket restricts correctly to both factors.  The obstruction is
scalar: on each factor a least-squares fit of

    lam * {e_i, e_j} = -[e_i, e_j]        (over all basis pairs)

either succeeds with a factor constant lam (0 exactly when the factor is
supercommutative) or the factor is rejected outright.  A product bracket
exists precisely when the two constants agree:

* both zero            -> ExistsCommutative (ordinary product mechanics);
* exactly one zero     -> NoneExistsMixed (no consistent product bracket);
* equal and nonzero    -> ExistsQuantum, with the common lam reported
  (lam = i hbar for brackets of commutator type);
* nonzero and unequal  -> MismatchedParameters.

When the product exists the bracket on Kronecker basis pairs is

    {x (x) y, u (x) v} =
        (-1)**(e_y e_u) ( {x,u} (x) sym(y,v) + sym(x,u) (x) {y,v} )

with sym the graded symmetric product.  For commutator-type factors this is
equal to -[E, F]/lam on the product algebra, which tests exploit as an
independent route.  A second independent route is the operator form

    Y_{A (x) B} = Y_A (x) mu(B) + mu(A) (x) Y_B + lam Y_A (x) Y_B

(mu = left multiplication), valid verbatim for trivially graded factors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from ._linalg import max_abs
from .algebra import (
    Element,
    Superalgebra,
    grassmann_algebra,
    grassmann_derivative_matrices,
    tensor_algebra,
)
from .calculus import Cochain, Derivation, DerivationFamily
from .symplectic import SymplecticStructure, canonical_form, quantum_form

LAMBDA_FIT_TOL = 1e-9
PRODUCT_PB_TOL = 1e-10


class CouplingError(ValueError):
    pass


@dataclass
class FactorSpec:
    """One side of a coupling: an algebra with a bracket tensor.

    ``pb_tensor[i, j]`` holds the coefficients of {e_i, e_j}.  ``lam`` is the
    fitted proportionality constant against minus the supercommutator.
    """

    label: str
    algebra: Superalgebra
    pb_tensor: np.ndarray
    lam: complex
    fit_residual: float
    commutative: bool
    structure: SymplecticStructure | None = None
    family: DerivationFamily | None = None
    omega: Cochain | None = None

    def poisson(self, a: Element, b: Element) -> Element:
        c = np.einsum("i,j,ijk->k", a.coeffs, b.coeffs, self.pb_tensor)
        return Element(self.algebra, c)


def _pb_tensor_from_structure(ss: SymplecticStructure) -> np.ndarray:
    d = ss.algebra.dim
    t = np.zeros((d, d, d), dtype=complex)
    for i in range(d):
        lmat = ss.poisson_operator(ss.algebra.basis_element(i))
        t[i] = lmat.T
    return t


def _fit_lambda(
    alg: Superalgebra, pb: np.ndarray, tol: float = LAMBDA_FIT_TOL
) -> tuple[complex, float, bool]:
    """Least squares for lam {e_i,e_j} = -[e_i,e_j]; raises if the bracket
    is not proportional to the supercommutator at all."""
    d = alg.dim
    target = np.zeros_like(pb)
    for i in range(d):
        for j in range(d):
            target[i, j] = -alg.supercommutator(
                alg.basis_element(i), alg.basis_element(j)
            ).coeffs
    den = np.vdot(pb, pb).real
    if den < tol * tol:
        raise CouplingError("factor bracket vanishes identically")
    lam = complex(np.vdot(pb, target) / den)
    residual = float(max_abs(lam * pb - target))
    if residual > tol:
        raise CouplingError(
            f"factor bracket is not proportional to the supercommutator "
            f"(best fit lam = {lam:.6g}, residual {residual:.3e})"
        )
    commutative = bool(alg.is_supercommutative)
    if commutative and abs(lam) > tol:
        raise CouplingError("supercommutative factor fitted a nonzero lam")
    return lam, residual, commutative


def quantum_factor(alg: Superalgebra, hbar: float, label: str | None = None) -> FactorSpec:
    ss = quantum_form(alg, hbar)
    pb = _pb_tensor_from_structure(ss)
    lam, res, comm = _fit_lambda(alg, pb)
    return FactorSpec(
        label or f"quantum(hbar={hbar})",
        alg,
        pb,
        lam,
        res,
        comm,
        structure=ss,
        family=ss.family,
        omega=ss.omega,
    )


def canonical_factor(alg: Superalgebra, label: str | None = None) -> FactorSpec:
    ss = canonical_form(alg)
    pb = _pb_tensor_from_structure(ss)
    lam, res, comm = _fit_lambda(alg, pb)
    return FactorSpec(
        label or "canonical", alg, pb, lam, res, comm,
        structure=ss, family=ss.family, omega=ss.omega,
    )


def grassmann_classical_factor(n: int, label: str | None = None) -> FactorSpec:
    """A supercommutative factor: the Grassmann algebra on n generators with
    the odd canonical bracket {f, g} = -sum_a (right d_a f)(left d_a g),
    normalized so {theta_a, theta_b} = -delta_ab."""
    alg = grassmann_algebra(n)
    dim = alg.dim
    dl, dr = grassmann_derivative_matrices(alg)
    pb = np.zeros((dim, dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            acc = np.zeros(dim, dtype=complex)
            for a in range(n):
                acc -= alg.mul_coeffs(dr[a][:, i], dl[a][:, j])
            pb[i, j] = acc
    lam, res, comm = _fit_lambda(alg, pb)
    members = [Derivation(alg, m, 1) for m in dl]
    family = DerivationFamily(alg, members)
    w = np.zeros((n, n, dim), dtype=complex)
    for a in range(n):
        w[a, a] = -alg.unit_coeffs
    omega = Cochain(family, 2, 0, w)
    return FactorSpec(
        label or f"grassmannClassical({n})", alg, pb, lam, res, comm,
        family=family, omega=omega,
    )


# -- compatibility verdict ------------------------------------------------------


@dataclass
class CompatibilityReport:
    verdict: str
    lam: complex | None
    factor_lambdas: tuple
    factor_residuals: tuple
    evidence: dict = field(default_factory=dict)

    @property
    def exists(self) -> bool:
        return self.verdict.startswith("Exists")

    def to_json_dict(self) -> dict:
        lam = None if self.lam is None else [self.lam.real, self.lam.imag]
        return {
            "verdict": self.verdict,
            "lambda": lam,
            "factorLambdas": [[l.real, l.imag] for l in self.factor_lambdas],
            "factorResiduals": list(self.factor_residuals),
            "evidence": self.evidence,
        }


def product_symplectic(
    f1: FactorSpec, f2: FactorSpec, tol: float = LAMBDA_FIT_TOL
) -> CompatibilityReport:
    """Decide whether a product bracket exists and with which constant."""
    l1, l2 = f1.lam, f2.lam
    evidence = {
        "factorLabels": [f1.label, f2.label],
        "commutative": [f1.commutative, f2.commutative],
        "lambdaGap": abs(l1 - l2),
    }
    if f1.commutative and f2.commutative:
        return CompatibilityReport(
            "ExistsCommutative", 0.0 + 0.0j, (l1, l2),
            (f1.fit_residual, f2.fit_residual), evidence,
        )
    if f1.commutative != f2.commutative:
        # one factor forces lam = 0, the other forces lam != 0
        return CompatibilityReport(
            "NoneExistsMixed", None, (l1, l2),
            (f1.fit_residual, f2.fit_residual), evidence,
        )
    if abs(l1 - l2) <= tol:
        lam = 0.5 * (l1 + l2)
        return CompatibilityReport(
            "ExistsQuantum", lam, (l1, l2),
            (f1.fit_residual, f2.fit_residual), evidence,
        )
    return CompatibilityReport(
        "MismatchedParameters", None, (l1, l2),
        (f1.fit_residual, f2.fit_residual), evidence,
    )


# -- the product structure -------------------------------------------------------


class ProductStructure:
    """The coupled system on tensor_algebra(f1.algebra, f2.algebra)."""

    def __init__(self, f1: FactorSpec, f2: FactorSpec, tol: float = LAMBDA_FIT_TOL):
        report = product_symplectic(f1, f2, tol)
        if not report.exists:
            raise CouplingError(
                f"no product bracket for these factors: {report.verdict}"
            )
        self.f1 = f1
        self.f2 = f2
        self.report = report
        self.lam = report.lam
        self.algebra = tensor_algebra(f1.algebra, f2.algebra)
        self.pb_tensor = _product_pb_tensor(f1, f2)
        self.family = None
        self.omega = None
        if f1.family is not None and f2.family is not None:
            self.family, self.omega = _product_omega(self.algebra, f1, f2)

    def poisson(self, a: Element, b: Element) -> Element:
        c = np.einsum("i,j,ijk->k", a.coeffs, b.coeffs, self.pb_tensor)
        return Element(self.algebra, c)

    def poisson_operator(self, h: Element) -> np.ndarray:
        """Matrix of E -> {H, E} on product coefficients."""
        return np.einsum("a,abk->kb", h.coeffs, self.pb_tensor)

    def hamiltonian_operator(self, a: Element, b: Element) -> np.ndarray:
        """The three-term operator route for H = A (x) B.

        Only valid verbatim when both factors are trivially graded (the
        Koszul-free case); raises otherwise.
        """
        if np.any(self.f1.algebra.parity) or np.any(self.f2.algebra.parity):
            raise CouplingError(
                "operator form needs trivially graded factors"
            )
        if self.f1.structure is None or self.f2.structure is None:
            raise CouplingError("operator form needs symplectic factors")
        ya = self.f1.structure.poisson_operator(a)
        yb = self.f2.structure.poisson_operator(b)
        la = self.f1.algebra.left_mult_matrix(a.coeffs)
        lb = self.f2.algebra.left_mult_matrix(b.coeffs)
        return np.kron(ya, lb) + np.kron(la, yb) + self.lam * np.kron(ya, yb)


def _product_pb_tensor(f1: FactorSpec, f2: FactorSpec) -> np.ndarray:
    a1, a2 = f1.algebra, f2.algebra
    d1, d2 = a1.dim, a2.dim
    eta1 = np.where(
        (a1.parity[:, None] & a1.parity[None, :]).astype(bool), -1.0, 1.0
    )
    eta2 = np.where(
        (a2.parity[:, None] & a2.parity[None, :]).astype(bool), -1.0, 1.0
    )
    sym1 = 0.5 * (a1.structure + eta1[:, :, None] * a1.structure.transpose(1, 0, 2))
    sym2 = 0.5 * (a2.structure + eta2[:, :, None] * a2.structure.transpose(1, 0, 2))
    # Koszul prefactor for moving the second slot of the first pair past the
    # first slot of the second pair
    s = np.where(
        (a2.parity[:, None] & a1.parity[None, :]).astype(bool), -1.0, 1.0
    )
    t = np.einsum("jk,ikm,jln->ijklmn", s, f1.pb_tensor, sym2) + np.einsum(
        "jk,ikm,jln->ijklmn", s, sym1, f2.pb_tensor
    )
    d = d1 * d2
    return t.reshape(d, d, d)


def _product_omega(prod: Superalgebra, f1: FactorSpec, f2: FactorSpec):
    a1, a2 = f1.algebra, f2.algebra
    members: list[Derivation] = []
    for x in f1.family.members:
        members.append(Derivation(prod, np.kron(x.matrix, np.eye(a2.dim)), x.parity))
    for y in f2.family.members:
        signs = np.where(a1.parity.astype(bool), -1.0, 1.0) if y.parity else np.ones(a1.dim)
        members.append(Derivation(prod, np.kron(np.diag(signs), y.matrix), y.parity))
    family = DerivationFamily(prod, members)
    m1, m2 = len(f1.family), len(f2.family)
    w = np.zeros((m1 + m2, m1 + m2, prod.dim), dtype=complex)
    w1 = f1.omega.tensor
    w2 = f2.omega.tensor
    for i in range(m1):
        for j in range(m1):
            w[i, j] = np.kron(w1[i, j], a2.unit_coeffs)
    for i in range(m2):
        for j in range(m2):
            w[m1 + i, m1 + j] = np.kron(a1.unit_coeffs, w2[i, j])
    return family, Cochain(family, 2, 0, w)


# -- coupled dynamics ----------------------------------------------------------


def coupled_evolution(
    prod: ProductStructure,
    h: Element,
    observable: Element,
    times,
    method: str = "closedForm",
    steps: int = 400,
) -> np.ndarray:
    """Heisenberg trajectory dE/dt = {H, E} on the product algebra.

    Returns an array of coefficient vectors, one row per requested time.
    """
    if h.parity != 0:
        raise CouplingError("hamiltonian must be even")
    if max_abs(h.star().coeffs - h.coeffs) > 1e-9:
        raise CouplingError("hamiltonian must be hermitian")
    lmat = prod.poisson_operator(h)
    times = np.asarray(times, dtype=float)
    out = np.zeros((times.size, prod.algebra.dim), dtype=complex)
    if method == "closedForm":
        for r, t in enumerate(times):
            out[r] = expm(t * lmat) @ observable.coeffs
        return out
    if method == "rk4":
        order = np.argsort(times)
        t_now = 0.0
        y = observable.coeffs.astype(complex)
        for r in order:
            target = times[r]
            n = max(1, int(np.ceil(abs(target - t_now) * steps / max(1.0, abs(times).max()))))
            dt = (target - t_now) / n
            for _ in range(n):
                k1 = lmat @ y
                k2 = lmat @ (y + 0.5 * dt * k1)
                k3 = lmat @ (y + 0.5 * dt * k2)
                k4 = lmat @ (y + dt * k3)
                y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t_now = target
            out[r] = y
        return out
    raise CouplingError(f"unknown method {method!r}")


def evolve_functional(
    prod: ProductStructure, h: Element, functional: np.ndarray, t: float
) -> np.ndarray:
    """Dual trajectory on functionals: <phi(t), E> = <phi, E(t)>."""
    lmat = prod.poisson_operator(h)
    return expm(t * lmat).T @ np.asarray(functional, dtype=complex)
