"""Symplectic structures, Poisson brackets and Hamiltonian dynamics.

A symplectic structure here is a closed, nondegenerate, even 2-cochain over
a bracket-closed derivation family.  Nondegeneracy is meant relative to the
family: the pairing Y -> i_Y omega must be injective on the family span and
onto the differentials, which is what the Hamiltonian solve needs.

The two stock structures on a 'special' algebra (trivial graded center, all
superderivations inner):

* the commutator form  omega_c(D_A, D_B) = [A, B], which is closed and
  imaginary (omega* = -omega) and gives Poisson bracket {A, B} = [A, B];
* the quantum form  omega_q = (-i hbar) omega_c, which is real and gives
  {A, B} = (-i hbar)**-1 [A, B] = (i/hbar) [A, B].

Dynamics: dA/dt = {H, A} with hermitian even H; in closed form
A(t) = expm(t L_H) A with L_H the Poisson operator of H, equivalently
A(t) = exp(iHt/hbar) A exp(-iHt/hbar) in a matrix realization.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from ._linalg import max_abs, numerical_rank
from .algebra import Element, Superalgebra
from .calculus import (
    Cochain,
    Derivation,
    DerivationFamily,
    differential,
    exterior_derivative,
    is_special,
)

CLOSED_TOL = 1e-10
REALITY_TOL = 1e-10
# Residual gate for solving i_Y omega = -dA.
HAMILTONIAN_SOLVE_TOL = 1e-9


class SymplecticError(ValueError):
    pass


class SymplecticStructure:
    """An even, closed, family-nondegenerate 2-cochain with solve machinery.

    ``kind`` records how the form was built: {"kind": "canonical" | "quantum"
    | "custom", "hbar": float | None, "reality": "real" | "imaginary"}.
    The declared reality is enforced at construction.
    """

    def __init__(
        self,
        omega: Cochain,
        kind: dict | None = None,
        check: bool = True,
    ) -> None:
        if omega.degree != 2 or omega.parity != 0:
            raise SymplecticError("symplectic form must be an even 2-cochain")
        self.omega = omega
        self.family = omega.family
        self.algebra = omega.family.algebra
        self.kind = dict(kind or {"kind": "custom", "hbar": None})
        m = len(self.family)
        dim = self.algebra.dim
        self._pairing = omega.tensor.reshape(m, m * dim)
        self.closed_residual = None
        self.reality_residuals = omega.reality_residuals()
        if check:
            self.closed_residual = exterior_derivative(omega).norm()
            if self.closed_residual > CLOSED_TOL:
                raise SymplecticError(
                    f"form is not closed, |d omega| = {self.closed_residual:.3e}"
                )
            declared = self.kind.get("reality")
            if declared is not None:
                defect = self.reality_residuals[declared]
                if defect > REALITY_TOL:
                    raise SymplecticError(
                        f"form is not {declared} (defect {defect:.3e})"
                    )
            if numerical_rank(self._pairing) != m:
                raise SymplecticError("form is degenerate on the family")
        # per-parity solvers for i_Y omega = -dA (Y has the parity of A since
        # the form is even)
        self._solvers: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for t in (0, 1):
            cols = np.flatnonzero(self.family.parities == t)
            if cols.size:
                block = self._pairing[cols]
                self._solvers[t] = (cols, np.linalg.pinv(block.T))

    # -- hamiltonian derivations and brackets --------------------------------

    def hamiltonian_coeffs(self, a: Element) -> np.ndarray:
        """Family coefficients of Y_A solving i_{Y_A} omega = -dA for
        homogeneous A; raises when the solve does not close."""
        par = a.parity
        if par is None:
            raise SymplecticError("need a homogeneous element")
        rhs = -differential(self.family, a).tensor.reshape(-1)
        if par not in self._solvers:
            if max_abs(rhs) <= HAMILTONIAN_SOLVE_TOL:
                return np.zeros(len(self.family), dtype=complex)
            raise SymplecticError("no family directions of the required parity")
        cols, pinv = self._solvers[par]
        y = pinv @ rhs
        res = max_abs(self._pairing[cols].T @ y - rhs)
        if res > HAMILTONIAN_SOLVE_TOL:
            raise SymplecticError(
                f"hamiltonian solve failed, residual {res:.3e}"
            )
        full = np.zeros(len(self.family), dtype=complex)
        full[cols] = y
        return full

    def hamiltonian_derivation(self, a: Element) -> Derivation:
        par = a.parity
        if par is None:
            raise SymplecticError("need a homogeneous element")
        return self.family.combination(self.hamiltonian_coeffs(a), par)

    def poisson(self, a: Element, b: Element) -> Element:
        """{A, B} = Y_A(B), extended bilinearly over parity parts of A."""
        out = np.zeros(self.algebra.dim, dtype=complex)
        for t in (0, 1):
            part = a.graded_part(t)
            if max_abs(part.coeffs) == 0.0:
                continue
            out = out + self.hamiltonian_derivation(part).matrix @ b.coeffs
        return Element(self.algebra, out)

    def poisson_operator(self, h: Element) -> np.ndarray:
        """Matrix of B -> {H, B} (sum over parity parts of H)."""
        out = np.zeros((self.algebra.dim, self.algebra.dim), dtype=complex)
        for t in (0, 1):
            part = h.graded_part(t)
            if max_abs(part.coeffs) == 0.0:
                continue
            out = out + self.hamiltonian_derivation(part).matrix
        return out

    def canonical_pair_residual(self, a: Element, b: Element) -> float:
        """How far {A, B} is from the unit."""
        pb = self.poisson(a, b)
        return max_abs(pb.coeffs - self.algebra.unit_coeffs)

    def is_canonical_pair(self, a: Element, b: Element, tol: float = 1e-9) -> bool:
        return self.canonical_pair_residual(a, b) <= tol


def canonical_form(
    alg: Superalgebra, family: DerivationFamily | None = None
) -> SymplecticStructure:
    """The commutator 2-form omega(D_A, D_B) = [A, B] on a special algebra.

    Well defined because [A + z, B + w] = [A, B] for central shifts z, w, so
    the value depends only on the derivations.  Imaginary: omega* = -omega.
    """
    info = is_special(alg)
    if not info["special"]:
        raise SymplecticError(
            "algebra is not special (trivial graded center + all "
            f"superderivations inner); evidence: {info}"
        )
    fam = family if family is not None else DerivationFamily.inner_family(alg)
    for x in fam.members:
        if x.source is None:
            raise SymplecticError("canonical form needs an inner family")
    omega = Cochain.from_function(
        fam, 2, 0, lambda x, y: alg.supercommutator(x.source, y.source)
    )
    return SymplecticStructure(
        omega, {"kind": "canonical", "hbar": None, "reality": "imaginary"}
    )


def quantum_form(
    alg: Superalgebra,
    hbar: float,
    family: DerivationFamily | None = None,
) -> SymplecticStructure:
    """omega_q = (-i hbar) omega_c; real, with {A,B} = (i/hbar)[A, B]."""
    if hbar <= 0:
        raise SymplecticError("hbar must be positive")
    base = canonical_form(alg, family)
    omega = (-1j * hbar) * base.omega
    return SymplecticStructure(
        omega, {"kind": "quantum", "hbar": float(hbar), "reality": "real"}
    )


# -- dynamics ---------------------------------------------------------------------


class HamiltonianSystem:
    """A symplectic structure plus an even hermitian Hamiltonian."""

    def __init__(self, structure: SymplecticStructure, h: Element) -> None:
        self.structure = structure
        self.algebra = structure.algebra
        if h.algebra is not self.algebra:
            raise SymplecticError("hamiltonian lives in the wrong algebra")
        if h.parity != 0:
            raise SymplecticError("hamiltonian must be even")
        herm = max_abs(h.star().coeffs - h.coeffs)
        if herm > 1e-10:
            raise SymplecticError(f"hamiltonian is not hermitian ({herm:.3e})")
        self.h = h
        # spectrum information only exists in a matrix realization; finite
        # dimension makes 'bounded below' automatic, the value is recorded
        self.spectrum_min: float | None = None
        if self.algebra.rep_basis is not None:
            evals = np.linalg.eigvalsh(_hermitian_realization(h))
            self.spectrum_min = float(evals[0])
        self.liouville = structure.poisson_operator(h)

    def heisenberg_matrix(self, t: float) -> np.ndarray:
        """expm(t L_H) acting on observable coefficients."""
        return expm(t * self.liouville)

    def evolve_heisenberg(
        self,
        a: Element,
        t: float,
        method: str = "closedForm",
        step: float | None = None,
    ) -> Element:
        """Observable evolution dA/dt = {H, A}."""
        if method == "closedForm":
            return Element(self.algebra, self.heisenberg_matrix(t) @ a.coeffs)
        if method == "rk4":
            n = max(1, int(round(abs(t) / (step or abs(t) / 1000 or 1e-3))))
            dt = t / n
            y = a.coeffs.copy()
            lmat = self.liouville
            for _ in range(n):
                k1 = lmat @ y
                k2 = lmat @ (y + 0.5 * dt * k1)
                k3 = lmat @ (y + 0.5 * dt * k2)
                k4 = lmat @ (y + dt * k3)
                y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            return Element(self.algebra, y)
        raise SymplecticError(f"unknown method {method!r}")

    def evolve_functional(self, functional: np.ndarray, t: float) -> np.ndarray:
        """State evolution by duality: phi_t(A) = phi(A(t))."""
        return self.heisenberg_matrix(t).T @ np.asarray(functional, dtype=complex)

    def evolution_trace(self, a: Element, times) -> np.ndarray:
        """Rows of observable coefficients along the closed-form flow."""
        return np.array(
            [self.heisenberg_matrix(float(t)) @ a.coeffs for t in times]
        )


def _hermitian_realization(h: Element) -> np.ndarray:
    mat = h.realize()
    defect = max_abs(mat - mat.conj().T)
    if defect > 1e-8:
        # graded algebras realize hermitian odd parts non-hermitianly; only
        # the genuinely hermitian realization has a spectrum worth reporting
        raise SymplecticError("realization of H is not hermitian")
    return 0.5 * (mat + mat.conj().T)
