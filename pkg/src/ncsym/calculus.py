"""Superderivations, graded cochain calculus and algebra isomorphisms.

A derivation of parity r is a linear map X on the algebra with

    X(AB) = X(A) B + (-1)**(r e_A) A X(B)

stored as a matrix acting on coefficient vectors.  Cochains of degree p are
graded-alternating p-linear maps from derivations to the algebra; they are
represented densely by their values on every index tuple of a fixed
derivation family, a tensor of shape (m, .., m, dim).

Sign conventions (all checked by the test suite):

* permuting arguments:  omega(X_s(1), .., X_s(p)) picks up the permutation
  sign times (-1)**(e_j e_k) for every transposed pair of odd arguments;
  adjacent swaps of odd-odd pairs are therefore symmetric.
* wedge:  (a ^ b)(X_1..X_{p+q}) = 1/(p! q!) sum over all permutations of the
  graded permutation sign, an extra (-1)**(e_b * sum of the parities of the
  first p permuted arguments), and the product a(..) b(..).
* Lie derivative on forms:  (L_Y w)(X_1..X_p) = Y[w(X_1..X_p)] minus the sum
  of w evaluated with [Y, X_i] in slot i, each weighted by
  (-1)**(e_Y (e_w + e_X1 + .. + e_X(i-1))).
* interior product:  (i_X w)(X_1..X_{p-1}) = w(X, X_1, ..) with no sign.
* exterior derivative: the usual alternating-sum formula with graded weights
  a_i = e_Xi (e_w + sum of earlier argument parities) on the action terms and
  b_ij = e_Xj (parities strictly between i and j) on the bracket terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial

import numpy as np
from scipy.linalg import expm

from ._linalg import lstsq_with_residual, max_abs, numerical_rank
from .algebra import AlgebraError, Element, Superalgebra, koszul_sign

# Residual threshold for the superderivation (graded Leibniz) condition.
DERIVATION_TOL = 1e-10
# Threshold for a derivation family to count as closed under the bracket.
CLOSURE_TOL = 1e-10
# Gate for expanding a derivation over a family.
EXPAND_TOL = 1e-9


class CalculusError(ValueError):
    pass


# -- derivations -------------------------------------------------------------


@dataclass
class Derivation:
    """A parity-homogeneous superderivation as a matrix on coefficients."""

    algebra: Superalgebra
    matrix: np.ndarray
    parity: int
    source: Element | None = None  # set for inner derivations

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.algebra.dim, self.algebra.dim):
            raise CalculusError("derivation matrix has wrong shape")
        object.__setattr__(self, "matrix", m)
        self.parity = int(self.parity) % 2

    def __call__(self, a: Element) -> Element:
        return Element(self.algebra, self.matrix @ a.coeffs)

    def star(self) -> "Derivation":
        """The conjugate derivation A -> [X(A*)]*."""
        m = self.algebra.involution_matrix
        return Derivation(
            self.algebra, m @ np.conj(self.matrix) @ np.conj(m), self.parity
        )

    def __add__(self, other: "Derivation") -> "Derivation":
        if other.algebra is not self.algebra or other.parity != self.parity:
            raise CalculusError("can only add derivations of equal parity")
        src = None
        if self.source is not None and other.source is not None:
            src = self.source + other.source
        return Derivation(self.algebra, self.matrix + other.matrix, self.parity, src)

    def __mul__(self, scalar) -> "Derivation":
        src = None if self.source is None else complex(scalar) * self.source
        return Derivation(self.algebra, complex(scalar) * self.matrix, self.parity, src)

    __rmul__ = __mul__

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + (-1.0) * other


def check_superderivation(
    alg: Superalgebra, matrix: np.ndarray, parity: int, tol: float = DERIVATION_TOL
) -> tuple[bool, float]:
    """Check the graded Leibniz condition for an operator of declared parity.

    Returns (ok, residual).  The residual includes both the Leibniz defect
    X mu(A) - (-1)**(r e_A) mu(A) X - mu(X(A)) over all basis elements A and
    the grading defect (matrix entries that move between wrong parity
    sectors).
    """
    matrix = np.asarray(matrix, dtype=complex)
    r = int(parity) % 2
    worst = 0.0
    for j in range(alg.dim):
        lj = alg.structure[j].T  # left multiplication by e_j
        sign = koszul_sign(r, int(alg.parity[j]))
        lhs = matrix @ lj - sign * lj @ matrix
        rhs = alg.left_mult_matrix(matrix[:, j])
        worst = max(worst, max_abs(lhs - rhs))
    bad = (alg.parity[:, None] != (alg.parity[None, :] + r) % 2)
    worst = max(worst, max_abs(np.where(bad, matrix, 0.0)))
    return worst <= tol, worst


def inner_derivation(alg: Superalgebra, a: Element) -> Derivation:
    """The supercommutator map B -> [A, B] for homogeneous A."""
    par = a.parity
    if par is None:
        raise CalculusError("inner derivation needs a homogeneous element")
    left = alg.left_mult_matrix(a.coeffs)
    right = alg.right_mult_matrix(a.coeffs)
    signs = np.array([koszul_sign(par, int(p)) for p in alg.parity], dtype=complex)
    return Derivation(alg, left - right @ np.diag(signs), par, source=a)


def lie_bracket(x: Derivation, y: Derivation) -> Derivation:
    """Graded commutator [X, Y] = X Y - (-1)**(e_X e_Y) Y X."""
    if x.algebra is not y.algebra:
        raise CalculusError("derivations live on different algebras")
    sign = koszul_sign(x.parity, y.parity)
    mat = x.matrix @ y.matrix - sign * y.matrix @ x.matrix
    src = None
    if x.source is not None and y.source is not None:
        src = x.algebra.supercommutator(x.source, y.source)
    return Derivation(x.algebra, mat, (x.parity + y.parity) % 2, src)


def superderivation_dims(alg: Superalgebra) -> dict:
    """Dimensions of the even and odd superderivation spaces.

    Solves the graded Leibniz condition as a linear system on operators with
    the grading pattern of each parity.  For large ungraded algebras with a
    spanning matrix realization the answer n**2 - 1 for M_n is used instead
    of the (much bigger) solve; the route taken is reported.
    """
    n = alg.dim
    if n > 30 and alg.rep_basis is not None and not np.any(alg.parity):
        nrep = alg.rep_basis.shape[1]
        flat = alg.rep_basis.reshape(n, -1)
        if n == nrep * nrep and numerical_rank(flat) == n:
            # the realization is onto a full matrix algebra of matching
            # dimension, so this is M_nrep up to isomorphism
            return {"even": n - 1, "odd": 0, "route": "fullMatrix"}
    dims = {}
    eye = np.eye(n)
    lefts = [alg.left_mult_matrix(eye[:, j]) for j in range(n)]
    for r in (0, 1):
        allowed = np.flatnonzero(
            (alg.parity[:, None] == (alg.parity[None, :] + r) % 2).reshape(-1)
        )
        if allowed.size == 0:
            dims[r] = 0
            continue
        blocks = []
        for j in range(n):
            lj = lefts[j]
            sign = koszul_sign(r, int(alg.parity[j]))
            # vec(X Lj) - sign vec(Lj X) - vec(mu(X e_j)), row-major vec
            mj = np.kron(eye, lj.T) - sign * np.kron(lj, eye)
            bj = np.zeros((n * n, n * n), dtype=complex)
            for k in range(n):
                bj[:, k * n + j] = lefts[k].reshape(-1)
            blocks.append((mj - bj)[:, allowed])
        mat = np.vstack(blocks)
        dims[r] = allowed.size - numerical_rank(mat)
    return {"even": int(dims[0]), "odd": int(dims[1]), "route": "solver"}


def is_special(alg: Superalgebra) -> dict:
    """A noncommutative algebra is 'special' when its graded center is the
    scalars and every superderivation is inner.  Checked by comparing the
    superderivation-space dimension with dim - 1; returns an evidence dict.
    """
    if getattr(alg, "_special_cache", None) is not None:
        return alg._special_cache
    z0, z1 = alg.graded_center()
    if alg.is_supercommutative:
        result = {
            "special": False,
            "center_dims": [len(z0), len(z1)],
            "superderivation_dims": None,
            "inner_dim": 0,
            "route": "supercommutative",
            "supercommutative": True,
        }
        alg._special_cache = result
        return result
    sder = superderivation_dims(alg)
    fam = DerivationFamily.inner_family(alg)
    inner_dim = len(fam)
    special = (
        len(z0) == 1
        and len(z1) == 0
        and not alg.is_supercommutative
        and inner_dim == alg.dim - 1
        and sder["even"] + sder["odd"] == inner_dim
    )
    result = {
        "special": bool(special),
        "center_dims": [len(z0), len(z1)],
        "superderivation_dims": [sder["even"], sder["odd"]],
        "inner_dim": inner_dim,
        "route": sder["route"],
        "supercommutative": bool(alg.is_supercommutative),
    }
    alg._special_cache = result
    return result


# -- derivation families ------------------------------------------------------


class DerivationFamily:
    """An independent, bracket-closed list of homogeneous derivations.

    Cochains are stored by their values on tuples from this family, so the
    family plays the role of a (generally non-spanning) frame on the space
    of derivations.  ``expand`` writes an arbitrary derivation in the frame.
    """

    def __init__(
        self,
        algebra: Superalgebra,
        members: list[Derivation],
        verify: bool = True,
    ) -> None:
        self.algebra = algebra
        self.members = list(members)
        self.parities = np.array([x.parity for x in self.members], dtype=int)
        if not self.members:
            raise CalculusError("derivation family must not be empty")
        for x in self.members:
            if x.algebra is not algebra:
                raise CalculusError("family member on a different algebra")
            if verify:
                ok, res = check_superderivation(algebra, x.matrix, x.parity)
                if not ok:
                    raise CalculusError(
                        f"family member fails the derivation condition ({res:.3e})"
                    )
        self._flat = np.array([x.matrix.reshape(-1) for x in self.members])
        if numerical_rank(self._flat) != len(self.members):
            raise CalculusError("family members are linearly dependent")
        self._pinv = np.linalg.pinv(self._flat.T)
        self._bracket: np.ndarray | None = None
        self._star: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.members)

    @classmethod
    def inner_family(cls, alg: Superalgebra) -> "DerivationFamily":
        """Inner derivations of the basis elements, thinned to an independent
        set (the center contributes nothing and is dropped)."""
        members: list[Derivation] = []
        rows: list[np.ndarray] = []
        for i in range(alg.dim):
            d = inner_derivation(alg, alg.basis_element(i))
            flat = d.matrix.reshape(-1)
            if max_abs(flat) < 1e-14:
                continue
            stacked = np.array(rows + [flat])
            s = np.linalg.svd(stacked, compute_uv=False)
            if s[-1] > 1e-10 * s[0]:
                rows.append(flat)
                members.append(d)
        if not members:
            raise CalculusError(
                "no nonzero inner derivations (is the algebra supercommutative?)"
            )
        return cls(alg, members, verify=False)

    def expand(self, x: Derivation) -> tuple[np.ndarray, float]:
        """Coefficients of x over the family and the expansion residual."""
        vec = x.matrix.reshape(-1)
        coeffs = self._pinv @ vec
        res = max_abs(self._flat.T @ coeffs - vec)
        return coeffs, res

    def expand_strict(self, x: Derivation, tol: float = EXPAND_TOL) -> np.ndarray:
        coeffs, res = self.expand(x)
        if res > tol:
            raise CalculusError(f"derivation lies outside the family by {res:.3e}")
        return coeffs

    def combination(self, coeffs: np.ndarray, parity: int) -> Derivation:
        mat = np.tensordot(coeffs, np.array([x.matrix for x in self.members]), axes=1)
        return Derivation(self.algebra, mat, parity)

    @property
    def bracket(self) -> np.ndarray:
        """Structure constants f[i, j, k] with [X_i, X_j] = sum_k f[i,j,k] X_k."""
        if self._bracket is None:
            m = len(self)
            f = np.zeros((m, m, m), dtype=complex)
            worst = 0.0
            for i in range(m):
                for j in range(m):
                    br = lie_bracket(self.members[i], self.members[j])
                    coeffs, res = self.expand(br)
                    worst = max(worst, res)
                    f[i, j] = coeffs
            if worst > CLOSURE_TOL:
                raise CalculusError(f"family is not bracket closed ({worst:.3e})")
            self._bracket = f
        return self._bracket

    @property
    def star_matrix(self) -> np.ndarray:
        """S with X_i* = sum_j S[j, i] X_j (gated expansion)."""
        if self._star is None:
            m = len(self)
            s = np.zeros((m, m), dtype=complex)
            for i in range(m):
                s[:, i] = self.expand_strict(self.members[i].star())
            self._star = s
        return self._star


# -- cochains ------------------------------------------------------------------


def graded_permutation_sign(perm: tuple[int, ...], parities) -> int:
    """Combined permutation/Koszul sign for reordering homogeneous arguments.

    ``perm`` lists which original argument sits in each slot; ``parities``
    are the parities of the arguments in their original order.  Every
    adjacent swap of arguments with parities (a, b) contributes -(-1)**(a b),
    so a swap of two odd arguments costs +1 and every other swap costs -1.
    """
    seq = list(perm)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                a, b = seq[j], seq[j + 1]
                sign = -sign
                if parities[a] % 2 and parities[b] % 2:
                    sign = -sign
                seq[j], seq[j + 1] = b, a
    return sign


class Cochain:
    """A graded-alternating p-linear map from a derivation family into the
    algebra, stored densely as values on every family index tuple."""

    def __init__(
        self,
        family: DerivationFamily,
        degree: int,
        parity: int,
        tensor: np.ndarray,
        check: bool = True,
        tol: float = 1e-10,
    ) -> None:
        self.family = family
        self.degree = int(degree)
        self.parity = int(parity) % 2
        m = len(family)
        dim = family.algebra.dim
        t = np.asarray(tensor, dtype=complex)
        if t.shape != (m,) * self.degree + (dim,):
            raise CalculusError(f"cochain tensor has wrong shape {t.shape}")
        self.tensor = t
        if check:
            res = self.symmetry_residual()
            if res > tol:
                raise CalculusError(f"tensor violates graded alternation by {res:.3e}")
            res = self._parity_residual()
            if res > tol:
                raise CalculusError(f"tensor violates parity bookkeeping by {res:.3e}")

    # -- bookkeeping checks

    def symmetry_residual(self) -> float:
        """Defect of  w(.., X, Y, ..) = -(-1)**(e_X e_Y) w(.., Y, X, ..)."""
        worst = 0.0
        fp = self.family.parities
        sign = np.where((fp[:, None] & fp[None, :]).astype(bool), 1.0, -1.0)
        for ax in range(self.degree - 1):
            swapped = np.swapaxes(self.tensor, ax, ax + 1)
            shape = [1] * self.tensor.ndim
            shape[ax] = len(fp)
            shape[ax + 1] = len(fp)
            worst = max(
                worst, max_abs(self.tensor - sign.reshape(shape) * swapped)
            )
        return worst

    def _parity_residual(self) -> float:
        fp = self.family.parities
        alg = self.family.algebra
        worst = 0.0
        for idx in product(range(len(fp)), repeat=self.degree):
            tot = (self.parity + sum(int(fp[i]) for i in idx)) % 2
            vals = self.tensor[idx]
            worst = max(worst, max_abs(vals[alg.parity != tot]))
        return worst

    # -- construction helpers

    @classmethod
    def from_function(
        cls, family: DerivationFamily, degree: int, parity: int, fn, check: bool = True
    ) -> "Cochain":
        """Tabulate ``fn(members...) -> Element`` on every index tuple."""
        m = len(family)
        dim = family.algebra.dim
        t = np.zeros((m,) * degree + (dim,), dtype=complex)
        for idx in product(range(m), repeat=degree):
            val = fn(*(family.members[i] for i in idx))
            t[idx] = val.coeffs if isinstance(val, Element) else np.asarray(val)
        return cls(family, degree, parity, t, check=check)

    @classmethod
    def zero(cls, family: DerivationFamily, degree: int, parity: int) -> "Cochain":
        m = len(family)
        dim = family.algebra.dim
        return cls(
            family, degree, parity, np.zeros((m,) * degree + (dim,)), check=False
        )

    @classmethod
    def zero_form(cls, family: DerivationFamily, a: Element) -> "Cochain":
        """An algebra element viewed as a 0-cochain."""
        par = a.parity
        if par is None:
            raise CalculusError("0-form needs a homogeneous element")
        return cls(family, 0, par, a.coeffs.copy(), check=False)

    # -- evaluation and arithmetic

    def evaluate(self, *args) -> Element:
        """Evaluate on derivations (or family coefficient vectors)."""
        if len(args) != self.degree:
            raise CalculusError(f"expected {self.degree} arguments")
        t = self.tensor
        for x in args:
            vec = (
                self.family.expand_strict(x) if isinstance(x, Derivation)
                else np.asarray(x, dtype=complex)
            )
            t = np.tensordot(vec, t, axes=(0, 0))
        return Element(self.family.algebra, t)

    def _binary_check(self, other: "Cochain") -> None:
        if (
            other.family is not self.family
            or other.degree != self.degree
            or other.parity != self.parity
        ):
            raise CalculusError("cochain mismatch (family, degree or parity)")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._binary_check(other)
        return Cochain(
            self.family, self.degree, self.parity, self.tensor + other.tensor,
            check=False,
        )

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._binary_check(other)
        return Cochain(
            self.family, self.degree, self.parity, self.tensor - other.tensor,
            check=False,
        )

    def __mul__(self, scalar) -> "Cochain":
        return Cochain(
            self.family, self.degree, self.parity, complex(scalar) * self.tensor,
            check=False,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "Cochain":
        return (-1.0) * self

    def norm(self) -> float:
        return max_abs(self.tensor)

    # -- involution and reality

    def star(self) -> "Cochain":
        """w*(X_1..X_p) = [w(X_1*, .., X_p*)]* (antilinear)."""
        s = self.family.star_matrix
        t = np.conj(self.tensor)
        for ax in range(self.degree):
            t = np.moveaxis(np.tensordot(np.conj(s), t, axes=(0, ax)), 0, ax)
        m = self.family.algebra.involution_matrix
        t = np.einsum("...a,ba->...b", t, m)
        return Cochain(self.family, self.degree, self.parity, t, check=False)

    def reality_residuals(self) -> dict:
        """max |w* - w| (real defect) and max |w* + w| (imaginary defect)."""
        st = self.star()
        return {
            "real": max_abs(st.tensor - self.tensor),
            "imaginary": max_abs(st.tensor + self.tensor),
        }


def wedge(alpha: Cochain, beta: Cochain) -> Cochain:
    """Graded wedge product; see the module docstring for the convention."""
    if alpha.family is not beta.family:
        raise CalculusError("wedge needs a common derivation family")
    fam = alpha.family
    alg = fam.algebra
    p, q = alpha.degree, beta.degree
    m = len(fam)
    fp = fam.parities
    out_par = (alpha.parity + beta.parity) % 2
    t = np.zeros((m,) * (p + q) + (alg.dim,), dtype=complex)
    norm = factorial(p) * factorial(q)
    for idx in product(range(m), repeat=p + q):
        pars = [int(fp[i]) for i in idx]
        acc = np.zeros(alg.dim, dtype=complex)
        for sigma in permutations(range(p + q)):
            sign = graded_permutation_sign(sigma, pars)
            if beta.parity % 2:
                carry = sum(pars[sigma[j]] for j in range(p)) % 2
                if carry:
                    sign = -sign
            aval = alpha.tensor[tuple(idx[sigma[j]] for j in range(p))]
            bval = beta.tensor[tuple(idx[sigma[j]] for j in range(p, p + q))]
            acc = acc + sign * alg.mul_coeffs(aval, bval)
        t[idx] = acc / norm
    return Cochain(fam, p + q, out_par, t, check=False)


def lie_derivative(y: Derivation, target):
    """L_Y acting on an element, a derivation or a cochain."""
    if isinstance(target, Element):
        return y(target)
    if isinstance(target, Derivation):
        return lie_bracket(y, target)
    omega: Cochain = target
    fam = omega.family
    if y.algebra is not fam.algebra:
        raise CalculusError("derivation and cochain live on different algebras")
    m = len(fam)
    p = omega.degree
    b = np.zeros((m, m), dtype=complex)
    for i, x in enumerate(fam.members):
        b[:, i] = fam.expand_strict(lie_bracket(y, x))
    out = np.einsum("...a,ba->...b", omega.tensor, y.matrix)
    fp = fam.parities
    for j in range(p):
        tj = np.moveaxis(np.tensordot(b, omega.tensor, axes=(0, j)), 0, j)
        if y.parity % 2:
            # sign (-1)**(e_w + parities of the first j slots) per index tuple
            exps = np.full((m,) * p, omega.parity, dtype=int)
            for k in range(j):
                shape = [1] * p
                shape[k] = m
                exps = exps + fp.reshape(shape)
            signs = np.where(exps % 2 == 1, -1.0, 1.0)
            tj = signs[..., None] * tj
        out = out - tj
    return Cochain(fam, p, (omega.parity + y.parity) % 2, out, check=False)


def interior(x: Derivation, omega: Cochain) -> Cochain:
    """(i_X w)(X_1..X_{p-1}) = w(X, X_1, ..); on 0-forms the result is 0."""
    fam = omega.family
    out_par = (omega.parity + x.parity) % 2
    if omega.degree == 0:
        return Cochain.zero(fam, 0, out_par)
    vec = fam.expand_strict(x)
    t = np.tensordot(vec, omega.tensor, axes=(0, 0))
    return Cochain(fam, omega.degree - 1, out_par, t, check=False)


def exterior_derivative(omega: Cochain) -> Cochain:
    fam = omega.family
    alg = fam.algebra
    m = len(fam)
    p = omega.degree
    fp = fam.parities
    f = fam.bracket if p >= 1 else None
    mats = [x.matrix for x in fam.members]
    t = np.zeros((m,) * (p + 1) + (alg.dim,), dtype=complex)
    for idx in product(range(m), repeat=p + 1):
        pars = [int(fp[i]) for i in idx]
        val = np.zeros(alg.dim, dtype=complex)
        for a in range(p + 1):
            rest = idx[:a] + idx[a + 1:]
            ai = pars[a] * ((omega.parity + sum(pars[:a])) % 2)
            sign = (-1) ** (a + ai)
            val = val + sign * (mats[idx[a]] @ omega.tensor[rest])
        for a in range(p + 1):
            for bpos in range(a + 1, p + 1):
                bij = pars[bpos] * (sum(pars[a + 1: bpos]) % 2)
                sign = (-1) ** (bpos + bij)
                slot = idx[:a] + (slice(None),) + idx[a + 1: bpos] + idx[bpos + 1:]
                val = val + sign * (f[idx[a], idx[bpos]] @ omega.tensor[slot])
        t[idx] = val
    return Cochain(fam, p + 1, omega.parity, t, check=False)


def differential(family: DerivationFamily, a: Element) -> Cochain:
    """dA as a 1-cochain, (dA)(X) = (-1)**(e_X e_A) X(A)."""
    return exterior_derivative(Cochain.zero_form(family, a))


def random_cochain(
    family: DerivationFamily,
    degree: int,
    parity: int,
    rng: np.random.Generator,
) -> Cochain:
    """A random cochain of the requested degree and parity.

    Degree 0 and 1 are sampled entrywise; higher degrees are assembled from
    wedges and exterior derivatives of lower ones so that graded alternation
    holds by construction.
    """
    alg = family.algebra
    if degree == 0:
        return Cochain.zero_form(family, alg.sample_element(rng, parity=parity))
    if degree == 1:
        m = len(family)
        t = rng.standard_normal((m, alg.dim)) + 1j * rng.standard_normal((m, alg.dim))
        for i in range(m):
            tot = (parity + int(family.parities[i])) % 2
            t[i, alg.parity != tot] = 0.0
        return Cochain(family, 1, parity, t)
    a = random_cochain(family, 1, 0, rng)
    b = random_cochain(family, degree - 1, parity, rng)
    out = wedge(a, b)
    if degree == 2:
        out = out + exterior_derivative(random_cochain(family, 1, parity, rng))
    return out


# -- isomorphisms, pushforward, pullback ------------------------------------------


class AlgebraIsomorphism:
    """An invertible, unit- and grading-preserving *-homomorphism given by
    its coefficient matrix."""

    def __init__(
        self,
        source: Superalgebra,
        target: Superalgebra,
        matrix: np.ndarray,
        verify: bool = True,
        tol: float = 1e-9,
    ) -> None:
        self.source = source
        self.target = target
        self.matrix = np.asarray(matrix, dtype=complex)
        if self.matrix.shape != (target.dim, source.dim):
            raise CalculusError("isomorphism matrix has wrong shape")
        if source.dim != target.dim:
            raise CalculusError("isomorphic algebras must have equal dimension")
        self._inv: np.ndarray | None = None
        if verify:
            res = self.verification_residuals()
            worst = max(res.values())
            if worst > tol:
                raise CalculusError(f"not a *-isomorphism, worst defect {worst:.3e}")

    def verification_residuals(self) -> dict:
        p = self.matrix
        src, tgt = self.source, self.target
        s = np.linalg.svd(p, compute_uv=False)
        if s[-1] < 1e-12 * s[0]:
            raise CalculusError("isomorphism matrix is singular")
        worst_mult = 0.0
        for i in range(src.dim):
            for j in range(src.dim):
                lhs = tgt.mul_coeffs(p[:, i], p[:, j])
                rhs = p @ src.structure[i, j]
                worst_mult = max(worst_mult, max_abs(lhs - rhs))
        grading = max_abs(
            np.where(tgt.parity[:, None] != src.parity[None, :], p, 0.0)
        )
        return {
            "multiplicative": worst_mult,
            "unit": max_abs(p @ src.unit_coeffs - tgt.unit_coeffs),
            "star": max_abs(
                p @ src.involution_matrix - tgt.involution_matrix @ np.conj(p)
            ),
            "grading": float(grading),
        }

    @property
    def inverse_matrix(self) -> np.ndarray:
        if self._inv is None:
            self._inv = np.linalg.inv(self.matrix)
        return self._inv

    def __call__(self, a: Element) -> Element:
        if a.algebra is not self.source:
            raise CalculusError("element not in the source algebra")
        return Element(self.target, self.matrix @ a.coeffs)

    def apply_inverse(self, b: Element) -> Element:
        if b.algebra is not self.target:
            raise CalculusError("element not in the target algebra")
        return Element(self.source, self.inverse_matrix @ b.coeffs)

    def inverse(self) -> "AlgebraIsomorphism":
        return AlgebraIsomorphism(
            self.target, self.source, self.inverse_matrix, verify=False
        )

    def compose(self, other: "AlgebraIsomorphism") -> "AlgebraIsomorphism":
        """self after other."""
        if other.target is not self.source:
            raise CalculusError("composition mismatch")
        return AlgebraIsomorphism(
            other.source, self.target, self.matrix @ other.matrix, verify=False
        )

    @classmethod
    def flow(cls, x: Derivation, t: float) -> "AlgebraIsomorphism":
        """exp(t X) for an even derivation X; an automorphism of the algebra."""
        if x.parity % 2:
            raise CalculusError("flows exist only for even derivations")
        return cls(x.algebra, x.algebra, expm(t * x.matrix))

    @classmethod
    def unitary_conjugation(cls, alg: Superalgebra, u: np.ndarray) -> "AlgebraIsomorphism":
        """A -> U A U^-1 on an algebra with a matrix realization."""
        u = np.asarray(u, dtype=complex)
        uinv = np.linalg.inv(u)
        cols = [
            alg.coeffs_from_matrix(u @ alg.rep_basis[i] @ uinv)
            for i in range(alg.dim)
        ]
        return cls(alg, alg, np.array(cols).T)


def pushforward(iso: AlgebraIsomorphism, x: Derivation) -> Derivation:
    """(phi_* X)(B) = phi(X(phi^{-1}(B)))."""
    mat = iso.matrix @ x.matrix @ iso.inverse_matrix
    return Derivation(iso.target, mat, x.parity)


def pullback(
    iso: AlgebraIsomorphism,
    omega: Cochain,
    source_family: DerivationFamily | None = None,
) -> Cochain:
    """(phi* w)(X_1..X_p) = phi^{-1}[ w(phi_* X_1, .., phi_* X_p) ]."""
    if omega.family.algebra is not iso.target:
        raise CalculusError("cochain does not live on the isomorphism target")
    if source_family is None:
        if iso.source is not iso.target:
            raise CalculusError("need a source family for a non-automorphism")
        source_family = omega.family
    m_src = len(source_family)
    s = np.zeros((len(omega.family), m_src), dtype=complex)
    for i, x in enumerate(source_family.members):
        s[:, i] = omega.family.expand_strict(pushforward(iso, x))
    t = omega.tensor
    for ax in range(omega.degree):
        t = np.moveaxis(np.tensordot(s, t, axes=(0, ax)), 0, ax)
    t = np.einsum("...a,ba->...b", t, iso.inverse_matrix)
    return Cochain(source_family, omega.degree, omega.parity, t, check=False)
