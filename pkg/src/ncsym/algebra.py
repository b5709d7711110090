"""Finite-dimensional Z2-graded *-algebras over C, given by structure constants.

Conventions used throughout the package:

* An element is a coefficient vector over a fixed homogeneous basis
  ``e_0 .. e_{n-1}``; multiplication is encoded by structure constants
  ``c[i, j, k]`` with ``e_i e_j = sum_k c[i, j, k] e_k``.
* ``parity[i]`` in {0, 1} is the grade of ``e_i``.  Signs follow the Koszul
  rule: swapping adjacent homogeneous objects of parities a, b costs
  ``(-1)**(a*b)``.
* The involution is antilinear, parity preserving, fixes the unit and is a
  graded antihomomorphism, ``(AB)* = (-1)**(e_A e_B) B* A*``.  It is stored
  as a matrix ``M`` acting on coefficients by ``star(a) = M @ conj(a)``.
  On a graded matrix algebra the odd matrix units pick up a factor ``i``
  under the involution (``E_ab* = i E_ba`` for odd ``E_ab``); this is what
  makes the graded antihomomorphism rule close, as plain conjugate transpose
  does not.
* The supercommutator of homogeneous A, B is
  ``[A, B] = AB - (-1)**(e_A e_B) BA``, extended bilinearly.

An algebra may carry a faithful matrix realization (one concrete matrix per
basis element).  It is used for spectra and positivity checks; all structural
operations work on coefficients only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._linalg import lstsq_with_residual, max_abs, nullspace

# Tolerance for the structural invariants checked at construction time
# (associativity, unit, parity bookkeeping, involution axioms).
STRUCTURE_TOL = 1e-12

# Decision threshold: an algebra counts as supercommutative when every basis
# supercommutator is below this.
SUPERCOMMUTATIVE_TOL = 1e-12


def koszul_sign(parity_a: int, parity_b: int) -> int:
    """The sign (-1)**(parity_a * parity_b)."""
    return -1 if (parity_a & 1) and (parity_b & 1) else 1


class AlgebraError(ValueError):
    """Raised when structural data fails validation or an operation's
    preconditions are not met."""


@dataclass
class Element:
    """An algebra element as a coefficient vector over the basis."""

    algebra: "Superalgebra"
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (self.algebra.dim,):
            raise AlgebraError(
                f"coefficient vector has length {c.shape[0]}, "
                f"algebra dimension is {self.algebra.dim}"
            )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    # -- structure ---------------------------------------------------------

    @property
    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, None for mixed or zero tolerance
        calls on genuinely mixed vectors.  The zero element reports parity 0.
        """
        alg = self.algebra
        even = max_abs(self.coeffs[alg.parity == 0])
        odd = max_abs(self.coeffs[alg.parity == 1])
        if odd <= STRUCTURE_TOL:
            return 0
        if even <= STRUCTURE_TOL:
            return 1
        return None

    @property
    def is_homogeneous(self) -> bool:
        return self.parity is not None

    def graded_part(self, parity: int) -> "Element":
        mask = (self.algebra.parity == parity).astype(complex)
        return Element(self.algebra, self.coeffs * mask)

    def star(self) -> "Element":
        return Element(self.algebra, self.algebra.star_coeffs(self.coeffs))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return max_abs(self.star().coeffs - self.coeffs) <= tol

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def realize(self) -> np.ndarray:
        return self.algebra.realize(self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def _check_same_algebra(self, other: "Element") -> None:
        if other.algebra is not self.algebra:
            raise AlgebraError("elements live in different algebras")

    def __add__(self, other: "Element") -> "Element":
        self._check_same_algebra(other)
        return Element(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other: "Element") -> "Element":
        self._check_same_algebra(other)
        return Element(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check_same_algebra(other)
            return Element(
                self.algebra, self.algebra.mul_coeffs(self.coeffs, other.coeffs)
            )
        return Element(self.algebra, complex(other) * self.coeffs)

    def __rmul__(self, scalar) -> "Element":
        return Element(self.algebra, complex(scalar) * self.coeffs)

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if abs(c) > 1e-14:
                terms.append(f"({c:.6g})*{self.algebra.labels[i]}")
        return " + ".join(terms) if terms else "0"


@dataclass
class CoherentSector:
    """One block of the coherent decomposition: a central projector together
    with the corner algebra it cuts out."""

    projector: Element
    algebra: "Superalgebra"


class Superalgebra:
    """A finite-dimensional associative Z2-graded *-algebra over C."""

    def __init__(
        self,
        structure: np.ndarray,
        parity: Sequence[int],
        unit: np.ndarray,
        involution: np.ndarray,
        labels: Sequence[str] | None = None,
        kind: dict | None = None,
        rep_basis: np.ndarray | None = None,
        validate: bool = True,
        tol: float = STRUCTURE_TOL,
    ) -> None:
        self.structure = np.asarray(structure, dtype=complex)
        self.dim = self.structure.shape[0]
        if self.structure.shape != (self.dim, self.dim, self.dim):
            raise AlgebraError("structure constants must be a cube")
        self.parity = np.asarray(parity, dtype=np.int8) % 2
        if self.parity.shape != (self.dim,):
            raise AlgebraError("parity vector length mismatch")
        self.unit_coeffs = np.asarray(unit, dtype=complex).reshape(-1)
        self.involution_matrix = np.asarray(involution, dtype=complex)
        if self.involution_matrix.shape != (self.dim, self.dim):
            raise AlgebraError("involution matrix shape mismatch")
        self.labels = list(labels) if labels is not None else [
            f"e{i}" for i in range(self.dim)
        ]
        if len(self.labels) != self.dim:
            raise AlgebraError("label count mismatch")
        self.kind = kind or {"form": "custom"}
        self.rep_basis = None if rep_basis is None else np.asarray(
            rep_basis, dtype=complex
        )
        self._center_cache: tuple[list[Element], list[Element]] | None = None
        self._supercomm_cache: bool | None = None
        if validate:
            self.validate(tol)

    # -- validation ----------------------------------------------------------

    def validate(self, tol: float = STRUCTURE_TOL) -> None:
        """Check associativity, the unit, parity bookkeeping and the
        involution axioms; raise AlgebraError on the first failure."""
        c = self.structure
        n = self.dim
        # unit
        lm = self.left_mult_matrix(self.unit_coeffs)
        rm = self.right_mult_matrix(self.unit_coeffs)
        err = max(max_abs(lm - np.eye(n)), max_abs(rm - np.eye(n)))
        if err > tol:
            raise AlgebraError(f"unit axiom fails by {err:.3e}")
        # associativity; for big algebras fall back to a deterministic sample
        if n <= 64:
            lhs = np.einsum("ijm,mkl->ijkl", c, c)
            rhs = np.einsum("jkm,iml->ijkl", c, c)
            err = max_abs(lhs - rhs)
            if err > tol:
                raise AlgebraError(f"associativity fails by {err:.3e}")
        else:
            rng = np.random.default_rng(0)
            for _ in range(200):
                i, j, k = rng.integers(0, n, size=3)
                lhs = c[i, j] @ c[:, k].reshape(n, n)
                rhs = c[j, k] @ c[i, :].reshape(n, n)
                if max_abs(lhs - rhs) > tol:
                    raise AlgebraError("associativity fails on sampled triple")
        # parity additivity: c[i, j, k] == 0 unless parity adds up
        psum = (self.parity[:, None] + self.parity[None, :]) % 2
        bad = psum[:, :, None] != self.parity[None, None, :]
        err = max_abs(np.where(bad, c, 0.0))
        if err > tol:
            raise AlgebraError(f"structure constants violate grading by {err:.3e}")
        # involution: involutive, antilinear antihomomorphism, unit fixed,
        # parity preserving
        m = self.involution_matrix
        err = max_abs(m @ np.conj(m) - np.eye(n))
        if err > tol:
            raise AlgebraError(f"involution not involutive, defect {err:.3e}")
        err = max_abs(self.star_coeffs(self.unit_coeffs) - self.unit_coeffs)
        if err > tol:
            raise AlgebraError(f"involution moves the unit by {err:.3e}")
        pmask = self.parity[:, None] != self.parity[None, :]
        err = max_abs(np.where(pmask, m, 0.0))
        if err > tol:
            raise AlgebraError(f"involution violates grading by {err:.3e}")
        for i in range(n):
            for j in range(n):
                lhs = self.star_coeffs(c[i, j])
                sign = koszul_sign(self.parity[i], self.parity[j])
                rhs = sign * self.mul_coeffs(
                    self.star_coeffs(_basis_vec(n, j)),
                    self.star_coeffs(_basis_vec(n, i)),
                )
                if max_abs(lhs - rhs) > tol:
                    raise AlgebraError(
                        f"involution is not a graded antihomomorphism at "
                        f"({self.labels[i]}, {self.labels[j]})"
                    )
        # realization, when present: linear multiplicative, unit to identity
        if self.rep_basis is not None:
            if self.rep_basis.shape[0] != n:
                raise AlgebraError("realization basis count mismatch")
            ident = np.eye(self.rep_basis.shape[1])
            err = max_abs(self.realize(self.unit_coeffs) - ident)
            if err > tol:
                raise AlgebraError(f"unit does not realize to identity ({err:.3e})")
            for i in range(n):
                for j in range(n):
                    lhs = self.rep_basis[i] @ self.rep_basis[j]
                    rhs = self.realize(c[i, j])
                    if max_abs(lhs - rhs) > tol:
                        raise AlgebraError(
                            "realization is not multiplicative at "
                            f"({self.labels[i]}, {self.labels[j]})"
                        )

    # -- basic operations ----------------------------------------------------

    def element(self, coeffs) -> Element:
        return Element(self, np.asarray(coeffs, dtype=complex))

    def basis_element(self, i: int) -> Element:
        return Element(self, _basis_vec(self.dim, i))

    @property
    def unit(self) -> Element:
        return Element(self, self.unit_coeffs)

    @property
    def zero(self) -> Element:
        return Element(self, np.zeros(self.dim))

    def mul_coeffs(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self.structure)

    def left_mult_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of b -> a b on coefficient vectors."""
        return np.einsum("i,ijk->kj", np.asarray(a, dtype=complex), self.structure)

    def right_mult_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of b -> b a on coefficient vectors."""
        return np.einsum("j,ijk->ki", np.asarray(a, dtype=complex), self.structure)

    def star_coeffs(self, a: np.ndarray) -> np.ndarray:
        return self.involution_matrix @ np.conj(np.asarray(a, dtype=complex))

    def supercommutator(self, a: Element, b: Element) -> Element:
        """[A, B] = AB - (-1)**(e_A e_B) BA, extended bilinearly."""
        out = np.zeros(self.dim, dtype=complex)
        for pa in (0, 1):
            ca = a.coeffs * (self.parity == pa)
            if max_abs(ca) == 0.0:
                continue
            for pb in (0, 1):
                cb = b.coeffs * (self.parity == pb)
                if max_abs(cb) == 0.0:
                    continue
                out += self.mul_coeffs(ca, cb)
                out -= koszul_sign(pa, pb) * self.mul_coeffs(cb, ca)
        return Element(self, out)

    def graded_symmetric_product(self, a: Element, b: Element) -> Element:
        """(AB + (-1)**(e_A e_B) BA) / 2, extended bilinearly."""
        out = np.zeros(self.dim, dtype=complex)
        for pa in (0, 1):
            ca = a.coeffs * (self.parity == pa)
            if max_abs(ca) == 0.0:
                continue
            for pb in (0, 1):
                cb = b.coeffs * (self.parity == pb)
                if max_abs(cb) == 0.0:
                    continue
                out += 0.5 * self.mul_coeffs(ca, cb)
                out += 0.5 * koszul_sign(pa, pb) * self.mul_coeffs(cb, ca)
        return Element(self, out)

    @property
    def is_supercommutative(self) -> bool:
        if self._supercomm_cache is None:
            worst = 0.0
            for i in range(self.dim):
                for j in range(i, self.dim):
                    comm = self.supercommutator(
                        self.basis_element(i), self.basis_element(j)
                    )
                    worst = max(worst, max_abs(comm.coeffs))
            self._supercomm_cache = worst <= SUPERCOMMUTATIVE_TOL
        return self._supercomm_cache

    # -- center and sectors ----------------------------------------------------

    def graded_center(self) -> tuple[list[Element], list[Element]]:
        """Bases of the even and odd parts of the graded center.

        z of parity t is central when [z, e_j] = 0 for every basis element,
        with the supercommutator taken at parities (t, parity_j).
        """
        if self._center_cache is not None:
            return self._center_cache
        out: list[list[Element]] = []
        for t in (0, 1):
            idx = np.flatnonzero(self.parity == t)
            if idx.size == 0:
                out.append([])
                continue
            rows = []
            for j in range(self.dim):
                sign = koszul_sign(t, self.parity[j])
                # column i: coefficients of e_i e_j - sign * e_j e_i
                block = self.structure[idx, j, :] - sign * self.structure[j, idx, :]
                rows.append(block.T)  # (dim, len(idx))
            mat = np.vstack(rows)
            basis = nullspace(mat)
            vecs = []
            for k in range(basis.shape[1]):
                full = np.zeros(self.dim, dtype=complex)
                full[idx] = basis[:, k]
                vecs.append(Element(self, full))
            out.append(vecs)
        self._center_cache = (out[0], out[1])
        return self._center_cache

    def coherent_sectors(self, tol: float = 1e-9) -> list[CoherentSector]:
        """Decompose along the even center into coherent blocks.

        Builds a hermitian central element with generic spectrum, forms the
        spectral projectors by Lagrange interpolation inside the algebra and
        cuts the algebra down to each corner.  A trivial center yields a
        single sector that shares this algebra object.
        """
        z0, _ = self.graded_center()
        if len(z0) == 0:
            raise AlgebraError("unital algebra must have a nontrivial even center")
        if len(z0) == 1:
            return [CoherentSector(projector=self.unit, algebra=self)]
        herms = _independent_hermitian_span(self, z0)
        rng = np.random.default_rng(20250825)
        for _ in range(32):
            w = rng.standard_normal(len(herms))
            z = np.zeros(self.dim, dtype=complex)
            for wi, h in zip(w, herms):
                z += wi * h.coeffs
            evals = np.linalg.eigvals(self.left_mult_matrix(z))
            lams = _cluster_reals(evals)
            if lams is None or len(lams) != len(herms):
                continue
            gaps = np.diff(sorted(lams))
            if gaps.size and min(gaps) < 1e-6:
                continue
            return self._sectors_from_central(z, lams, tol)
        raise AlgebraError("failed to find a central element with simple spectrum")

    def _sectors_from_central(
        self, z: np.ndarray, lams: list[float], tol: float
    ) -> list[CoherentSector]:
        sectors = []
        check = np.zeros(self.dim, dtype=complex)
        for lam in lams:
            p = self.unit_coeffs.copy()
            for mu in lams:
                if mu == lam:
                    continue
                p = self.mul_coeffs(p, (z - mu * self.unit_coeffs) / (lam - mu))
            idem = max_abs(self.mul_coeffs(p, p) - p)
            if idem > tol:
                raise AlgebraError(f"sector projector fails idempotence by {idem:.3e}")
            check = check + p
            sectors.append(self._corner_algebra(Element(self, p), len(sectors)))
        if max_abs(check - self.unit_coeffs) > tol:
            raise AlgebraError("sector projectors do not resolve the unit")
        return sectors

    def _corner_algebra(self, p: Element, index: int) -> CoherentSector:
        """Cut out the block p A p (= p A for central p) as its own algebra."""
        cols = []
        for t in (0, 1):
            idx = np.flatnonzero(self.parity == t)
            if idx.size == 0:
                continue
            block = self.left_mult_matrix(p.coeffs)[:, idx]
            u, s, _ = np.linalg.svd(block, full_matrices=False)
            rank = int(np.sum(s > 1e-10 * s[0])) if s.size and s[0] > 0 else 0
            for k in range(rank):
                cols.append((t, u[:, k]))
        basis = np.array([v for _, v in cols]).T  # (dim, k)
        par = [t for t, _ in cols]
        k = basis.shape[1]
        struct = np.zeros((k, k, k), dtype=complex)
        for a in range(k):
            for b in range(k):
                prod = self.mul_coeffs(basis[:, a], basis[:, b])
                x, res = lstsq_with_residual(basis, prod)
                if res > 1e-9:
                    raise AlgebraError("sector basis is not multiplicatively closed")
                struct[a, b] = x
        unit_x, res = lstsq_with_residual(basis, p.coeffs)
        if res > 1e-9:
            raise AlgebraError("sector projector does not lie in the sector")
        inv = np.zeros((k, k), dtype=complex)
        for a in range(k):
            sa = self.star_coeffs(basis[:, a])
            x, res = lstsq_with_residual(basis, sa)
            if res > 1e-9:
                raise AlgebraError("sector is not involution closed")
            # star(sum_a c_a b_a) = sum_a conj(c_a) star(b_a): column a of the
            # sector involution matrix is the expansion of star(b_a).
            inv[:, a] = x
        alg = Superalgebra(
            structure=struct,
            parity=par,
            unit=unit_x,
            involution=inv,
            labels=[f"s{index}b{a}" for a in range(k)],
            kind={"form": "sector", "parent": self.kind, "index": index},
        )
        return CoherentSector(projector=p, algebra=alg)

    # -- realization -----------------------------------------------------------

    def realize(self, coeffs: np.ndarray) -> np.ndarray:
        if self.rep_basis is None:
            raise AlgebraError(f"no matrix realization for kind {self.kind!r}")
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.rep_basis, axes=1)

    def coeffs_from_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`realize` (least squares, with residual gate)."""
        if self.rep_basis is None:
            raise AlgebraError(f"no matrix realization for kind {self.kind!r}")
        flat = self.rep_basis.reshape(self.dim, -1).T
        x, res = lstsq_with_residual(flat, np.asarray(mat, dtype=complex).reshape(-1))
        if res > 1e-9:
            raise AlgebraError(f"matrix lies outside the realization by {res:.3e}")
        return x

    # -- random elements (for suites and tests) --------------------------------

    def sample_element(
        self,
        rng: np.random.Generator,
        parity: int | None = None,
        hermitian: bool = False,
    ) -> Element:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        if parity is not None:
            c = c * (self.parity == parity)
        e = Element(self, c)
        if hermitian:
            e = 0.5 * (e + e.star())
        return e

    # -- serialization -----------------------------------------------------------

    SCHEMA = "ncsym.algebra/1"

    def to_json_dict(self) -> dict:
        d = {
            "schema": self.SCHEMA,
            "dim": self.dim,
            "labels": self.labels,
            "parity": [int(p) for p in self.parity],
            "kind": self.kind,
            "unit": _encode_array(self.unit_coeffs),
            "involution": _encode_array(self.involution_matrix),
            "structure": _encode_array(self.structure),
        }
        if self.rep_basis is not None:
            d["realization"] = _encode_array(self.rep_basis)
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "Superalgebra":
        if d.get("schema") != cls.SCHEMA:
            raise AlgebraError(f"unknown schema {d.get('schema')!r}")
        rep = _decode_array(d["realization"]) if "realization" in d else None
        return cls(
            structure=_decode_array(d["structure"]),
            parity=d["parity"],
            unit=_decode_array(d["unit"]),
            involution=_decode_array(d["involution"]),
            labels=d["labels"],
            kind=d["kind"],
            rep_basis=rep,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Superalgebra":
        return cls.from_json_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"Superalgebra(dim={self.dim}, kind={self.kind!r})"


# -- builders -------------------------------------------------------------------


def matrix_algebra(n: int, grading: tuple[int, int] | None = None) -> Superalgebra:
    """Full matrix algebra M_n, optionally with a (p|q) block grading.

    Basis: matrix units E_ab in row-major order.  With grading=(p, q) the
    unit E_ab is odd when exactly one of a, b falls in the upper block of
    size p.  Involution: E_ab -> i**parity * E_ba (conjugate transpose on the
    even part; the extra i on the odd part keeps the graded
    antihomomorphism rule, see the module docstring).
    """
    if n < 1:
        raise AlgebraError("need n >= 1")
    if grading is not None:
        p, q = grading
        if p < 0 or q < 0 or p + q != n:
            raise AlgebraError("grading blocks must be nonnegative and sum to n")
        block = np.array([0] * p + [1] * q)
    else:
        block = np.zeros(n, dtype=int)
    dim = n * n

    def bi(a: int, b: int) -> int:
        return a * n + b

    parity = np.zeros(dim, dtype=int)
    for a in range(n):
        for b in range(n):
            parity[bi(a, b)] = (block[a] + block[b]) % 2
    structure = np.zeros((dim, dim, dim), dtype=complex)
    for a in range(n):
        for b in range(n):
            for d in range(n):
                structure[bi(a, b), bi(b, d), bi(a, d)] = 1.0
    unit = np.zeros(dim, dtype=complex)
    for a in range(n):
        unit[bi(a, a)] = 1.0
    involution = np.zeros((dim, dim), dtype=complex)
    for a in range(n):
        for b in range(n):
            involution[bi(b, a), bi(a, b)] = 1j if parity[bi(a, b)] else 1.0
    labels = [f"E{a + 1}{b + 1}" for a in range(n) for b in range(n)]
    rep = np.zeros((dim, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            rep[bi(a, b), a, b] = 1.0
    kind: dict = {"form": "matrix", "n": n}
    if grading is not None:
        kind = {"form": "gradedMatrix", "blocks": [int(grading[0]), int(grading[1])]}
    return Superalgebra(structure, parity, unit, involution, labels, kind, rep)


def grassmann_algebra(n: int) -> Superalgebra:
    """Grassmann algebra on n anticommuting self-adjoint generators.

    Basis monomials are indexed by subsets of {1..n} (bitmask order), each
    written with ascending generator index.  Products carry the sign of the
    shuffle that re-sorts the concatenation; the involution fixes every
    monomial (the reversal and resorting signs always cancel) and conjugates
    coefficients.
    """
    if n < 0:
        raise AlgebraError("need n >= 0")
    dim = 1 << n
    parity = np.array([bin(s).count("1") % 2 for s in range(dim)], dtype=int)
    structure = np.zeros((dim, dim, dim), dtype=complex)
    for s in range(dim):
        for t in range(dim):
            if s & t:
                continue
            structure[s, t, s | t] = _shuffle_sign(s, t, n)
    unit = np.zeros(dim, dtype=complex)
    unit[0] = 1.0
    involution = np.eye(dim, dtype=complex)
    labels = []
    for s in range(dim):
        gens = [f"t{i + 1}" for i in range(n) if s >> i & 1]
        labels.append("".join(gens) if gens else "1")
    kind = {"form": "grassmann", "n": n}
    return Superalgebra(structure, parity, unit, involution, labels, kind)


def _shuffle_sign(s: int, t: int, n: int) -> int:
    """Sign from sorting the concatenation (ascending s)(ascending t)."""
    inversions = 0
    for i in range(n):
        if t >> i & 1:
            # count members of s greater than generator i
            inversions += bin(s >> (i + 1)).count("1")
    return -1 if inversions % 2 else 1


def grassmann_derivative_matrices(alg: Superalgebra) -> tuple[list, list]:
    """Left and right generator derivatives of a Grassmann algebra as
    coefficient matrices.  The left derivative of a monomial picks up
    (-1)**(number of smaller generators present), the right derivative
    (-1)**(number of larger ones)."""
    if alg.kind.get("form") != "grassmann":
        raise AlgebraError("generator derivatives need a Grassmann algebra")
    n = int(alg.kind["n"])
    dim = alg.dim
    left = [np.zeros((dim, dim)) for _ in range(n)]
    right = [np.zeros((dim, dim)) for _ in range(n)]
    for s in range(dim):
        for a in range(n):
            if not s & (1 << a):
                continue
            t = s & ~(1 << a)
            below = bin(s & ((1 << a) - 1)).count("1")
            above = bin(s >> (a + 1)).count("1")
            left[a][t, s] = -1.0 if below % 2 else 1.0
            right[a][t, s] = -1.0 if above % 2 else 1.0
    return left, right


def tensor_algebra(a: Superalgebra, b: Superalgebra) -> Superalgebra:
    """Graded tensor product.  Products follow the Koszul rule
    (x (x) y)(u (x) v) = (-1)**(e_y e_u) xu (x) yv and the involution acts
    factorwise, (x (x) y)* = x* (x) y* (the factor stars already absorb the
    graded swap signs, so no extra phase appears).
    """
    da, db = a.dim, b.dim
    dim = da * db
    parity = (a.parity[:, None] + b.parity[None, :]).reshape(-1) % 2
    sign = np.where(
        (b.parity[:, None] & a.parity[None, :]).astype(bool), -1.0, 1.0
    )  # sign[j, k] for (e_i (x) f_j)(e_k (x) f_l)
    structure = np.einsum(
        "jk,ikm,jln->ijklmn", sign, a.structure, b.structure
    ).reshape(dim, dim, dim)
    unit = np.kron(a.unit_coeffs, b.unit_coeffs)
    involution = np.kron(a.involution_matrix, b.involution_matrix)
    labels = [f"{la}(x){lb}" for la in a.labels for lb in b.labels]
    rep = None
    if (
        a.rep_basis is not None
        and b.rep_basis is not None
        and not (np.any(a.parity) and np.any(b.parity))
    ):
        # plain Kronecker realization is only a homomorphism when at most one
        # factor has odd elements (otherwise Koszul signs would be missed)
        rep = np.stack(
            [np.kron(ra, rb) for ra in a.rep_basis for rb in b.rep_basis]
        )
    kind = {"form": "tensor", "parts": [a.kind, b.kind]}
    return Superalgebra(structure, parity, unit, involution, labels, kind, rep)


def tensor_index(a: Superalgebra, b: Superalgebra, i: int, j: int) -> int:
    """Index of e_i (x) f_j in tensor_algebra(a, b)."""
    return i * b.dim + j


def kron_element(prod: Superalgebra, x: Element, y: Element) -> Element:
    """The element x (x) y of a tensor product algebra."""
    return Element(prod, np.kron(x.coeffs, y.coeffs))


def direct_sum(a: Superalgebra, b: Superalgebra) -> Superalgebra:
    da, db = a.dim, b.dim
    dim = da + db
    structure = np.zeros((dim, dim, dim), dtype=complex)
    structure[:da, :da, :da] = a.structure
    structure[da:, da:, da:] = b.structure
    parity = np.concatenate([a.parity, b.parity])
    unit = np.concatenate([a.unit_coeffs, b.unit_coeffs])
    involution = np.zeros((dim, dim), dtype=complex)
    involution[:da, :da] = a.involution_matrix
    involution[da:, da:] = b.involution_matrix
    labels = [f"L.{s}" for s in a.labels] + [f"R.{s}" for s in b.labels]
    rep = None
    if a.rep_basis is not None and b.rep_basis is not None:
        na = a.rep_basis.shape[1]
        nb = b.rep_basis.shape[1]
        rep = np.zeros((dim, na + nb, na + nb), dtype=complex)
        rep[:da, :na, :na] = a.rep_basis
        rep[da:, na:, na:] = b.rep_basis
    kind = {"form": "directSum", "parts": [a.kind, b.kind]}
    return Superalgebra(structure, parity, unit, involution, labels, kind, rep)


# -- helpers ----------------------------------------------------------------------


def _basis_vec(n: int, i: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[i] = 1.0
    return v


def _encode_array(a: np.ndarray) -> list:
    """Nested lists with complex entries as [re, im] pairs (exact floats)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_encode_array(sub) for sub in a]


def _decode_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _independent_hermitian_span(
    alg: Superalgebra, vecs: list[Element]
) -> list[Element]:
    """Hermitian elements spanning the same space as ``vecs`` (assumed
    involution invariant as a space)."""
    cands = []
    for v in vecs:
        cands.append(0.5 * (v + v.star()))
        cands.append(-0.5j * (v - v.star()))
    out: list[Element] = []
    rows: list[np.ndarray] = []
    for cand in cands:
        if max_abs(cand.coeffs) < 1e-12:
            continue
        stacked = np.array(rows + [cand.coeffs])
        s = np.linalg.svd(stacked, compute_uv=False)
        if s[-1] > 1e-10 * s[0]:
            rows.append(cand.coeffs)
            out.append(cand)
        if len(out) == len(vecs):
            break
    if len(out) != len(vecs):
        raise AlgebraError("center is not spanned by hermitian elements")
    return out


def _cluster_reals(evals: np.ndarray) -> list[float] | None:
    """Cluster eigenvalues of a (numerically) real-spectrum operator; None if
    an eigenvalue has a sizable imaginary part."""
    if max_abs(evals.imag) > 1e-7:
        return None
    vals = sorted(float(x) for x in evals.real)
    clusters: list[list[float]] = []
    for v in vals:
        if clusters and abs(v - clusters[-1][-1]) < 1e-7:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return [float(np.mean(c)) for c in clusters]
