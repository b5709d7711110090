"""Classical mechanics on superspace: polynomial superfunctions, graded
Poisson brackets from a constant bracket matrix, Berezin integration,
numeric flows on the even body, and the Grassmann state analysis.

A superfunction on R^(m|n) is a polynomial in m commuting variables
x_1..x_m and n anticommuting generators theta_1..theta_n, stored sparsely
as {(exponent tuple, generator bitmask): coefficient}.  Conjugation fixes
every variable and monomial and conjugates coefficients.

Bracket convention: with a constant matrix W (even-even block
antisymmetric, odd-odd block symmetric, mixed blocks zero),

    {f, g} = - sum_{B,A} (right d_B f) W[B, A] (left d_A g).

``canonical_even`` uses the block [[0, 1], [-1, 0]] per (q, p) pair, which
gives {p, q} = 1 and {f, g} = sum_i (d_p f d_q g - d_q f d_p g);
``unit_odd`` uses the identity, giving {theta_a, theta_b} = -delta_ab.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import max_abs
from .algebra import Element, Superalgebra, grassmann_algebra
from .states import State, StateError, cc_check, make_state

SUPER_EPS = 1e-15
FLOW_CONSERVATION_TOL = 1e-8

Key = tuple[tuple[int, ...], int]


class SuperspaceError(ValueError):
    pass


def _shuffle_sign(s: int, t: int) -> int:
    sign = 1
    i = 0
    tt = t
    while tt:
        if tt & 1:
            if bin(s >> (i + 1)).count("1") % 2:
                sign = -sign
        tt >>= 1
        i += 1
    return sign


@dataclass
class SuperFunction:
    m: int
    n: int
    terms: dict[Key, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: dict[Key, complex] = {}
        for (exps, mask), c in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.m:
                raise SuperspaceError("exponent tuple has wrong length")
            if mask >> self.n:
                raise SuperspaceError("generator mask out of range")
            if abs(c) > SUPER_EPS:
                clean[(exps, int(mask))] = complex(c)
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @classmethod
    def scalar(cls, m: int, n: int, value: complex) -> "SuperFunction":
        return cls(m, n, {((0,) * m, 0): value})

    @classmethod
    def coordinate(cls, m: int, n: int, index: int) -> "SuperFunction":
        exps = [0] * m
        exps[index] = 1
        return cls(m, n, {(tuple(exps), 0): 1.0})

    @classmethod
    def generator(cls, m: int, n: int, index: int) -> "SuperFunction":
        return cls(m, n, {((0,) * m, 1 << index): 1.0})

    # -- structure ------------------------------------------------------------

    @property
    def parity(self) -> int | None:
        ps = {bin(mask).count("1") % 2 for (_, mask) in self.terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def coefficient(self, exps, mask) -> complex:
        return self.terms.get((tuple(exps), int(mask)), 0.0 + 0.0j)

    def norm(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- ring operations ------------------------------------------------------

    def _binary(self, other) -> "SuperFunction":
        if not isinstance(other, SuperFunction):
            other = SuperFunction.scalar(self.m, self.n, other)
        if (other.m, other.n) != (self.m, self.n):
            raise SuperspaceError("superfunctions live on different superspaces")
        return other

    def __add__(self, other):
        other = self._binary(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return SuperFunction(self.m, self.n, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * self._binary(other)

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if not isinstance(other, SuperFunction):
            return SuperFunction(
                self.m, self.n, {k: c * other for k, c in self.terms.items()}
            )
        other = self._binary(other)
        out: dict[Key, complex] = {}
        for (e1, s), c1 in self.terms.items():
            for (e2, t), c2 in other.terms.items():
                if s & t:
                    continue
                key = (tuple(a + b for a, b in zip(e1, e2)), s | t)
                out[key] = out.get(key, 0.0) + c1 * c2 * _shuffle_sign(s, t)
        return SuperFunction(self.m, self.n, out)

    def __rmul__(self, other):
        # scalars commute with everything
        return self * other

    def conjugate(self) -> "SuperFunction":
        return SuperFunction(
            self.m, self.n, {k: np.conj(c) for k, c in self.terms.items()}
        )

    def evaluate(self, x) -> complex:
        """Value on the even body (all generators set to zero)."""
        x = np.asarray(x, dtype=complex).reshape(-1)
        if x.shape != (self.m,):
            raise SuperspaceError("point has wrong dimension")
        total = 0.0 + 0.0j
        for (exps, mask), c in self.terms.items():
            if mask:
                continue
            total += c * np.prod(x**np.array(exps)) if self.m else c
        return complex(total)


def variables(m: int, n: int):
    xs = [SuperFunction.coordinate(m, n, a) for a in range(m)]
    thetas = [SuperFunction.generator(m, n, a) for a in range(n)]
    return xs, thetas


# -- derivatives -----------------------------------------------------------------


def even_derivative(f: SuperFunction, a: int) -> SuperFunction:
    out: dict[Key, complex] = {}
    for (exps, mask), c in f.terms.items():
        if exps[a] == 0:
            continue
        new = list(exps)
        new[a] -= 1
        key = (tuple(new), mask)
        out[key] = out.get(key, 0.0) + c * exps[a]
    return SuperFunction(f.m, f.n, out)


def odd_derivative_left(f: SuperFunction, a: int) -> SuperFunction:
    out: dict[Key, complex] = {}
    bit = 1 << a
    for (exps, mask), c in f.terms.items():
        if not mask & bit:
            continue
        below = bin(mask & (bit - 1)).count("1")
        sign = -1.0 if below % 2 else 1.0
        key = (exps, mask & ~bit)
        out[key] = out.get(key, 0.0) + sign * c
    return SuperFunction(f.m, f.n, out)


def odd_derivative_right(f: SuperFunction, a: int) -> SuperFunction:
    out: dict[Key, complex] = {}
    bit = 1 << a
    for (exps, mask), c in f.terms.items():
        if not mask & bit:
            continue
        above = bin(mask >> (a + 1)).count("1")
        sign = -1.0 if above % 2 else 1.0
        key = (exps, mask & ~bit)
        out[key] = out.get(key, 0.0) + sign * c
    return SuperFunction(f.m, f.n, out)


# -- bracket matrices and the super Poisson bracket ----------------------------------


@dataclass
class SuperPBMatrix:
    """Constant coefficient matrix of an even super Poisson bracket."""

    m: int
    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.matrix, dtype=complex)
        if w.shape != (self.m + self.n, self.m + self.n):
            raise SuperspaceError("bracket matrix has the wrong shape")
        ee = w[: self.m, : self.m]
        oo = w[self.m :, self.m :]
        if max_abs(ee + ee.T) > 1e-12:
            raise SuperspaceError("even block must be antisymmetric")
        if max_abs(oo - oo.T) > 1e-12:
            raise SuperspaceError("odd block must be symmetric")
        if max_abs(w[: self.m, self.m :]) > 0 or max_abs(w[self.m :, : self.m]) > 0:
            raise SuperspaceError("mixed blocks must vanish for an even bracket")
        self.matrix = w

    @classmethod
    def canonical_even(cls, pairs: int) -> "SuperPBMatrix":
        block = np.array([[0.0, 1.0], [-1.0, 0.0]])
        w = np.kron(np.eye(pairs), block)
        return cls(2 * pairs, 0, w)

    @classmethod
    def unit_odd(cls, n: int) -> "SuperPBMatrix":
        return cls(0, n, np.eye(n))

    @classmethod
    def direct(cls, pairs: int, n: int) -> "SuperPBMatrix":
        m = 2 * pairs
        w = np.zeros((m + n, m + n))
        w[:m, :m] = cls.canonical_even(pairs).matrix.real
        w[m:, m:] = np.eye(n)
        return cls(m, n, w)


def _derivative_right(f: SuperFunction, w: SuperPBMatrix, idx: int) -> SuperFunction:
    return (
        even_derivative(f, idx)
        if idx < w.m
        else odd_derivative_right(f, idx - w.m)
    )


def _derivative_left(f: SuperFunction, w: SuperPBMatrix, idx: int) -> SuperFunction:
    return (
        even_derivative(f, idx) if idx < w.m else odd_derivative_left(f, idx - w.m)
    )


def super_poisson(f: SuperFunction, g: SuperFunction, w: SuperPBMatrix) -> SuperFunction:
    if (f.m, f.n) != (w.m, w.n) or (g.m, g.n) != (w.m, w.n):
        raise SuperspaceError("superfunctions do not match the bracket matrix")
    out = SuperFunction(w.m, w.n, {})
    for b in range(w.m + w.n):
        dfb = _derivative_right(f, w, b)
        if not dfb.terms:
            continue
        for a in range(w.m + w.n):
            c = w.matrix[b, a]
            if c == 0:
                continue
            dga = _derivative_left(g, w, a)
            if dga.terms:
                out = out - c * (dfb * dga)
    return out


# -- numeric flow on the even body ---------------------------------------------------


def hamilton_rk4(
    h: SuperFunction,
    w: SuperPBMatrix,
    x0,
    times,
    steps_per_unit: int = 200,
) -> np.ndarray:
    """Integrate d xi / dt = {H, xi} with fixed-step RK4.

    Numeric trajectories live on the even body, so the bracket matrix must
    have no odd directions.
    """
    if w.n != 0:
        raise SuperspaceError("numeric flows need a purely even bracket")
    coords = [SuperFunction.coordinate(w.m, 0, a) for a in range(w.m)]
    fields = [super_poisson(h, xa, w) for xa in coords]

    def rhs(x: np.ndarray) -> np.ndarray:
        return np.array([v.evaluate(x) for v in fields])

    times = np.asarray(times, dtype=float)
    out = np.zeros((times.size, w.m), dtype=complex)
    order = np.argsort(times)
    t_now = 0.0
    y = np.asarray(x0, dtype=complex).reshape(-1).copy()
    for r in order:
        target = times[r]
        nsteps = max(1, int(np.ceil(abs(target - t_now) * steps_per_unit)))
        dt = (target - t_now) / nsteps
        for _ in range(nsteps):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t_now = target
        out[r] = y
    return out


# -- Berezin integration --------------------------------------------------------------


def berezin_integral(f: SuperFunction) -> SuperFunction:
    """Integrate over every generator: apply left derivatives with the
    highest generator acting first, so that theta_n .. theta_1 integrates
    to one."""
    out = f
    for a in range(f.n - 1, -1, -1):
        out = odd_derivative_left(out, a)
    return out


def berezin_expectation(rho: SuperFunction, f: SuperFunction) -> complex:
    """integral of f rho over the generators (purely odd superspace)."""
    if rho.m or f.m:
        raise SuperspaceError("expectations here are for purely odd superspace")
    val = berezin_integral(f * rho)
    return val.coefficient((), 0)


# -- bridge to the finite Grassmann algebra ------------------------------------------


def element_from_superfunction(alg: Superalgebra, f: SuperFunction) -> Element:
    if alg.kind.get("form") != "grassmann" or f.m:
        raise SuperspaceError("need a purely odd superfunction and a Grassmann algebra")
    n = int(alg.kind["n"])
    if f.n != n:
        raise SuperspaceError("generator count mismatch")
    coeffs = np.zeros(alg.dim, dtype=complex)
    for (_, mask), c in f.terms.items():
        coeffs[mask] = c
    return Element(alg, coeffs)


def superfunction_from_element(e: Element) -> SuperFunction:
    alg = e.algebra
    if alg.kind.get("form") != "grassmann":
        raise SuperspaceError("need a Grassmann algebra element")
    n = int(alg.kind["n"])
    terms = {((), int(mask)): c for mask, c in enumerate(e.coeffs) if abs(c) > SUPER_EPS}
    return SuperFunction(0, n, terms)


# -- the three-generator state analysis ----------------------------------------------


def g3_unique_state(
    rng: np.random.Generator | None = None,
    grid: int = 5,
    samples: int = 300,
) -> dict:
    """On the Grassmann algebra with three generators exactly one density is
    a state: rho = theta3 theta2 theta1.

    Normalization pins the top coefficient; vanishing on odd observables
    kills the scalar and degree-2 coefficients; hermiticity plus Gram
    positivity kills the degree-1 coefficients.  The scan below perturbs
    every coefficient (grid and random directions) and counts the
    rejections, then runs the separation check with the witness observables
    1 + theta1 theta2 and 1 + 2 theta1 theta2.
    """
    rng = rng or np.random.default_rng(20250825)
    alg = grassmann_algebra(3)
    rho0 = np.zeros(alg.dim, dtype=complex)
    rho0[7] = -1.0  # theta3 theta2 theta1 written on the ascending basis
    state = make_state(alg, "berezinDensity", alg.element(rho0))
    rejected = {"grid": 0, "random": 0}
    tried = {"grid": 0, "random": 0}
    for idx in range(alg.dim):
        for val in np.linspace(-1.0, 1.0, grid):
            if val == 0.0:
                continue
            for scale in (1.0, 1.0j):
                cand = rho0.copy()
                cand[idx] += scale * val
                tried["grid"] += 1
                try:
                    make_state(alg, "berezinDensity", alg.element(cand))
                except StateError:
                    rejected["grid"] += 1
    for _ in range(samples):
        cand = rho0.copy()
        cand += 0.5 * (
            rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
        )
        if max_abs(cand - rho0) < 1e-12:
            continue
        tried["random"] += 1
        try:
            make_state(alg, "berezinDensity", alg.element(cand))
        except StateError:
            rejected["random"] += 1
    unique = rejected == tried
    e12 = alg.element([0, 0, 0, 1, 0, 0, 0, 0])  # theta1 theta2
    obs = [alg.unit + e12, alg.unit + 2.0 * e12]
    cc = cc_check(alg, obs, [state])
    return {
        "state": state,
        "density": rho0,
        "unique": unique,
        "tried": tried,
        "rejected": rejected,
        "ccVerdict": cc["verdict"],
        "ccReport": cc,
    }
