"""
Finite Fields
F_q realized as Z[i]/(pi) for a Gaussian prime pi, the reduction map sigma,
its lift, field arithmetic and linear solving over F_q.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from sympy import sqrt_mod

from app.errors import GaussianDivisionByZero, InvalidArgumentError, RankDeficientError
from app.gint import GaussInt, canonical, gdivmod, is_prime, norm

FieldVec = tuple["FieldElem", ...]


@dataclass(frozen=True)
class FieldSpec:
    """The field Z[i]/(pi).

    Two kinds of modulus are supported: an inert rational prime p = 3 mod 4
    (q = p^2, residues are coordinate-wise centred mod p) and a split prime
    over p = 1 mod 4 (q = p, residues are the minimal-norm class members).
    """

    pi: GaussInt

    def __post_init__(self):
        pi = canonical(GaussInt.of(self.pi))
        object.__setattr__(self, "pi", pi)
        if not is_prime(pi):
            raise InvalidArgumentError(f"{pi} is not a Gaussian prime")
        if norm(pi) == 2:
            raise InvalidArgumentError("the ramified prime 1+i (q = 2) is not supported")

    @property
    def q(self) -> int:
        return norm(self.pi)

    @property
    def inert(self) -> bool:
        return self.pi.im == 0

    @cached_property
    def _root(self) -> int:
        """The integer x with i = x mod pi (split primes only)."""
        p = norm(self.pi)
        for x in sqrt_mod(p - 1, p, all_roots=True):
            if not gdivmod(GaussInt(-int(x), 1), self.pi)[1]:
                return int(x)
        raise AssertionError(f"no square root of -1 matches {self.pi}")

    @cached_property
    def _split_table(self) -> tuple[GaussInt, ...]:
        """Minimal-norm representative of each class 0..p-1 (split primes)."""
        p = norm(self.pi)
        bound = math.isqrt(p) + 1
        best: dict[int, GaussInt] = {}
        for a in range(-bound, bound + 1):
            for b in range(-bound, bound + 1):
                g = GaussInt(a, b)
                cls = (a + b * self._root) % p
                cur = best.get(cls)
                if cur is None or (norm(g), g.re, g.im) < (norm(cur), cur.re, cur.im):
                    best[cls] = g
        return tuple(best[c] for c in range(p))

    def reduce(self, g: GaussInt) -> GaussInt:
        if self.inert:
            p = self.pi.re
            h = (p - 1) // 2
            return GaussInt((g.re + h) % p - h, (g.im + h) % p - h)
        p = norm(self.pi)
        return self._split_table[(g.re + g.im * self._root) % p]

    def zero(self) -> "FieldElem":
        return FieldElem(GaussInt(0, 0), self)

    def one(self) -> "FieldElem":
        return FieldElem(GaussInt(1, 0), self)

    def __str__(self) -> str:
        return f"F_{self.q} = Z[i]/({self.pi})"


@dataclass(frozen=True, slots=True)
class FieldElem:
    """An element of F_q stored as its canonical Gaussian integer residue."""

    rep: GaussInt
    spec: FieldSpec

    def _check(self, other: "FieldElem") -> None:
        if other.spec != self.spec:
            raise InvalidArgumentError(f"mixing elements of {self.spec} and {other.spec}")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return sigma(self.rep + other.rep, self.spec)

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return sigma(self.rep - other.rep, self.spec)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return sigma(self.rep * other.rep, self.spec)

    def __neg__(self) -> "FieldElem":
        return sigma(-self.rep, self.spec)

    def __truediv__(self, other: "FieldElem") -> "FieldElem":
        return self * other.inv()

    def __pow__(self, exp: int) -> "FieldElem":
        if exp < 0:
            return self.inv() ** (-exp)
        result, base = self.spec.one(), self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def inv(self) -> "FieldElem":
        if not self:
            raise GaussianDivisionByZero(f"0 has no inverse in {self.spec}")
        # Fermat: x^(q-2) = x^-1
        return self ** (self.spec.q - 2)

    def __bool__(self) -> bool:
        return bool(self.rep)

    def __str__(self) -> str:
        return str(self.rep)


# -----------------------------------------------------------------------------
# sigma and its lift
# -----------------------------------------------------------------------------
def sigma(g: GaussInt, spec: FieldSpec) -> FieldElem:
    """The ring homomorphism Z[i] -> F_q."""
    return FieldElem(spec.reduce(GaussInt.of(g)), spec)


def sigma_inv(w: FieldElem) -> GaussInt:
    """Canonical lift of w back to Z[i]; sigma(sigma_inv(w)) == w."""
    return w.rep


def sigma_vec(gs: Sequence[GaussInt], spec: FieldSpec) -> FieldVec:
    return tuple(sigma(g, spec) for g in gs)


def sigma_inv_vec(ws: FieldVec) -> list[GaussInt]:
    return [w.rep for w in ws]


# Plain-function forms of the field operations
def add(x: FieldElem, y: FieldElem) -> FieldElem:
    return x + y


def mul(x: FieldElem, y: FieldElem) -> FieldElem:
    return x * y


def neg(x: FieldElem) -> FieldElem:
    return -x


def inv(x: FieldElem) -> FieldElem:
    return x.inv()


def elements(spec: FieldSpec) -> list[FieldElem]:
    """All q field elements, in a fixed order."""
    if spec.inert:
        p = spec.pi.re
        h = (p - 1) // 2
        coords = range(-h, h + 1)
        return [FieldElem(GaussInt(a, b), spec) for a, b in itertools.product(coords, coords)]
    return [FieldElem(g, spec) for g in spec._split_table]


# -----------------------------------------------------------------------------
# Vectors and linear algebra
# -----------------------------------------------------------------------------
def vec_add(x: FieldVec, y: FieldVec) -> FieldVec:
    if len(x) != len(y):
        raise InvalidArgumentError("vector length mismatch")
    return tuple(a + b for a, b in zip(x, y))


def vec_scale(c: FieldElem, x: FieldVec) -> FieldVec:
    return tuple(c * a for a in x)


def combine(coeffs: Sequence[FieldElem], vectors: Sequence[FieldVec]) -> FieldVec:
    """Sum of coeffs[l] * vectors[l]."""
    if len(coeffs) != len(vectors) or not vectors:
        raise InvalidArgumentError("need one coefficient per vector")
    total = vec_scale(coeffs[0], vectors[0])
    for c, v in zip(coeffs[1:], vectors[1:]):
        total = vec_add(total, vec_scale(c, v))
    return total


def solve_linear(A: Sequence[Sequence[FieldElem]], b: Sequence[FieldVec]) -> list[FieldVec]:
    """Solve A x = b over F_q, with each x_i and b_i a message vector.

    Gauss-Jordan elimination; a singular A raises RankDeficientError.
    """
    n = len(A)
    if any(len(row) != n for row in A):
        raise InvalidArgumentError("A must be square")
    if len(b) != n:
        raise InvalidArgumentError("b needs one vector per row of A")
    a = [list(row) for row in A]
    rhs = [tuple(v) for v in b]
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col]), None)
        if pivot is None:
            raise RankDeficientError("coefficient matrix is singular over the field")
        a[col], a[pivot] = a[pivot], a[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        scale = a[col][col].inv()
        a[col] = [scale * x for x in a[col]]
        rhs[col] = vec_scale(scale, rhs[col])
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
                rhs[i] = vec_add(rhs[i], vec_scale(-f, rhs[col]))
    return rhs
