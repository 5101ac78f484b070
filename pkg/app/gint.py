"""
Gaussian Integers
Exact arithmetic in the principal ideal domain Z[i]: norms, Euclidean
division, GCD, units, primality, factorization and residue systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import factorint, isprime, sqrt_mod

from app.config import FACTOR_NORM_BOUND
from app.errors import CapacityError, GaussianDivisionByZero, InvalidArgumentError

IntLike = Union["GaussInt", int]


@dataclass(frozen=True, slots=True)
class GaussInt:
    """An element re + im*i of Z[i]."""

    re: int = 0
    im: int = 0

    @classmethod
    def of(cls, value: IntLike) -> "GaussInt":
        if isinstance(value, GaussInt):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        raise TypeError(f"cannot interpret {value!r} as a Gaussian integer")

    @classmethod
    def from_pair(cls, pair) -> "GaussInt":
        re, im = pair
        return cls(int(re), int(im))

    def to_pair(self) -> list[int]:
        return [self.re, self.im]

    # -- ring operations -----------------------------------------------------
    def __add__(self, other: IntLike) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: IntLike) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: IntLike) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussInt(o.re - self.re, o.im - self.im)

    def __mul__(self, other: IntLike) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussInt(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def __pos__(self) -> "GaussInt":
        return self

    def __pow__(self, exp: int) -> "GaussInt":
        if exp < 0:
            raise InvalidArgumentError("negative powers are not Gaussian integers")
        result, base = ONE, self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def __divmod__(self, other: IntLike) -> tuple["GaussInt", "GaussInt"]:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return gdivmod(self, o)

    def __rdivmod__(self, other: IntLike) -> tuple["GaussInt", "GaussInt"]:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return gdivmod(o, self)

    def __floordiv__(self, other: IntLike) -> "GaussInt":
        return divmod(self, other)[0]

    def __mod__(self, other: IntLike) -> "GaussInt":
        return divmod(self, other)[1]

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return norm(self)

    def is_unit(self) -> bool:
        return norm(self) == 1

    def divides(self, other: IntLike) -> bool:
        o = GaussInt.of(other)
        if not self:
            return not o
        return not gdivmod(o, self)[1]

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _coerce(value) -> GaussInt | None:
    if isinstance(value, GaussInt):
        return value
    if isinstance(value, int):
        return GaussInt(value, 0)
    return None


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I = GaussInt(0, 1)
UNITS = (ONE, I, GaussInt(-1, 0), GaussInt(0, -1))


# -----------------------------------------------------------------------------
# Norm and Euclidean structure
# -----------------------------------------------------------------------------
def norm(g: GaussInt) -> int:
    return g.re * g.re + g.im * g.im


def gdivmod(a: GaussInt, b: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Euclidean division a = q*b + r with norm(r) <= norm(b)/2.

    Each coordinate of a/b is rounded to the nearest integer, halves toward
    the even neighbour.
    """
    if not b:
        raise GaussianDivisionByZero(f"divmod({a}, 0)")
    n = norm(b)
    num = a * b.conj()
    q = GaussInt(round(Fraction(num.re, n)), round(Fraction(num.im, n)))
    return q, a - q * b


def gcd(a: IntLike, b: IntLike) -> GaussInt:
    """Greatest common divisor, as its first-quadrant associate."""
    a, b = GaussInt.of(a), GaussInt.of(b)
    if not a and not b:
        raise InvalidArgumentError("gcd(0, 0) is undefined")
    while b:
        a, b = b, gdivmod(a, b)[1]
    return canonical(a)


def canonical(g: GaussInt) -> GaussInt:
    """The associate of g with re > 0 and im >= 0 (zero maps to zero)."""
    if not g:
        return g
    for u in UNITS:
        c = g * u
        if c.re > 0 and c.im >= 0:
            return c
    raise AssertionError("unreachable: every nonzero element has a canonical associate")


def unit_of(g: GaussInt) -> GaussInt:
    """The unit u with g = u * canonical(g)."""
    if not g:
        raise InvalidArgumentError("zero has no unit part")
    c = canonical(g)
    for u in UNITS:
        if u * c == g:
            return u
    raise AssertionError("unreachable: g is an associate of its canonical form")


def unit_inverse(u: GaussInt) -> GaussInt:
    if not u.is_unit():
        raise InvalidArgumentError(f"{u} is not a unit")
    return u.conj()


def round_complex(z: complex) -> GaussInt:
    """Nearest Gaussian integer to z (coordinate-wise, round-half-even)."""
    return GaussInt(round(z.real), round(z.imag))


# -----------------------------------------------------------------------------
# Primality and factorization
# -----------------------------------------------------------------------------
def is_prime(g: IntLike) -> bool:
    """True iff g is a Gaussian prime."""
    g = GaussInt.of(g)
    n = norm(g)
    if n < 2:
        return False
    if isprime(n):
        return True
    if g.re == 0 or g.im == 0:
        m = abs(g.re or g.im)
        return m % 4 == 3 and isprime(m)
    return False


def _primes_over(p: int) -> list[GaussInt]:
    """Canonical Gaussian primes dividing the rational prime p."""
    if p == 2:
        return [GaussInt(1, 1)]
    if p % 4 == 3:
        return [GaussInt(p, 0)]
    x = sqrt_mod(p - 1, p)
    pi = gcd(GaussInt(p, 0), GaussInt(int(x), 1))
    return sorted({pi, canonical(pi.conj())}, key=lambda t: (t.re, t.im))


def factor(g: IntLike) -> tuple[GaussInt, list[tuple[GaussInt, int]]]:
    """Factor g as unit * prod(prime**exponent).

    Primes are canonical and pairwise non-associate, ordered by norm.
    """
    g = GaussInt.of(g)
    if not g:
        raise InvalidArgumentError("cannot factor zero")
    n = norm(g)
    if n > FACTOR_NORM_BOUND:
        raise CapacityError(
            f"norm {n} of {g} exceeds the factorization bound {FACTOR_NORM_BOUND}"
        )
    rest = g
    factors: list[tuple[GaussInt, int]] = []
    for p in sorted(factorint(n)):
        for pi in _primes_over(p):
            count = 0
            while True:
                q, r = gdivmod(rest, pi)
                if r:
                    break
                rest, count = q, count + 1
            if count:
                factors.append((pi, count))
    if not rest.is_unit():
        raise AssertionError(f"factorization of {g} left non-unit cofactor {rest}")
    factors.sort(key=lambda f: (norm(f[0]), f[0].re, f[0].im))
    return rest, factors


# -----------------------------------------------------------------------------
# Residue systems of Z[i]/(d)
# -----------------------------------------------------------------------------
def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _ideal_basis(d: GaussInt) -> tuple[int, int, int]:
    """Hermite basis (g, c, h) of the ideal (d) viewed as a Z^2 lattice.

    The rows (g, c) and (0, h) span {(re, im) of multiples of d}, g*h = norm(d).
    """
    if not d:
        raise InvalidArgumentError("the zero ideal has infinitely many residues")
    x, y = d.re, d.im
    g, s, t = _ext_gcd(x, -y)
    n = norm(d)
    h = n // g
    c = (s * y + t * x) % h
    return g, c, h


def residue_key(a: IntLike, d: GaussInt) -> GaussInt:
    """Representative of a modulo d taken from `residues(d)`."""
    a = GaussInt.of(a)
    g, c, h = _ideal_basis(d)
    qa = a.re // g
    return GaussInt(a.re - qa * g, (a.im - qa * c) % h)


def residues(d: GaussInt) -> list[GaussInt]:
    """A complete residue system of Z[i]/(d); exactly norm(d) elements."""
    g, _, h = _ideal_basis(d)
    return [GaussInt(a, b) for a in range(g) for b in range(h)]

