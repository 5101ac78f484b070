"""
Smith Normal Form
Matrices over Z[i], exact determinants, unimodular inverses and the Smith
normal form P*J*Q = D with transform witnesses.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import torch

from app.errors import InvalidArgumentError, NotInvertibleError, RankDeficientError
from app.gint import ONE, ZERO, GaussInt, canonical, gdivmod, norm, unit_inverse, unit_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GMatrix:
    """Row-major matrix with Gaussian integer entries."""

    rows: int
    cols: int
    entries: tuple[GaussInt, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidArgumentError("a GMatrix needs at least one row and column")
        if len(self.entries) != self.rows * self.cols:
            raise InvalidArgumentError(
                f"{len(self.entries)} entries do not fill a {self.rows}x{self.cols} matrix"
            )

    # -- constructors --------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "GMatrix":
        if not rows or not rows[0]:
            raise InvalidArgumentError("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvalidArgumentError("ragged matrix rows")
        entries = tuple(GaussInt.of(v) for r in rows for v in r)
        return cls(len(rows), width, entries)

    @classmethod
    def from_nested(cls, data: Sequence[Sequence[Sequence[int]]]) -> "GMatrix":
        """Build from JSON-style nested [re, im] pairs."""
        return cls.from_rows([[GaussInt.from_pair(v) for v in row] for row in data])

    @classmethod
    def identity(cls, n: int) -> "GMatrix":
        return cls.diagonal([ONE] * n)

    @classmethod
    def diagonal(cls, values: Iterable) -> "GMatrix":
        values = [GaussInt.of(v) for v in values]
        n = len(values)
        entries = [ZERO] * (n * n)
        for i, v in enumerate(values):
            entries[i * n + i] = v
        return cls(n, n, tuple(entries))

    # -- access --------------------------------------------------------------
    def __getitem__(self, index: tuple[int, int]) -> GaussInt:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[GaussInt]:
        return list(self.entries[i * self.cols : (i + 1) * self.cols])

    def to_lists(self) -> list[list[GaussInt]]:
        return [self.row(i) for i in range(self.rows)]

    def to_nested(self) -> list[list[list[int]]]:
        return [[v.to_pair() for v in row] for row in self.to_lists()]

    def to_tensor(self) -> torch.Tensor:
        data = [[complex(v) for v in row] for row in self.to_lists()]
        return torch.tensor(data, dtype=torch.complex128)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def diagonal_entries(self) -> list[GaussInt]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self) -> bool:
        return all(
            not self[i, j]
            for i in range(self.rows)
            for j in range(self.cols)
            if i != j
        )

    # -- algebra -------------------------------------------------------------
    def __matmul__(self, other: "GMatrix") -> "GMatrix":
        if self.cols != other.rows:
            raise InvalidArgumentError(
                f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}"
            )
        a, b = self.to_lists(), other.to_lists()
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = ZERO
                for t in range(self.cols):
                    if a[i][t] and b[t][j]:
                        acc = acc + a[i][t] * b[t][j]
                out.append(acc)
        return GMatrix(self.rows, other.cols, tuple(out))

    def transpose(self) -> "GMatrix":
        return GMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(v) for v in row) for row in self.to_lists()) + "]"


@dataclass(frozen=True)
class SnfResult:
    """Witnessed Smith normal form: P @ J @ Q == D."""

    P: GMatrix
    D: GMatrix
    Q: GMatrix
    invariant_factors: tuple[GaussInt, ...]


# -----------------------------------------------------------------------------
# Determinants
# -----------------------------------------------------------------------------
def _det_cofactor(a: list[list[GaussInt]]) -> GaussInt:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = ZERO
    for j in range(n):
        if not a[0][j]:
            continue
        minor = [row[:j] + row[j + 1 :] for row in a[1:]]
        term = a[0][j] * _det_cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _exact_div(a: GaussInt, b: GaussInt) -> GaussInt:
    q, r = gdivmod(a, b)
    if r:
        raise AssertionError(f"Bareiss step {a}/{b} is not exact")
    return q


def _det_bareiss(a: list[list[GaussInt]]) -> GaussInt:
    a = [list(row) for row in a]
    n = len(a)
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = _exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def det(J: GMatrix) -> GaussInt:
    """Exact determinant: cofactor expansion up to 4x4, Bareiss above."""
    if not J.is_square:
        raise InvalidArgumentError("determinant of a non-square matrix")
    if J.is_diagonal():
        total = ONE
        for d in J.diagonal_entries():
            total = total * d
        return total
    rows = J.to_lists()
    if J.rows <= 4:
        return _det_cofactor(rows)
    return _det_bareiss(rows)


# -----------------------------------------------------------------------------
# Unimodular inverse
# -----------------------------------------------------------------------------
def unimodular_inverse(M: GMatrix) -> GMatrix:
    """Inverse over Z[i] of a matrix whose determinant is a unit.

    Row-reduces [M | I] with Euclidean row operations only.
    """
    if not M.is_square:
        raise InvalidArgumentError("only square matrices are invertible")
    d = det(M)
    if not d.is_unit():
        raise NotInvertibleError(f"det = {d} is not a unit of Z[i]")
    n = M.rows
    a = [M.row(i) + GMatrix.identity(n).row(i) for i in range(n)]
    for col in range(n):
        # Euclid down the column until a single nonzero entry remains at the pivot
        while True:
            live = [i for i in range(col, n) if a[i][col]]
            pivot = min(live, key=lambda i: (norm(a[i][col]), i))
            a[col], a[pivot] = a[pivot], a[col]
            done = True
            for i in range(col + 1, n):
                if a[i][col]:
                    q, _ = gdivmod(a[i][col], a[col][col])
                    a[i] = [x - q * y for x, y in zip(a[i], a[col])]
                    if a[i][col]:
                        done = False
            if done:
                break
        u_inv = unit_inverse(a[col][col])
        a[col] = [x * u_inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                q = a[i][col]
                a[i] = [x - q * y for x, y in zip(a[i], a[col])]
    return GMatrix.from_rows([row[n:] for row in a])


# -----------------------------------------------------------------------------
# Smith normal form
# -----------------------------------------------------------------------------
def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, dst, src, q):
    """row[dst] -= q * row[src]"""
    m[dst] = [x - q * y for x, y in zip(m[dst], m[src])]


def _add_col(m, dst, src, q):
    """col[dst] -= q * col[src]"""
    for row in m:
        row[dst] = row[dst] - q * row[src]


def _diagonal_snf(J: GMatrix) -> SnfResult | None:
    """Permutation-only SNF of a diagonal J whose nonunits already form a chain."""
    n = J.rows
    diag = J.diagonal_entries()
    order = [i for i in range(n) if diag[i].is_unit()]
    order += [i for i in range(n) if not diag[i].is_unit()]
    chain = [canonical(diag[i]) for i in order if not diag[i].is_unit()]
    if not all(a.divides(b) for a, b in zip(chain, chain[1:])):
        return None
    P = [[ZERO] * n for _ in range(n)]
    Q = [[ZERO] * n for _ in range(n)]
    for t, i in enumerate(order):
        P[t][i] = unit_inverse(unit_of(diag[i]))
        Q[i][t] = ONE
    values = [unit_inverse(unit_of(diag[i])) * diag[i] for i in order]
    return SnfResult(
        P=GMatrix.from_rows(P),
        D=GMatrix.diagonal(values),
        Q=GMatrix.from_rows(Q),
        invariant_factors=tuple(chain),
    )


def smith_normal_form(J: GMatrix) -> SnfResult:
    """Diagonalize J with unimodular P, Q so that P @ J @ Q == D.

    Pivots on the minimal-norm entry of the remaining block, clears its row
    and column with Euclidean steps, and repairs divisibility failures by
    folding the offending row into the pivot row.
    """
    if not J.is_square:
        raise InvalidArgumentError("smith_normal_form expects a square matrix")
    if not det(J):
        raise RankDeficientError("J is singular: the partition index is infinite")
    if J.is_diagonal():
        fast = _diagonal_snf(J)
        if fast is not None:
            return fast

    n = J.rows
    a = J.to_lists()
    P = GMatrix.identity(n).to_lists()
    Q = GMatrix.identity(n).to_lists()

    for t in range(n):
        while True:
            pos = min(
                ((i, j) for i in range(t, n) for j in range(t, n) if a[i][j]),
                key=lambda ij: (norm(a[ij[0]][ij[1]]), ij),
            )
            i0, j0 = pos
            if i0 != t:
                _swap_rows(a, t, i0)
                _swap_rows(P, t, i0)
            if j0 != t:
                _swap_cols(a, t, j0)
                _swap_cols(Q, t, j0)
            pivot = a[t][t]

            dirty = False
            for i in range(t + 1, n):
                if a[i][t]:
                    q, r = gdivmod(a[i][t], pivot)
                    _add_row(a, i, t, q)
                    _add_row(P, i, t, q)
                    dirty = dirty or bool(r)
            for j in range(t + 1, n):
                if a[t][j]:
                    q, r = gdivmod(a[t][j], pivot)
                    _add_col(a, j, t, q)
                    _add_col(Q, j, t, q)
                    dirty = dirty or bool(r)
            if dirty:
                continue

            bad = next(
                (
                    i
                    for i in range(t + 1, n)
                    for j in range(t + 1, n)
                    if gdivmod(a[i][j], pivot)[1]
                ),
                None,
            )
            if bad is None:
                break
            # pivot row picks up an entry it does not divide; next pass reduces it
            _add_row(a, t, bad, -ONE)
            _add_row(P, t, bad, -ONE)

        u_inv = unit_inverse(unit_of(a[t][t]))
        a[t] = [x * u_inv for x in a[t]]
        P[t] = [x * u_inv for x in P[t]]

    D = GMatrix.from_rows(a)
    factors = tuple(d for d in D.diagonal_entries() if not d.is_unit())
    logger.debug("[snf] n=%s invariant_factors=%s", n, [str(d) for d in factors])
    return SnfResult(
        P=GMatrix.from_rows(P),
        D=D,
        Q=GMatrix.from_rows(Q),
        invariant_factors=factors,
    )


def is_smith_form(D: GMatrix) -> bool:
    """Diagonal, unit entries equal to 1 and first, canonical nonunits in a divisibility chain."""
    if not D.is_square or not D.is_diagonal():
        return False
    diag = D.diagonal_entries()
    seen_nonunit = False
    for d in diag:
        if d.is_unit():
            if d != ONE or seen_nonunit:
                return False
        else:
            if canonical(d) != d:
                return False
            seen_nonunit = True
    nonunits = [d for d in diag if not d.is_unit()]
    return all(x.divides(y) for x, y in zip(nonunits, nonunits[1:]))


def annihilator(s: SnfResult) -> GaussInt:
    """Largest invariant factor d_k, or 1 for the trivial quotient."""
    if not s.invariant_factors:
        return ONE
    return canonical(s.invariant_factors[-1])
