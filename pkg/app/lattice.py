"""
Lattices and Lattice Partitions
Z[i]-lattices given by complex generator matrices, partitions Lambda/Lambda'
normalized through the Smith normal form of J, the message maps phi and
phi_inv, nearest-point quantization and coset enumeration.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import torch

from app.config import (
    COSET_ENUMERATION_BOUND,
    EXACT_QUANTIZER_MAX_DIM,
    LATTICE_MEMBERSHIP_TOL,
    RANK_TOL,
)
from app.errors import (
    CapacityError,
    InvalidArgumentError,
    InvalidLatticeError,
    NotALatticePointError,
    UseStructuredDecoderError,
)
from app.ffield import FieldSpec, FieldVec, sigma_inv_vec, sigma_vec
from app.gint import ONE, ZERO, GaussInt, canonical, factor, is_prime, norm, residues, round_complex
from app.snf import GMatrix, SnfResult, annihilator, det, smith_normal_form, unimodular_inverse

logger = logging.getLogger(__name__)

ComplexVector = Union[torch.Tensor, Sequence[complex]]


def as_cvector(x: ComplexVector) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x.to(torch.complex128).reshape(-1)
    return torch.tensor([complex(v) for v in x], dtype=torch.complex128)


def as_cmatrix(G) -> torch.Tensor:
    if isinstance(G, GMatrix):
        return G.to_tensor()
    if isinstance(G, torch.Tensor):
        return G.to(torch.complex128)
    return torch.tensor([[complex(v) for v in row] for row in G], dtype=torch.complex128)


# -----------------------------------------------------------------------------
# Lattices
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Lattice:
    """All Z[i]-combinations r @ G of the rows of an n x m generator (m >= n)."""

    G: torch.Tensor

    def __post_init__(self):
        G = as_cmatrix(self.G)
        object.__setattr__(self, "G", G)
        if G.dim() != 2:
            raise InvalidLatticeError("a generator matrix must be two-dimensional")
        n, m = G.shape
        if n > m:
            raise InvalidLatticeError(f"{n} generators cannot be independent in C^{m}")
        rank = int(torch.linalg.matrix_rank(G, atol=RANK_TOL, rtol=0.0))
        if rank != n:
            raise InvalidLatticeError(f"generator rows are dependent (rank {rank} < {n})")

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def m(self) -> int:
        return self.G.shape[1]

    @cached_property
    def _pinv(self) -> torch.Tensor:
        return torch.linalg.pinv(self.G)

    def point(self, coeffs: Sequence[GaussInt]) -> torch.Tensor:
        if len(coeffs) != self.n:
            raise InvalidArgumentError(f"expected {self.n} coefficients, got {len(coeffs)}")
        r = torch.tensor([complex(c) for c in coeffs], dtype=torch.complex128)
        return r @ self.G

    def coefficients(self, x: ComplexVector) -> list[GaussInt]:
        """Exact coefficient witness r with r @ G == x."""
        x = as_cvector(x)
        if x.shape[0] != self.m:
            raise InvalidArgumentError(f"expected a vector in C^{self.m}")
        r = x @ self._pinv
        coeffs = [round_complex(complex(v)) for v in r.tolist()]
        drift = max((abs(complex(v) - complex(c)) for v, c in zip(r.tolist(), coeffs)), default=0.0)
        if drift > LATTICE_MEMBERSHIP_TOL:
            raise NotALatticePointError(f"coefficients are {drift:.3g} away from Z[i]")
        scale = max(1.0, float(x.abs().max()))
        if float((self.point(coeffs) - x).abs().max()) > LATTICE_MEMBERSHIP_TOL * scale:
            raise NotALatticePointError("vector lies off the span of the generators")
        return coeffs

    def contains(self, x: ComplexVector) -> bool:
        try:
            self.coefficients(x)
        except NotALatticePointError:
            return False
        return True


# -----------------------------------------------------------------------------
# Partitions
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class LatticePartition:
    """Lambda/Lambda' in normalized form: coarse generator = diag(d..., 1...) @ fine generator.

    The first k coordinates of a fine-lattice coefficient vector carry the
    message; `J` keeps the matrix the partition was built from.
    """

    fine: Lattice
    coarse: Lattice
    J: GMatrix
    snf: SnfResult
    shape: tuple[GaussInt, ...]
    field: Optional[FieldSpec]
    k: int

    @property
    def n(self) -> int:
        return self.fine.n

    @cached_property
    def _index(self) -> int:
        return norm(det(self.J))

    @cached_property
    def _vector_space(self) -> Optional[tuple[int, int]]:
        return _vector_space_verdict(self)

    def contains_coarse(self, x: ComplexVector) -> bool:
        coeffs = self.fine.coefficients(x)
        return all(d.divides(c) for d, c in zip(self.shape, coeffs))


def _is_normalized(J: GMatrix) -> bool:
    """Diagonal with canonical nonunits first (divisibility chain) and ones after."""
    if not J.is_square or not J.is_diagonal():
        return False
    diag = J.diagonal_entries()
    k = sum(1 for d in diag if not d.is_unit())
    head, tail = diag[:k], diag[k:]
    if any(d.is_unit() or canonical(d) != d for d in head):
        return False
    if any(d != ONE for d in tail):
        return False
    return all(a.divides(b) for a, b in zip(head, head[1:]))


def build_partition(G_fine, J: GMatrix) -> LatticePartition:
    """Build Lambda/Lambda' from the fine generator and G_coarse = J @ G_fine."""
    fine = Lattice(G_fine)
    if not J.is_square or J.rows != fine.n:
        raise InvalidArgumentError(f"J must be {fine.n}x{fine.n} to act on the generator rows")
    snf = smith_normal_form(J)
    n = fine.n

    if _is_normalized(J):
        fine_G = fine.G
        shape = tuple(J.diagonal_entries())
    else:
        units = n - len(snf.invariant_factors)
        order = list(range(units, n)) + list(range(units))
        Q_inv = unimodular_inverse(snf.Q).to_tensor()
        fine_G = (Q_inv @ fine.G)[order]
        diag = snf.D.diagonal_entries()
        shape = tuple(diag[i] for i in order)

    D_bar = GMatrix.diagonal(shape).to_tensor()
    coarse_G = D_bar @ fine_G
    original = J.to_tensor() @ fine.G
    if not _same_span(original, coarse_G, snf):
        raise AssertionError("normalized coarse generator does not match J @ G")

    ann = annihilator(snf)
    field = None
    if not ann.is_unit() and is_prime(ann) and norm(ann) != 2:
        field = FieldSpec(ann)
    partition = LatticePartition(
        fine=Lattice(fine_G),
        coarse=Lattice(coarse_G),
        J=J,
        snf=snf,
        shape=shape,
        field=field,
        k=len(snf.invariant_factors),
    )
    logger.debug(
        "[partition] n=%s index=%s invariant_factors=%s field=%s",
        n,
        index(partition),
        [str(d) for d in snf.invariant_factors],
        field,
    )
    return partition


def _same_span(original: torch.Tensor, coarse: torch.Tensor, snf: SnfResult) -> bool:
    """Check P @ (J @ G) equals the normalized coarse generator up to row order."""
    moved = snf.P.to_tensor() @ original
    scale = max(1.0, float(original.abs().max()))
    tol = RANK_TOL * 1e3 * scale
    if torch.allclose(original, coarse, atol=tol, rtol=0.0):
        return True
    remaining = list(range(coarse.shape[0]))
    for row in moved:
        match = next(
            (i for i in remaining if torch.allclose(row, coarse[i], atol=tol, rtol=0.0)),
            None,
        )
        if match is None:
            return False
        remaining.remove(match)
    return True


def index(p: LatticePartition) -> int:
    """Number of cosets |Lambda : Lambda'| = norm(det J)."""
    return p._index


def annihilator_factorization(p: LatticePartition) -> tuple[GaussInt, list[tuple[GaussInt, int]]]:
    ann = annihilator(p.snf)
    if ann.is_unit():
        return ann, []
    return factor(ann)


def is_vector_space(p: LatticePartition) -> Optional[tuple[int, int]]:
    """(q, k) when Lambda/Lambda' is a k-dimensional F_q vector space, else None.

    Requires the annihilator to be a product of distinct primes sharing the
    same residue field size q.
    """
    return p._vector_space


def _vector_space_verdict(p: LatticePartition) -> Optional[tuple[int, int]]:
    _, factors = annihilator_factorization(p)
    if not factors or any(e != 1 for _, e in factors):
        return None
    sizes = {norm(pi) for pi, _ in factors}
    if len(sizes) != 1:
        return None
    q = sizes.pop()
    idx, k = index(p), 0
    while idx % q == 0 and idx > 1:
        idx //= q
        k += 1
    if idx != 1:
        raise AssertionError(f"index {index(p)} is not a power of {q}")
    return q, k


# -----------------------------------------------------------------------------
# Message maps
# -----------------------------------------------------------------------------
def _require_field(p: LatticePartition) -> FieldSpec:
    if p.field is None:
        raise InvalidArgumentError("partition is not Z[i]/(pi)-linear; phi is undefined")
    return p.field


def phi(lam: ComplexVector, p: LatticePartition) -> FieldVec:
    """sigma of the first k coefficients of lam; kernel is the coarse lattice."""
    spec = _require_field(p)
    coeffs = p.fine.coefficients(lam)
    return sigma_vec(coeffs[: p.k], spec)


def phi_inv(w: FieldVec, p: LatticePartition) -> torch.Tensor:
    """The lattice point sigma_inv(w) [I_k 0] G_fine."""
    _require_field(p)
    if len(w) != p.k:
        raise InvalidArgumentError(f"message must have {p.k} symbols")
    coeffs = sigma_inv_vec(w) + [ZERO] * (p.n - p.k)
    return p.fine.point(coeffs)


# -----------------------------------------------------------------------------
# Quantizers
# -----------------------------------------------------------------------------
def _real_basis(G: torch.Tensor) -> torch.Tensor:
    """Rows g and i*g of every generator, embedded as (Re, Im) in R^{2m}."""
    rows = []
    for g in G:
        rows.append(torch.cat([g.real, g.imag]))
        rows.append(torch.cat([-g.imag, g.real]))
    return torch.stack(rows)


def quantize_nearest(x: ComplexVector, L: Lattice) -> tuple[torch.Tensor, list[GaussInt]]:
    """Exact closest lattice point by depth-first sphere search (n <= 8)."""
    if L.n > EXACT_QUANTIZER_MAX_DIM:
        raise UseStructuredDecoderError(
            f"exact search is limited to dimension {EXACT_QUANTIZER_MAX_DIM}; "
            "use a code-specific decoder"
        )
    x = as_cvector(x)
    target = torch.cat([x.real, x.imag])
    Qm, Rm = torch.linalg.qr(_real_basis(L.G).T)
    z = (Qm.T @ target).tolist()
    R = Rm.tolist()
    N = len(z)

    # Babai point seeds the radius
    babai = [0] * N
    for i in reversed(range(N)):
        c = (z[i] - sum(R[i][j] * babai[j] for j in range(i + 1, N))) / R[i][i]
        babai[i] = round(c)
    best = list(babai)
    best_d = sum(
        (z[i] - sum(R[i][j] * babai[j] for j in range(i, N))) ** 2 for i in range(N)
    )
    v = [0] * N

    def search(i: int, partial: float) -> None:
        nonlocal best, best_d
        c = (z[i] - sum(R[i][j] * v[j] for j in range(i + 1, N))) / R[i][i]
        rii2 = R[i][i] ** 2
        span = math.sqrt(max(best_d - partial, 0.0) / rii2) + 1
        lo, hi = math.floor(c - span), math.ceil(c + span)
        for cand in sorted(range(lo, hi + 1), key=lambda t: abs(c - t)):
            d = partial + rii2 * (c - cand) ** 2
            if d >= best_d:
                break
            v[i] = cand
            if i == 0:
                best, best_d = list(v), d
            else:
                search(i - 1, d)
        v[i] = 0

    search(N - 1, 0.0)
    coeffs = [GaussInt(best[2 * j], best[2 * j + 1]) for j in range(L.n)]
    return L.point(coeffs), coeffs


def quantize_separable(x: ComplexVector, L: Lattice) -> tuple[torch.Tensor, list[GaussInt]]:
    """Symbol-wise rounding for a square diagonal generator."""
    G = L.G
    if L.n != L.m or not torch.equal(G, torch.diag(torch.diagonal(G))):
        raise InvalidArgumentError("separable quantization needs a square diagonal generator")
    x = as_cvector(x)
    ratios = (x / torch.diagonal(G)).tolist()
    coeffs = [round_complex(complex(r)) for r in ratios]
    return L.point(coeffs), coeffs


# -----------------------------------------------------------------------------
# Coset representatives
# -----------------------------------------------------------------------------
def enumerate_cosets(p: LatticePartition) -> list[torch.Tensor]:
    """One fine-lattice point per coset of the coarse lattice."""
    idx = index(p)
    if idx > COSET_ENUMERATION_BOUND:
        raise CapacityError(
            f"index {idx} exceeds the enumeration bound {COSET_ENUMERATION_BOUND}"
        )
    per_coord = [residues(d) if not d.is_unit() else [ZERO] for d in p.shape]
    return [p.fine.point(list(r)) for r in itertools.product(*per_coord)]
