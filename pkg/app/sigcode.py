"""
Signal Codes
Banded Toeplitz Z[i]-lattices, their Tomlinson-Harashima encoder and a
heap-based stack decoder that acts as the lattice quantizer for long codes.
"""

from __future__ import annotations

import cmath
import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import torch

from app.config import (
    COSET_ENUMERATION_BOUND,
    STACK_BRANCH_WIDTH,
    STACK_HEAP_CAPACITY,
    STACK_MAX_EXPANSIONS,
    STACK_METRIC_BIAS,
)
from app.errors import CapacityError, InvalidArgumentError
from app.ffield import FieldSpec, FieldVec, elements, sigma_inv_vec
from app.gint import GaussInt, is_prime, round_complex
from app.lattice import ComplexVector, LatticePartition, as_cvector, build_partition
from app.snf import GMatrix

logger = logging.getLogger(__name__)

# Offsets tried around the rounded zero-forcing estimate
_NEIGHBOURHOOD = tuple(GaussInt(a, b) for a in range(-2, 3) for b in range(-2, 3))


@dataclass(frozen=True)
class SignalCode:
    """Monic filter 1 + f_1 D + ... + f_m D^m over k message symbols, shaped mod p."""

    taps: tuple[complex, ...]
    k: int
    p: int

    def __post_init__(self):
        taps = tuple(complex(f) for f in self.taps)
        object.__setattr__(self, "taps", taps)
        if not taps:
            raise InvalidArgumentError("a signal code needs at least one tap")
        if any(not cmath.isfinite(f) for f in taps):
            raise InvalidArgumentError("tap magnitudes must be finite")
        if self.k < 1:
            raise InvalidArgumentError("message length k must be positive")
        if not is_prime(self.p) or self.p % 4 != 3:
            raise InvalidArgumentError(f"shaping modulus {self.p} must be a prime = 3 mod 4")

    @classmethod
    def from_polar(cls, taps: Sequence[tuple[float, float]], k: int, p: int) -> "SignalCode":
        return cls(tuple(cmath.rect(r, theta) for r, theta in taps), k, p)

    @property
    def m(self) -> int:
        return len(self.taps)

    @property
    def n(self) -> int:
        return self.k + self.m

    @cached_property
    def field(self) -> FieldSpec:
        return FieldSpec(GaussInt(self.p, 0))

    @cached_property
    def _partition(self) -> LatticePartition:
        J = GMatrix.diagonal([self.p] * self.k + [1] * self.m)
        return build_partition(terminated_generator(self), J)


def generator_matrix(c: SignalCode) -> torch.Tensor:
    """k x (k+m) banded Toeplitz generator: row i is (1, f_1, ..., f_m) starting at column i."""
    G = torch.zeros(c.k, c.n, dtype=torch.complex128)
    row = torch.tensor((1.0 + 0j,) + c.taps, dtype=torch.complex128)
    for i in range(c.k):
        G[i, i : i + c.m + 1] = row
    return G


def terminated_generator(c: SignalCode) -> torch.Tensor:
    """Generator of the lattice the shaped codewords live in.

    The encoder also reduces the m tail symbols mod p, so the k code rows are
    joined by p times the unit vectors of the tail positions.
    """
    tail = torch.zeros(c.m, c.n, dtype=torch.complex128)
    for j in range(c.m):
        tail[j, c.k + j] = c.p
    return torch.cat([generator_matrix(c), tail])


def partition(c: SignalCode) -> LatticePartition:
    """The Z[i]/(p)-linear partition with G_coarse = diag(p I_k, I_m) G."""
    return c._partition


# -----------------------------------------------------------------------------
# Tomlinson-Harashima encoder
# -----------------------------------------------------------------------------
def _fold(t: complex, p: int) -> GaussInt:
    """The b in Z[i] placing t + p*b in [-p/2, p/2)^2."""
    half = p / 2
    return GaussInt(-math.floor((t.real + half) / p), -math.floor((t.imag + half) / p))


def _filter_state(c: SignalCode, r: Sequence[complex], n: int) -> complex:
    s = 0j
    for j, f in enumerate(c.taps, start=1):
        if 0 <= n - j < len(r):
            s += f * r[n - j]
    return s


def encode_th_with_coeffs(
    w: FieldVec, c: SignalCode, dither: Optional[ComplexVector] = None
) -> tuple[torch.Tensor, list[GaussInt]]:
    """Shaped codeword and its coefficients over the terminated generator."""
    if len(w) != c.k:
        raise InvalidArgumentError(f"message must have {c.k} symbols, got {len(w)}")
    if any(s.spec != c.field for s in w):
        raise InvalidArgumentError(f"message symbols must lie in {c.field}")
    v = [0j] * c.n if dither is None else [complex(z) for z in as_cvector(dither).tolist()]
    if len(v) != c.n:
        raise InvalidArgumentError(f"dither must have {c.n} entries")

    u = sigma_inv_vec(w)
    r: list[complex] = []
    coeffs: list[GaussInt] = []
    x: list[complex] = []
    for n in range(c.n):
        s = _filter_state(c, r, n)
        base = complex(u[n]) if n < c.k else 0j
        b = _fold(base + s + v[n], c.p)
        x.append(base + s + v[n] + c.p * complex(b))
        if n < c.k:
            coeffs.append(u[n] + b * c.p)
            r.append(complex(coeffs[-1]))
        else:
            coeffs.append(b)
    return torch.tensor(x, dtype=torch.complex128), coeffs


def encode_th(w: FieldVec, c: SignalCode, dither: Optional[ComplexVector] = None) -> torch.Tensor:
    """x = phi_inv(w) + dither + a coarse point, with every coordinate in [-p/2, p/2)."""
    return encode_th_with_coeffs(w, c, dither)[0]


def all_codewords(c: SignalCode) -> tuple[list[FieldVec], torch.Tensor]:
    """Every message with its undithered codeword; rows of the tensor follow the list."""
    count = c.field.q**c.k
    if count > COSET_ENUMERATION_BOUND:
        raise CapacityError(f"{count} codewords exceed the enumeration bound")
    messages = [tuple(w) for w in itertools.product(elements(c.field), repeat=c.k)]
    return messages, torch.stack([encode_th(w, c) for w in messages])


# -----------------------------------------------------------------------------
# Stack decoder
# -----------------------------------------------------------------------------
@dataclass
class StackDecodeResult:
    coeffs: list[GaussInt]
    tail: list[GaussInt]
    metric: float
    expansions: int
    budget_limited: bool = False

    def full_coeffs(self) -> list[GaussInt]:
        return self.coeffs + self.tail


@dataclass(order=True)
class _Node:
    metric: float
    order: int
    depth: int = field(compare=False)
    path: Optional[tuple] = field(compare=False)  # (coeff, parent path) cons list
    recent: tuple[complex, ...] = field(compare=False)  # last m coefficients, newest last


def _unwind(path) -> list[GaussInt]:
    out = []
    while path is not None:
        out.append(path[0])
        path = path[1]
    return out[::-1]


def _state(c: SignalCode, recent: tuple[complex, ...]) -> complex:
    return sum((f * r for f, r in zip(c.taps, reversed(recent))), 0j)


def _terminate(c: SignalCode, y: list[complex], node: _Node, noise_var: float, bias: float):
    """Tail coefficients and metric increment of the m termination positions."""
    recent, tail, inc = node.recent, [], 0.0
    for n in range(c.k, c.n):
        e = y[n] - _state(c, recent)
        t = round_complex(e / c.p)
        tail.append(t)
        inc += abs(e - c.p * complex(t)) ** 2 / noise_var - bias
        recent = (recent + (0j,))[-c.m :]
    return tail, inc


def _complete(c: SignalCode, y: list[complex], node: _Node) -> _Node:
    """Extend a partial path to depth k by zero-forcing rounding."""
    path, recent = node.path, node.recent
    for n in range(node.depth, c.k):
        r = round_complex(y[n] - _state(c, recent))
        path = (r, path)
        recent = (recent + (complex(r),))[-c.m :]
    return _Node(node.metric, node.order, c.k, path, recent)


def stack_decode(
    y: ComplexVector,
    c: SignalCode,
    *,
    noise_var: float = 1.0,
    bias: float = STACK_METRIC_BIAS,
    branch_width: int = STACK_BRANCH_WIDTH,
    heap_capacity: int = STACK_HEAP_CAPACITY,
    max_expansions: int = STACK_MAX_EXPANSIONS,
) -> StackDecodeResult:
    """Best-first sequential search for r minimizing ||y - r G_ext||^2.

    Each expansion extends the best stored path by the `branch_width`
    Gaussian integers nearest to the zero-forcing estimate of the next
    symbol. Paths reaching depth k are terminated at once; the first
    complete path on top of the stack is returned.
    """
    y = [complex(v) for v in as_cvector(y).tolist()]
    if len(y) != c.n:
        raise InvalidArgumentError(f"received vector must have {c.n} entries")
    if noise_var <= 0:
        raise InvalidArgumentError("noise_var must be positive")
    width = max(1, min(branch_width, len(_NEIGHBOURHOOD)))

    counter = itertools.count()
    heap = [_Node(0.0, next(counter), 0, None, (0j,) * c.m)]
    best_leaf: Optional[tuple[_Node, list[GaussInt]]] = None
    expansions = 0

    while heap:
        node = heapq.heappop(heap)
        if node.depth == c.k:
            tail, _ = _terminate(c, y, node, noise_var, bias)
            return StackDecodeResult(_unwind(node.path), tail, node.metric, expansions)

        if expansions >= max_expansions:
            logger.debug("[stack] budget exhausted k=%s expansions=%s", c.k, expansions)
            if best_leaf is not None:
                leaf, tail = best_leaf
                return StackDecodeResult(_unwind(leaf.path), tail, leaf.metric, expansions, True)
            leaf = _complete(c, y, node)
            tail, _ = _terminate(c, y, leaf, noise_var, bias)
            return StackDecodeResult(_unwind(leaf.path), tail, leaf.metric, expansions, True)
        expansions += 1

        e = y[node.depth] - _state(c, node.recent)
        base = round_complex(e)
        cands = sorted((base + d for d in _NEIGHBOURHOOD), key=lambda r: abs(e - complex(r)))
        for r in cands[:width]:
            metric = node.metric + abs(e - complex(r)) ** 2 / noise_var - bias
            child = _Node(
                metric,
                next(counter),
                node.depth + 1,
                (r, node.path),
                (node.recent + (complex(r),))[-c.m :],
            )
            if child.depth == c.k:
                tail, inc = _terminate(c, y, child, noise_var, bias)
                child.metric += inc
                if best_leaf is None or child.metric < best_leaf[0].metric:
                    best_leaf = (child, tail)
            heapq.heappush(heap, child)

        if len(heap) > heap_capacity:
            heap = heapq.nsmallest(heap_capacity * 3 // 4, heap)

    raise AssertionError("stack emptied without reaching a leaf")
