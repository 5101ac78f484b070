"""
Compute-and-Forward Receiver
Computation rate, MMSE scaling, integer coefficient selection and the
relay-side decoder that recovers a finite-field combination of messages.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import torch

from app.config import (
    COEFF_SEARCH_MAX_USERS,
    EXACT_QUANTIZER_MAX_DIM,
    RATE_TIE_TOL,
    STACK_BRANCH_WIDTH,
    STACK_HEAP_CAPACITY,
    STACK_MAX_EXPANSIONS,
    STACK_METRIC_BIAS,
)
from app.errors import CapacityError, InvalidArgumentError, UseStructuredDecoderError
from app.ffield import FieldSpec, FieldVec, sigma_vec
from app.gint import ONE, ZERO, GaussInt, norm, unit_inverse, unit_of
from app.lattice import (
    ComplexVector,
    LatticePartition,
    as_cvector,
    is_vector_space,
    phi_inv,
    quantize_nearest,
    quantize_separable,
)
from app.sigcode import SignalCode, encode_th, stack_decode

logger = logging.getLogger(__name__)

# Smallest effective noise handed to the decoder metric
_NOISE_FLOOR = 1e-12


@dataclass(frozen=True)
class ChannelVector:
    """Fading coefficients h_1..h_L seen by one receiver at a linear SNR."""

    h: tuple[complex, ...]
    snr: float

    def __post_init__(self):
        h = tuple(complex(v) for v in self.h)
        object.__setattr__(self, "h", h)
        if not h:
            raise InvalidArgumentError("a channel vector needs at least one coefficient")
        if not self.snr > 0:
            raise InvalidArgumentError(f"SNR must be positive, got {self.snr}")

    @classmethod
    def from_db(cls, h: Sequence[complex], snr_db: float) -> "ChannelVector":
        return cls(tuple(h), 10 ** (snr_db / 10))

    @property
    def L(self) -> int:
        return len(self.h)

    @property
    def norm_sq(self) -> float:
        return sum(abs(v) ** 2 for v in self.h)


@dataclass(frozen=True)
class CoeffVector:
    """Integer coefficients a in Z[i]^L of the combination a relay targets."""

    a: tuple[GaussInt, ...]

    @classmethod
    def of(cls, values: Sequence) -> "CoeffVector":
        return cls(tuple(GaussInt.of(v) for v in values))

    def __len__(self) -> int:
        return len(self.a)

    def __iter__(self):
        return iter(self.a)

    @property
    def norm_sq(self) -> int:
        return sum(norm(g) for g in self.a)

    def is_zero(self) -> bool:
        return not any(self.a)

    def __str__(self) -> str:
        return "(" + ",".join(str(g) for g in self.a) + ")"


def _inner(h: ChannelVector, a: CoeffVector) -> complex:
    """h a^H."""
    if len(a) != h.L:
        raise InvalidArgumentError(f"coefficient vector has {len(a)} entries, channel has {h.L}")
    return sum((hv * complex(g).conjugate() for hv, g in zip(h.h, a.a)), 0j)


# -----------------------------------------------------------------------------
# Rate and MMSE scaling
# -----------------------------------------------------------------------------
def effective_noise_variance(h: ChannelVector, a: CoeffVector) -> float:
    """Per-dimension variance of alpha*y - sum a_l x_l at the MMSE alpha."""
    ha = _inner(h, a)
    snr = h.snr
    return snr * a.norm_sq - snr**2 * abs(ha) ** 2 / (1 + snr * h.norm_sq)


def computation_rate(h: ChannelVector, a: CoeffVector) -> float:
    """Bits per complex dimension at which the combination a is decodable.

    R = max(log2(1 / (||a||^2 - SNR |h a^H|^2 / (1 + SNR ||h||^2))), 0)
    """
    if a.is_zero():
        raise InvalidArgumentError("the all-zero coefficient vector carries no message")
    ha = _inner(h, a)
    denom = a.norm_sq - h.snr * abs(ha) ** 2 / (1 + h.snr * h.norm_sq)
    if denom >= 1:
        return 0.0
    if denom <= 0:
        return math.inf
    return max(math.log2(1 / denom), 0.0)


def mmse_alpha(h: ChannelVector, a: CoeffVector) -> complex:
    """Scalar minimizing E|alpha y - sum a_l x_l|^2 for unit noise and per-user power SNR."""
    ha = _inner(h, a)
    return h.snr * ha.conjugate() / (1 + h.snr * h.norm_sq)


# -----------------------------------------------------------------------------
# Coefficient selection
# -----------------------------------------------------------------------------
def _rate_form(h: ChannelVector) -> list[list[float]]:
    """Real Gram matrix of Q(a) = ||a||^2 - c|h a^H|^2 over (Re a, Im a)."""
    L = h.L
    c = h.snr / (1 + h.snr * h.norm_sq)
    g = [v.conjugate() for v in h.h]
    u1 = torch.tensor([v.real for v in g] + [-v.imag for v in g], dtype=torch.float64)
    u2 = torch.tensor([v.imag for v in g] + [v.real for v in g], dtype=torch.float64)
    M = torch.eye(2 * L, dtype=torch.float64) - c * (torch.outer(u1, u1) + torch.outer(u2, u2))
    return torch.linalg.cholesky(M).T.tolist()


def _unit_normalize(a: tuple[GaussInt, ...]) -> tuple[GaussInt, ...]:
    """Associate of a whose first nonzero entry is in the canonical quadrant."""
    lead = next(g for g in a if g)
    u = unit_inverse(unit_of(lead))
    return tuple(g * u for g in a)


def select_coefficients(h: ChannelVector) -> CoeffVector:
    """Nonzero a in Z[i]^L of maximal computation rate.

    Fincke-Pohst enumeration of the ellipsoid Q(a) <= best, shrinking as
    better candidates appear. Ties in rate go to the smaller ||a||^2, then
    the lexicographically smaller vector; associates count once.
    """
    L = h.L
    if L > COEFF_SEARCH_MAX_USERS:
        raise CapacityError(f"coefficient search supports at most {COEFF_SEARCH_MAX_USERS} users")
    R = _rate_form(h)
    N = 2 * L

    def quad(v: list[int]) -> float:
        return sum(
            (sum(R[i][j] * v[j] for j in range(i, N))) ** 2 for i in range(N)
        )

    unit_vectors = [[1 if j == i else 0 for j in range(N)] for i in range(L)]
    best_q = min(1.0, min(quad(v) for v in unit_vectors))
    found: list[tuple[float, list[int]]] = []
    v = [0] * N

    def search(i: int, partial: float) -> None:
        nonlocal best_q
        rii = R[i][i]
        centre = -sum(R[i][j] * v[j] for j in range(i + 1, N)) / rii
        room = best_q + RATE_TIE_TOL - partial
        if room < 0:
            return
        span = math.sqrt(room) / abs(rii)
        for cand in range(math.ceil(centre - span), math.floor(centre + span) + 1):
            d = partial + (rii * (cand - centre)) ** 2
            if d > best_q + RATE_TIE_TOL:
                continue
            v[i] = cand
            if i == 0:
                if any(v):
                    found.append((d, list(v)))
                    best_q = min(best_q, d)
            else:
                search(i - 1, d)
        v[i] = 0

    search(N - 1, 0.0)

    # Coordinates are ordered (Re a_1..Re a_L, Im a_1..Im a_L)
    candidates = {}
    for q, vec in found:
        if q > best_q + RATE_TIE_TOL:
            continue
        a = _unit_normalize(tuple(GaussInt(vec[l], vec[L + l]) for l in range(L)))
        candidates[a] = q
    if not candidates:
        return CoeffVector((ONE,) + (ZERO,) * (L - 1))
    chosen = min(
        candidates,
        key=lambda a: (sum(norm(g) for g in a), [(g.re, g.im) for g in a]),
    )
    return CoeffVector(chosen)


def map_coeffs_to_field(a: CoeffVector, spec: FieldSpec) -> FieldVec:
    return sigma_vec(a.a, spec)


# -----------------------------------------------------------------------------
# Schemes and the relay decoder
# -----------------------------------------------------------------------------
@dataclass(eq=False)
class LatticeScheme:
    """A lattice-partition code as used on the air.

    Users transmit beta * (codeword + dither); `code` is set for signal
    codes and selects the stack decoder as the lattice quantizer.
    """

    name: str
    partition: LatticePartition
    code: Optional[SignalCode] = None
    beta: float = 1.0
    dithers: Optional[tuple[torch.Tensor, ...]] = None
    stack_bias: float = STACK_METRIC_BIAS
    branch_width: int = STACK_BRANCH_WIDTH
    heap_capacity: int = STACK_HEAP_CAPACITY
    max_expansions: int = STACK_MAX_EXPANSIONS
    _separable: bool = field(init=False, default=False)

    def __post_init__(self):
        G = self.partition.fine.G
        self._separable = self.code is None and bool(
            G.shape[0] == G.shape[1] and torch.equal(G, torch.diag(torch.diagonal(G)))
        )

    @property
    def n(self) -> int:
        return self.partition.fine.m

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def field(self) -> FieldSpec:
        if self.partition.field is None:
            raise InvalidArgumentError(f"scheme {self.name} has no message field")
        return self.partition.field

    def dither(self, user: int) -> torch.Tensor:
        if self.dithers is None:
            return torch.zeros(self.n, dtype=torch.complex128)
        return as_cvector(self.dithers[user])

    def encode(self, w: FieldVec, user: int = 0) -> torch.Tensor:
        """Unscaled channel input: coset representative of w plus the user's dither."""
        v = self.dither(user)
        if self.code is not None:
            return encode_th(w, self.code, v)
        t = phi_inv(w, self.partition) + v
        coarse = self.partition.coarse
        if coarse.n == coarse.m and torch.equal(coarse.G, torch.diag(torch.diagonal(coarse.G))):
            shift, _ = quantize_separable(t, coarse)
        elif coarse.n <= EXACT_QUANTIZER_MAX_DIM:
            shift, _ = quantize_nearest(t, coarse)
        else:
            raise UseStructuredDecoderError(f"no shaping quantizer for scheme {self.name}")
        return t - shift

    def quantize(self, g: torch.Tensor, noise_var: float) -> tuple[list[GaussInt], bool]:
        """Fine-lattice coefficients of the point nearest g, and a budget flag."""
        if self.code is not None:
            result = stack_decode(
                g,
                self.code,
                noise_var=noise_var,
                bias=self.stack_bias,
                branch_width=self.branch_width,
                heap_capacity=self.heap_capacity,
                max_expansions=self.max_expansions,
            )
            return result.full_coeffs(), result.budget_limited
        if self._separable:
            return quantize_separable(g, self.partition.fine)[1], False
        return quantize_nearest(g, self.partition.fine)[1], False


@dataclass
class CombinationEstimate:
    symbols: FieldVec
    coeffs: list[GaussInt]
    budget_limited: bool = False


def decode_combination(
    y: ComplexVector,
    h: ChannelVector,
    a: CoeffVector,
    scheme: LatticeScheme,
    alpha: Optional[complex] = None,
) -> CombinationEstimate:
    """Estimate u = sum sigma(a_l) w_l from one received packet.

    Forms g(y) = (alpha / beta) y - sum a_l v_l, quantizes it to the fine
    lattice and reads the message coordinates through sigma.
    """
    if a.is_zero():
        raise InvalidArgumentError("the all-zero coefficient vector carries no message")
    if is_vector_space(scheme.partition) is None:
        raise InvalidArgumentError(f"partition of {scheme.name} is not a vector space")
    y = as_cvector(y)
    if y.shape[0] != scheme.n:
        raise InvalidArgumentError(f"received packet must have {scheme.n} entries")
    if alpha is None:
        alpha = mmse_alpha(h, a)

    g = (alpha / scheme.beta) * y
    for user, coeff in enumerate(a.a):
        if coeff:
            g = g - complex(coeff) * scheme.dither(user)

    noise_var = max(effective_noise_variance(h, a) / scheme.beta**2, _NOISE_FLOOR)
    coeffs, limited = scheme.quantize(g, noise_var)
    if limited:
        logger.debug("[relay] decoder budget hit scheme=%s snr=%.3g", scheme.name, h.snr)
    symbols = sigma_vec(coeffs[: scheme.k], scheme.field)
    return CombinationEstimate(symbols=symbols, coeffs=coeffs, budget_limited=limited)
