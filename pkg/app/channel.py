"""
Gaussian Multiple-Access Channel
Seeded random streams, Rayleigh fading draws and the noisy superposition
y = sum h_l x_l + z seen by a relay.
"""

from __future__ import annotations

import hashlib
import math
from typing import Optional, Sequence

import torch

from app.config import POWER_TOL
from app.errors import InvalidArgumentError, PowerConstraintError

_SEED_MASK = (1 << 64) - 1


class Rng:
    """Deterministic stream over a seeded torch.Generator."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _SEED_MASK
        self._gen = torch.Generator().manual_seed(self.seed)

    def spawn(self, *keys) -> "Rng":
        """Independent child stream keyed by (seed, keys)."""
        digest = hashlib.blake2b(repr((self.seed,) + keys).encode(), digest_size=8).digest()
        return Rng(int.from_bytes(digest, "little"))

    def uniform(self, n: int) -> torch.Tensor:
        return torch.rand(n, generator=self._gen, dtype=torch.float64)

    def integers(self, high: int, n: int) -> list[int]:
        return torch.randint(high, (n,), generator=self._gen).tolist()

    def complex_normal(self, n: int, variance: float = 1.0) -> torch.Tensor:
        """CN(0, variance) samples by Box-Muller."""
        u1, u2 = self.uniform(n), self.uniform(n)
        radius = torch.sqrt(-2.0 * torch.log1p(-u1))
        angle = 2 * math.pi * u2
        scale = math.sqrt(variance / 2)
        return torch.complex(radius * torch.cos(angle), radius * torch.sin(angle)) * scale


def sample_rayleigh(L: int, rng: Rng) -> torch.Tensor:
    """L i.i.d. CN(0, 1) fading coefficients."""
    return rng.complex_normal(L)


def mean_power(x: torch.Tensor) -> float:
    return float((x.abs() ** 2).mean())


def transmit(
    xs: Sequence[torch.Tensor],
    h: Sequence[complex],
    rng: Rng,
    *,
    noise: bool = True,
    power_limit: Optional[float] = None,
) -> torch.Tensor:
    """Superpose the users' packets through h and add unit-variance complex noise.

    When `power_limit` is given every packet must satisfy (1/n)||x||^2 within
    POWER_TOL of it; a violation means the encoder produced an unshaped packet.
    """
    if not xs:
        raise InvalidArgumentError("at least one transmitter is required")
    h = torch.as_tensor(h, dtype=torch.complex128).reshape(-1)
    if h.shape[0] != len(xs):
        raise InvalidArgumentError(f"{len(xs)} packets but {h.shape[0]} channel coefficients")
    n = xs[0].shape[0]
    if any(x.shape[0] != n for x in xs):
        raise InvalidArgumentError("all packets must have the same length")
    if power_limit is not None:
        for user, x in enumerate(xs):
            p = mean_power(x)
            if p > power_limit * (1 + POWER_TOL):
                raise PowerConstraintError(
                    f"user {user} packet power {p:.4g} exceeds the limit {power_limit:.4g}"
                )
    y = torch.zeros(n, dtype=torch.complex128)
    for hl, x in zip(h, xs):
        y = y + hl * x.to(torch.complex128)
    if noise:
        y = y + rng.complex_normal(n)
    return y
