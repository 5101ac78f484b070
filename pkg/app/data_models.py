"""
Data Models
Defines the Pydantic schemas for experiment configuration and for API
requests and responses.
"""

import cmath
import math
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.config import (
    DEFAULT_RESULTS_CSV,
    PILOT_SAMPLES,
    RELAY_MAX_EXPANSIONS,
    RELAY_MESSAGE_LENGTH,
    RELAY_METRIC_BIAS,
    RELAY_SEED,
    RELAY_SHAPING_PRIME,
    RELAY_SNR_GRID_DB,
    RELAY_TAPS_POLAR,
    RELAY_TRIALS,
    STACK_BRANCH_WIDTH,
    STACK_HEAP_CAPACITY,
    STACK_MAX_EXPANSIONS,
    STACK_METRIC_BIAS,
)
from app.errors import ConfigError
from app.gint import is_prime
from app.sigcode import SignalCode

Pair = tuple[float, float]
IntPair = tuple[int, int]


# -----------------------------------------------------------------------------
# Experiment configuration
# -----------------------------------------------------------------------------
class SignalCodeConfig(BaseModel):
    taps: list[Pair] = Field(..., description="Filter taps f_1..f_m as [re, im] or [magnitude, phase]")
    polar: bool = Field(False, description="Interpret taps as [magnitude, phase-radians]")
    k: int = Field(..., ge=1, description="Message length in symbols")
    m: Optional[int] = Field(None, ge=1, description="Filter memory; must match len(taps)")
    p: int = Field(3, description="Shaping prime, p = 3 mod 4")

    @field_validator("taps")
    @classmethod
    def _taps_finite(cls, taps: list[Pair]) -> list[Pair]:
        if not taps:
            raise ValueError("at least one tap is required")
        if any(not (math.isfinite(a) and math.isfinite(b)) for a, b in taps):
            raise ValueError("taps must be finite")
        return taps

    @field_validator("p")
    @classmethod
    def _p_inert_prime(cls, p: int) -> int:
        if not is_prime(p) or p % 4 != 3:
            raise ValueError(f"p = {p} must be a prime congruent to 3 mod 4")
        return p

    @model_validator(mode="after")
    def _memory_matches(self) -> "SignalCodeConfig":
        if self.m is not None and self.m != len(self.taps):
            raise ValueError(f"m = {self.m} but {len(self.taps)} taps were given")
        return self

    def complex_taps(self) -> tuple[complex, ...]:
        if self.polar:
            return tuple(cmath.rect(r, theta) for r, theta in self.taps)
        return tuple(complex(a, b) for a, b in self.taps)

    def build(self) -> SignalCode:
        return SignalCode(self.complex_taps(), self.k, self.p)


class DecoderConfig(BaseModel):
    heap_capacity: int = Field(STACK_HEAP_CAPACITY, ge=1)
    branch_width: int = Field(STACK_BRANCH_WIDTH, ge=1, le=25)
    metric_bias: float = Field(STACK_METRIC_BIAS, description="Fano-style bias per symbol")
    max_expansions: int = Field(STACK_MAX_EXPANSIONS, ge=1)


class ExperimentConfig(BaseModel):
    signal_code: SignalCodeConfig
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    snr_db: list[float] = Field(..., description="Ascending SNR grid in dB")
    trials: int = Field(..., ge=1, description="Trials per SNR point")
    seed: int = Field(0, ge=0, lt=2**64)
    pilot_samples: int = Field(PILOT_SAMPLES, ge=1)
    out: str = Field(str(DEFAULT_RESULTS_CSV), description="CSV output path")

    @field_validator("snr_db")
    @classmethod
    def _ascending(cls, grid: list[float]) -> list[float]:
        if not grid:
            raise ValueError("the SNR grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("the SNR grid must be strictly ascending")
        return grid

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        return cls.model_validate_json(path.read_text(encoding="utf-8"))


def relay_network_config(**overrides) -> ExperimentConfig:
    """The two-relay experiment assembled from the defaults in app.config."""
    base = {
        "signal_code": {
            "taps": [list(t) for t in RELAY_TAPS_POLAR],
            "polar": True,
            "k": RELAY_MESSAGE_LENGTH,
            "p": RELAY_SHAPING_PRIME,
        },
        "decoder": {"metric_bias": RELAY_METRIC_BIAS, "max_expansions": RELAY_MAX_EXPANSIONS},
        "snr_db": list(RELAY_SNR_GRID_DB),
        "trials": RELAY_TRIALS,
        "seed": RELAY_SEED,
    }
    base.update(overrides)
    return ExperimentConfig.model_validate(base)


# -----------------------------------------------------------------------------
# API
# -----------------------------------------------------------------------------
class SnfRequest(BaseModel):
    J: list[list[IntPair]] = Field(..., description="Square matrix of [re, im] entries")


class SnfResponse(BaseModel):
    P: Optional[list[list[IntPair]]] = None
    D: Optional[list[list[IntPair]]] = None
    Q: Optional[list[list[IntPair]]] = None
    invariant_factors: list[str] = Field(default_factory=list)
    success: bool
    error: Optional[str] = None


class AnalyzePartitionRequest(BaseModel):
    G: list[list[Pair]] = Field(..., description="Fine generator, [re, im] entries")
    J: list[list[IntPair]] = Field(..., description="G_coarse = J G_fine")


class AnalyzePartitionResponse(BaseModel):
    index: Optional[int] = None
    invariant_factors: list[str] = Field(default_factory=list)
    annihilator: Optional[str] = None
    factorization: list[str] = Field(default_factory=list)
    q: Optional[int] = None
    k: Optional[int] = None
    vector_space: bool = False
    success: bool
    error: Optional[str] = None


class RateRequest(BaseModel):
    h: list[Pair] = Field(..., description="Channel vector as [re, im] entries")
    snr_db: float


class RateResponse(BaseModel):
    a: Optional[list[IntPair]] = None
    rate: Optional[float] = None
    success: bool
    error: Optional[str] = None
