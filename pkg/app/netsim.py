"""
Relay Network Simulation
Monte Carlo harness for two transmitters, two compute-and-forward relays
and a destination that solves for both messages over the message field.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, replace
from functools import lru_cache
from multiprocessing import Pool, cpu_count
from typing import Optional, Sequence

import torch

from app.config import (
    NUM_RELAYS,
    NUM_USERS,
    POWER_CHECK_MIN_TRIALS,
    POWER_CHECK_SIGMAS,
    POWER_TOL,
    THREADS_ENV_VAR,
)
from app.cfwd import (
    ChannelVector,
    CoeffVector,
    LatticeScheme,
    decode_combination,
    map_coeffs_to_field,
    select_coefficients,
)
from app.channel import Rng, mean_power, sample_rayleigh, transmit
from app.data_models import ExperimentConfig
from app.errors import InvalidArgumentError, PowerConstraintError, RankDeficientError
from app.ffield import FieldVec, combine, elements, solve_linear
from app.lattice import build_partition
from app.sigcode import partition as code_partition
from app.snf import GMatrix

logger = logging.getLogger(__name__)

SCHEMES = ("signal-code", "qam")

# Two-sided 95 % normal quantile
_Z95 = 1.96


@dataclass
class TrialRecord:
    snr_db: float
    h: tuple[tuple[complex, ...], ...]
    a: tuple[CoeffVector, ...]
    relay_ok: tuple[bool, ...]
    invertible: bool
    recovered: bool
    budget_limited: bool = False
    tx_power: float = 0.0  # per-symbol, averaged over the users' packets


@dataclass
class CurvePoint:
    snr_db: float
    scheme: str
    trials: int
    success_rate: float
    throughput: float
    ci95: float
    ceiling: float
    # Fraction of trials in which a relay decoder ran out of expansions
    budget_limited: float = 0.0


# -----------------------------------------------------------------------------
# Schemes
# -----------------------------------------------------------------------------
def build_scheme(config: ExperimentConfig, name: str) -> LatticeScheme:
    """Unit-scale scheme; `at_snr` sets the transmit scaling."""
    sc, dec = config.signal_code, config.decoder
    knobs = dict(
        stack_bias=dec.metric_bias,
        branch_width=dec.branch_width,
        heap_capacity=dec.heap_capacity,
        max_expansions=dec.max_expansions,
    )
    if name == "signal-code":
        code = sc.build()
        return LatticeScheme(name=name, partition=code_partition(code), code=code, **knobs)
    if name == "qam":
        # Z[i]^k / pZ[i]^k, quantized symbol by symbol
        G = torch.eye(sc.k, dtype=torch.complex128)
        J = GMatrix.diagonal([sc.p] * sc.k)
        return LatticeScheme(name=name, partition=build_partition(G, J), **knobs)
    raise InvalidArgumentError(f"unknown scheme {name!r}; expected one of {SCHEMES}")


def measure_mean_power(scheme: LatticeScheme, rng: Rng, samples: int) -> float:
    """Mean per-symbol power of unit-scale codewords over about `samples` symbols."""
    packets = max(1, math.ceil(samples / scheme.n))
    total = 0.0
    for _ in range(packets):
        total += mean_power(scheme.encode(_random_message(scheme, rng)))
    power = total / packets
    logger.info("[pilot] scheme=%s packets=%s mean_power=%.6f", scheme.name, packets, power)
    return power


def at_snr(scheme: LatticeScheme, snr_db: float, pilot_power: float) -> LatticeScheme:
    """Scale so that the long-run transmit power equals the SNR."""
    snr = 10 ** (snr_db / 10)
    return replace(scheme, beta=math.sqrt(snr / pilot_power))


def _power_limit(scheme: LatticeScheme) -> Optional[float]:
    """Per-symbol shaping bound p^2/2 at the current scaling."""
    spec = scheme.partition.field
    if spec is None or not spec.inert:
        return None
    return scheme.beta**2 * spec.pi.re**2 / 2


def _random_message(scheme: LatticeScheme, rng: Rng) -> FieldVec:
    alphabet = elements(scheme.field)
    return tuple(alphabet[i] for i in rng.integers(len(alphabet), scheme.k))


def bits_per_dimension(scheme: LatticeScheme) -> float:
    """Sum rate carried by one successful trial, in bits per complex dimension."""
    return NUM_USERS * scheme.k * math.log2(scheme.field.q) / scheme.n


# -----------------------------------------------------------------------------
# Trials
# -----------------------------------------------------------------------------
def run_trial(
    scheme: LatticeScheme,
    snr_db: float,
    rng: Rng,
    *,
    h: Optional[Sequence[Sequence[complex]]] = None,
    genie: bool = False,
    noise: bool = True,
    alpha: Optional[complex] = None,
) -> TrialRecord:
    """One packet from each user through both relays to the destination.

    `scheme` must already be scaled with `at_snr`. `h` pins the fading of
    each relay; `genie` hands every relay its true combination. Messages,
    fading and each relay's noise come from separate child streams of
    `rng`, so schemes of equal k and q share messages and fading for a
    given trial seed whatever their block length.
    """
    spec = scheme.field
    snr = 10 ** (snr_db / 10)
    message_rng = rng.spawn("messages")
    messages = [_random_message(scheme, message_rng) for _ in range(NUM_USERS)]
    xs = [scheme.beta * scheme.encode(w, user) for user, w in enumerate(messages)]
    limit = _power_limit(scheme)

    if h is None:
        fading_rng = rng.spawn("fading")
        h = [sample_rayleigh(NUM_USERS, fading_rng).tolist() for _ in range(NUM_RELAYS)]

    hs, coeffs, estimates, verdicts, limited = [], [], [], [], False
    for relay in range(NUM_RELAYS):
        h_r = tuple(complex(v) for v in h[relay])
        y = transmit(xs, h_r, rng.spawn("noise", relay), noise=noise, power_limit=limit)
        chan = ChannelVector(h_r, snr)
        a = select_coefficients(chan)
        fa = map_coeffs_to_field(a, spec)
        truth = combine(fa, messages)
        hs.append(h_r)
        coeffs.append(a)

        if not any(fa):
            # a is divisible by pi: the relay learns nothing
            estimates.append(truth)
            verdicts.append(False)
            continue
        if genie:
            estimate = truth
        else:
            result = decode_combination(y, chan, a, scheme, alpha=alpha)
            estimate, limited = result.symbols, limited or result.budget_limited
        estimates.append(estimate)
        verdicts.append(estimate == truth)

    A = [list(map_coeffs_to_field(a, spec)) for a in coeffs]
    try:
        solved = solve_linear(A, estimates)
        invertible = True
    except RankDeficientError:
        solved, invertible = None, False
    recovered = invertible and all(verdicts) and list(solved) == [tuple(w) for w in messages]
    return TrialRecord(
        snr_db=snr_db,
        h=tuple(hs),
        a=tuple(coeffs),
        relay_ok=tuple(verdicts),
        invertible=invertible,
        recovered=recovered,
        budget_limited=limited,
        tx_power=sum(mean_power(x) for x in xs) / len(xs),
    )


# -----------------------------------------------------------------------------
# Curves
# -----------------------------------------------------------------------------
def resolve_workers(requested: Optional[int] = None) -> int:
    if requested:
        return max(1, requested)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        return max(1, int(env))
    return cpu_count()


@lru_cache(maxsize=4)
def _cached_scheme(config_json: str, name: str) -> LatticeScheme:
    return build_scheme(ExperimentConfig.model_validate_json(config_json), name)


def _init_worker():
    torch.set_num_threads(1)


def _run_chunk(task) -> list[tuple[bool, bool, bool, float]]:
    config_json, name, pilot, snr_index, snr_db, trial_ids, genie = task
    config = ExperimentConfig.model_validate_json(config_json)
    scheme = at_snr(_cached_scheme(config_json, name), snr_db, pilot)
    master = Rng(config.seed)
    out = []
    for t in trial_ids:
        record = run_trial(scheme, snr_db, master.spawn("trial", snr_index, t), genie=genie)
        out.append((record.recovered, record.invertible, record.budget_limited, record.tx_power))
    return out


def check_mean_power(powers: Sequence[float], snr_db: float, scheme_name: str = "") -> float:
    """Average transmit power over a set of trials, held against the SNR.

    The per-packet bound in `transmit` only catches unshaped packets; this
    check catches a scaling error. The allowance is POWER_TOL plus
    POWER_CHECK_SIGMAS standard errors of the sample mean. Fewer than
    POWER_CHECK_MIN_TRIALS powers are returned unchecked.
    """
    n = len(powers)
    if n == 0:
        raise InvalidArgumentError("no transmit powers to check")
    snr = 10 ** (snr_db / 10)
    mean = sum(powers) / n
    if n < POWER_CHECK_MIN_TRIALS:
        logger.debug("[power] too few trials to check scheme=%s trials=%s", scheme_name, n)
        return mean
    var = sum((p - mean) ** 2 for p in powers) / (n - 1)
    limit = snr * (1 + POWER_TOL) + POWER_CHECK_SIGMAS * math.sqrt(var / n)
    if mean > limit:
        raise PowerConstraintError(
            f"scheme {scheme_name} mean transmit power {mean:.4g} exceeds SNR {snr:.4g} "
            f"(allowed {limit:.4g} over {n} trials)"
        )
    return mean


def throughput_curve(
    config: ExperimentConfig,
    scheme_name: str = "signal-code",
    *,
    genie: bool = False,
    workers: Optional[int] = None,
) -> list[CurvePoint]:
    """Success-weighted sum rate at every SNR of the grid.

    Trial seeds depend only on (seed, SNR index, trial index), so both
    schemes see the same messages and fading and the result does not
    depend on the worker count.
    """
    scheme = build_scheme(config, scheme_name)
    pilot = measure_mean_power(scheme, Rng(config.seed).spawn("pilot", scheme_name), config.pilot_samples)
    rate = bits_per_dimension(scheme)
    config_json = config.model_dump_json()
    num_workers = min(resolve_workers(workers), config.trials)

    chunks = [list(range(config.trials))[w::num_workers] for w in range(num_workers)]
    tasks = [
        (config_json, scheme_name, pilot, i, snr_db, chunk, genie)
        for i, snr_db in enumerate(config.snr_db)
        for chunk in chunks
    ]
    if num_workers == 1:
        results = [_run_chunk(t) for t in tasks]
    else:
        with Pool(num_workers, initializer=_init_worker) as pool:
            results = pool.map(_run_chunk, tasks)

    points = []
    for i, snr_db in enumerate(config.snr_db):
        outcomes = [o for r in results[i * num_workers : (i + 1) * num_workers] for o in r]
        n = len(outcomes)
        success = sum(1 for o in outcomes if o[0]) / n
        ceiling = sum(1 for o in outcomes if o[1]) / n
        limited = sum(1 for o in outcomes if o[2]) / n
        power = check_mean_power([o[3] for o in outcomes], snr_db, scheme_name)
        points.append(
            CurvePoint(
                snr_db=snr_db,
                scheme=scheme_name,
                trials=n,
                success_rate=success,
                throughput=success * rate,
                ci95=_Z95 * math.sqrt(success * (1 - success) / n) * rate,
                ceiling=ceiling * rate,
                budget_limited=limited,
            )
        )
        logger.info(
            "[netsim] scheme=%s snr_db=%s success=%.4f ceiling=%.4f budget_limited=%.4f tx_power=%.4g",
            scheme_name,
            snr_db,
            success,
            ceiling,
            limited,
            power,
        )
    return points


def baseline_qam(config: ExperimentConfig, **kwargs) -> list[CurvePoint]:
    """The uncoded Z[i]^k / 3Z[i]^k curve through the same pipeline."""
    return throughput_curve(config, "qam", **kwargs)


def _crossing(curve: Sequence[CurvePoint], target: float) -> Optional[float]:
    prev = None
    for point in curve:
        if point.throughput >= target:
            if prev is None:
                return point.snr_db
            span = point.throughput - prev.throughput
            frac = (target - prev.throughput) / span
            return prev.snr_db + frac * (point.snr_db - prev.snr_db)
        prev = point
    return None


def throughput_gap_db(
    curve_a: Sequence[CurvePoint], curve_b: Sequence[CurvePoint], level: float = 0.9
) -> Optional[float]:
    """SNR by which curve_b trails curve_a at `level` of each curve's ceiling.

    The ceiling is the invertible fraction at the top of the grid. Returns
    None when a curve never reaches the level.
    """
    if not curve_a or not curve_b:
        return None
    snr_a = _crossing(curve_a, level * curve_a[-1].ceiling)
    snr_b = _crossing(curve_b, level * curve_b[-1].ceiling)
    if snr_a is None or snr_b is None:
        return None
    return snr_b - snr_a
