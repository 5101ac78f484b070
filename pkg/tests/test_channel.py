import pytest
import torch

from app.channel import Rng, mean_power, sample_rayleigh, transmit
from app.errors import InvalidArgumentError, PowerConstraintError

C128 = torch.complex128


def test_rng_is_deterministic():
    a, b = Rng(42), Rng(42)
    assert torch.equal(a.uniform(10), b.uniform(10))
    assert a.integers(9, 20) == b.integers(9, 20)
    assert torch.equal(a.complex_normal(5), b.complex_normal(5))


def test_spawn_gives_independent_keyed_streams():
    master = Rng(7)
    x = master.spawn("trial", 0, 1).uniform(8)
    assert torch.equal(x, Rng(7).spawn("trial", 0, 1).uniform(8))
    assert not torch.equal(x, master.spawn("trial", 0, 2).uniform(8))
    assert not torch.equal(x, master.spawn("trial", 1, 1).uniform(8))
    # spawning does not advance the parent
    assert torch.equal(master.uniform(4), Rng(7).uniform(4))


def test_integers_range():
    draws = Rng(3).integers(9, 1000)
    assert min(draws) >= 0 and max(draws) <= 8
    assert len(set(draws)) == 9


def test_rayleigh_moments():
    h = sample_rayleigh(40_000, Rng(1))
    assert float(h.mean().abs()) < 0.03
    assert mean_power(h) == pytest.approx(1.0, rel=0.03)
    assert float((h.real**2).mean()) == pytest.approx(0.5, rel=0.05)


def test_complex_normal_variance():
    z = Rng(11).complex_normal(100_000, variance=4.0)
    assert mean_power(z) == pytest.approx(4.0, rel=0.02)


def test_transmit_superposition_without_noise():
    e1 = torch.tensor([1, 0, 0], dtype=C128)
    e2 = torch.tensor([0, 1, 0], dtype=C128)
    y = transmit([e1, e1], [1, 1j], Rng(0), noise=False)
    assert torch.allclose(y, torch.tensor([1 + 1j, 0, 0], dtype=C128))
    y = transmit([e1, e2], [2, -1], Rng(0), noise=False)
    assert torch.allclose(y, torch.tensor([2, -1, 0], dtype=C128))


def test_transmit_adds_unit_noise():
    x = torch.zeros(50_000, dtype=C128)
    y = transmit([x, x], [1, 1], Rng(5))
    assert mean_power(y) == pytest.approx(1.0, rel=0.03)
    again = transmit([x, x], [1, 1], Rng(5))
    assert torch.equal(y, again)


def test_transmit_power_constraint():
    loud = torch.full((10,), 2.0, dtype=C128)
    quiet = torch.full((10,), 1.0, dtype=C128)
    with pytest.raises(PowerConstraintError):
        transmit([loud, quiet], [1, 1], Rng(0), power_limit=2.0)
    transmit([quiet, quiet], [1, 1], Rng(0), power_limit=1.0)
    transmit([quiet * 1.004, quiet], [1, 1], Rng(0), power_limit=1.0)


def test_transmit_validation():
    x = torch.zeros(3, dtype=C128)
    with pytest.raises(InvalidArgumentError):
        transmit([], [], Rng(0))
    with pytest.raises(InvalidArgumentError):
        transmit([x, x], [1], Rng(0))
    with pytest.raises(InvalidArgumentError):
        transmit([x, torch.zeros(4, dtype=C128)], [1, 1], Rng(0))
