import pytest

from app.errors import CapacityError, GaussianDivisionByZero, InvalidArgumentError
from app.gint import (
    I,
    ONE,
    ZERO,
    GaussInt,
    canonical,
    factor,
    gcd,
    gdivmod,
    is_prime,
    norm,
    residue_key,
    residues,
    round_complex,
    unit_of,
)


def test_norm_and_arithmetic():
    a, b = GaussInt(3, 4), GaussInt(1, -2)
    assert norm(a) == 25
    assert a + b == GaussInt(4, 2)
    assert a - b == GaussInt(2, 6)
    assert a * b == GaussInt(11, -2)
    assert I * I == GaussInt(-1, 0)
    assert GaussInt(1, 1) ** 4 == GaussInt(-4, 0)
    assert 2 * a == GaussInt(6, 8)


def test_divmod_example():
    assert divmod(GaussInt(5, 3), GaussInt(1, 1)) == (GaussInt(4, -1), ZERO)


def test_divmod_remainder_is_small(random_gint):
    for _ in range(500):
        a, b = random_gint(50), random_gint(12)
        if not b:
            continue
        q, r = gdivmod(a, b)
        assert q * b + r == a
        assert 2 * norm(r) <= norm(b)


def test_divide_by_zero():
    with pytest.raises(GaussianDivisionByZero):
        divmod(GaussInt(1, 1), ZERO)
    with pytest.raises(ZeroDivisionError):
        GaussInt(2, 0) // ZERO


def test_gcd(random_gint):
    assert gcd(5, GaussInt(2, 1)) == GaussInt(2, 1)
    assert gcd(3, GaussInt(1, 1)) == ONE
    for _ in range(200):
        a, b = random_gint(), random_gint()
        if not a and not b:
            continue
        g = gcd(a, b)
        assert g.divides(a) and g.divides(b)
        assert canonical(g) == g
    with pytest.raises(InvalidArgumentError):
        gcd(0, 0)


def test_canonical_and_units():
    g = GaussInt(-2, -1)
    assert canonical(g) == GaussInt(2, 1)
    assert unit_of(g) * canonical(g) == g
    assert canonical(GaussInt(0, 3)) == GaussInt(3, 0)


@pytest.mark.parametrize(
    "g, expected",
    [
        (GaussInt(3, 0), True),
        (GaussInt(0, 3), True),
        (GaussInt(7, 0), True),
        (GaussInt(2, 1), True),
        (GaussInt(1, 1), True),
        (GaussInt(5, 0), False),
        (GaussInt(2, 0), False),
        (GaussInt(1, 0), False),
        (GaussInt(0, 0), False),
    ],
)
def test_is_prime(g, expected):
    assert is_prime(g) is expected


def test_factor_two():
    assert factor(2) == (GaussInt(0, -1), [(GaussInt(1, 1), 2)])


def test_factor_five_splits():
    unit, factors = factor(5)
    assert [p for p, _ in factors] == [GaussInt(1, 2), GaussInt(2, 1)]
    assert unit == GaussInt(0, -1)


def test_factor_reconstructs(random_gint):
    for _ in range(200):
        g = random_gint(40)
        if not g:
            continue
        unit, factors = factor(g)
        assert unit.is_unit()
        product = unit
        for p, e in factors:
            assert is_prime(p)
            assert canonical(p) == p
            product = product * p**e
        assert product == g


def test_factor_bounds():
    with pytest.raises(CapacityError):
        factor(GaussInt(1001, 0))
    with pytest.raises(InvalidArgumentError):
        factor(0)


@pytest.mark.parametrize("d", [GaussInt(3, 0), GaussInt(2, 1), GaussInt(1, 1), GaussInt(4, 6)])
def test_residue_system(d, random_gint):
    reps = residues(d)
    assert len(reps) == norm(d)
    assert len({residue_key(r, d) for r in reps}) == norm(d)
    for _ in range(100):
        a = random_gint(30)
        key = residue_key(a, d)
        assert key in reps
        assert d.divides(a - key)


def test_round_complex_and_str():
    assert round_complex(0.4 + 0.6j) == GaussInt(0, 1)
    assert round_complex(-1.2 - 2.5j) == GaussInt(-1, -2)
    assert str(GaussInt(1, -2)) == "1-2i"
    assert str(GaussInt(0, 2)) == "2i"
    assert str(GaussInt(3, 0)) == "3"
