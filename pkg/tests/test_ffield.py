import pytest

from app.errors import GaussianDivisionByZero, InvalidArgumentError, RankDeficientError
from app.ffield import (
    FieldSpec,
    combine,
    elements,
    sigma,
    sigma_inv,
    sigma_vec,
    solve_linear,
)
from app.gint import I, GaussInt


@pytest.mark.parametrize(
    "pi, q, inert",
    [
        (GaussInt(3, 0), 9, True),
        (GaussInt(0, 3), 9, True),
        (GaussInt(7, 0), 49, True),
        (GaussInt(2, 1), 5, False),
        (GaussInt(3, 2), 13, False),
    ],
)
def test_field_sizes(pi, q, inert):
    spec = FieldSpec(pi)
    assert spec.q == q
    assert spec.inert is inert
    assert len({e.rep for e in elements(spec)}) == q


@pytest.mark.parametrize("pi", [GaussInt(5, 0), GaussInt(1, 1), GaussInt(2, 0), GaussInt(1, 0)])
def test_rejects_non_field_moduli(pi):
    with pytest.raises(InvalidArgumentError):
        FieldSpec(pi)


def test_inert_reduction_is_centred(f9):
    assert sigma(GaussInt(4, -5), f9).rep == GaussInt(1, 1)
    assert sigma(GaussInt(3, 3), f9).rep == GaussInt(0, 0)
    assert sigma(GaussInt(2, 0), f9).rep == GaussInt(-1, 0)


@pytest.mark.parametrize("pi", [GaussInt(3, 0), GaussInt(2, 1), GaussInt(7, 0)])
def test_sigma_is_a_ring_homomorphism(pi, random_gint):
    spec = FieldSpec(pi)
    for _ in range(200):
        a, b = random_gint(40), random_gint(40)
        assert sigma(a + b, spec) == sigma(a, spec) + sigma(b, spec)
        assert sigma(a * b, spec) == sigma(a, spec) * sigma(b, spec)
        assert sigma(sigma_inv(sigma(a, spec)), spec) == sigma(a, spec)
        assert pi.divides(a - sigma_inv(sigma(a, spec)))


@pytest.mark.parametrize("pi", [GaussInt(3, 0), GaussInt(2, 1)])
def test_every_nonzero_element_has_an_inverse(pi):
    spec = FieldSpec(pi)
    for e in elements(spec):
        if not e:
            with pytest.raises(GaussianDivisionByZero):
                e.inv()
            continue
        assert e * e.inv() == spec.one()


def test_split_prime_square_root_of_minus_one():
    spec = FieldSpec(GaussInt(2, 1))
    assert sigma(I, spec) * sigma(I, spec) == -spec.one()
    assert all(not e.rep.im or e.rep.norm() <= 2 for e in elements(spec))


def test_mixing_fields_is_rejected(f9):
    f5 = FieldSpec(GaussInt(2, 1))
    with pytest.raises(InvalidArgumentError):
        f9.one() + f5.one()


def test_solve_linear(f9, random_message):
    w1, w2 = random_message(f9, 6), random_message(f9, 6)
    A = [
        list(sigma_vec([GaussInt(1, 1), GaussInt(0, 1)], f9)),
        list(sigma_vec([GaussInt(1, 0), GaussInt(1, -1)], f9)),
    ]
    b = [combine(A[0], [w1, w2]), combine(A[1], [w1, w2])]
    x = solve_linear(A, b)
    assert x == [w1, w2]


def test_solve_linear_singular(f9, random_message):
    w = random_message(f9, 3)
    row = list(sigma_vec([1, GaussInt(0, 1)], f9))
    with pytest.raises(RankDeficientError):
        solve_linear([row, row], [w, w])
