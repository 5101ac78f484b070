import itertools

import pytest
import torch

from app.errors import CapacityError, InvalidArgumentError
from app.ffield import elements, sigma_vec
from app.lattice import index, is_vector_space, phi
from app.sigcode import (
    SignalCode,
    all_codewords,
    encode_th,
    encode_th_with_coeffs,
    generator_matrix,
    partition,
    stack_decode,
    terminated_generator,
)

C128 = torch.complex128


def decoded_message(result, code):
    return sigma_vec(result.coeffs, code.field)


def test_generator_shapes(make_code):
    code = make_code(3)
    G = generator_matrix(code)
    assert G.shape == (3, 5)
    assert torch.allclose(G[0], torch.tensor([1, *code.taps, 0, 0], dtype=C128))
    assert torch.allclose(G[2, :2], torch.zeros(2, dtype=C128))
    G_ext = terminated_generator(code)
    assert G_ext.shape == (5, 5)
    assert G_ext[3, 3] == 3 and G_ext[4, 4] == 3


@pytest.mark.parametrize(
    "taps, k, p",
    [((), 3, 3), ((0.5,), 0, 3), ((0.5,), 3, 5), ((0.5,), 3, 9), ((complex("inf"),), 3, 3)],
)
def test_signal_code_validation(taps, k, p):
    with pytest.raises(InvalidArgumentError):
        SignalCode(taps, k, p)


def test_partition_is_a_vector_space(make_code, relay_code):
    code = make_code(4)
    assert is_vector_space(partition(code)) == (9, 4)
    assert index(partition(code)) == 9**4
    assert is_vector_space(partition(relay_code)) == (9, 100)


def test_zero_message_encodes_to_zero(make_code):
    code = make_code(5)
    zero = tuple(code.field.zero() for _ in range(5))
    assert torch.equal(encode_th(zero, code), torch.zeros(7, dtype=C128))


def test_encoder_output_lies_in_the_box(relay_code, random_message):
    for _ in range(10):
        x = encode_th(random_message(relay_code.field, relay_code.k), relay_code)
        assert x.shape == (102,)
        assert bool((x.real >= -1.5).all()) and bool((x.real < 1.5).all())
        assert bool((x.imag >= -1.5).all()) and bool((x.imag < 1.5).all())


def test_encoder_output_is_a_lattice_point_carrying_the_message(make_code, random_message):
    code = make_code(6)
    p = partition(code)
    gen = torch.Generator().manual_seed(3)
    for _ in range(20):
        w = random_message(code.field, 6)
        x, coeffs = encode_th_with_coeffs(w, code)
        assert torch.allclose(p.fine.point(coeffs), x, atol=1e-9)
        assert phi(x, p) == w

        dither = 3 * (torch.rand(code.n, dtype=C128, generator=gen) - (0.5 + 0.5j))
        xd = encode_th(w, code, dither)
        assert p.fine.contains(xd - dither)
        assert phi(xd - dither, p) == w


def test_encoder_rejects_bad_messages(make_code, f9):
    code = make_code(3)
    with pytest.raises(InvalidArgumentError):
        encode_th((f9.zero(),) * 2, code)
    with pytest.raises(InvalidArgumentError):
        encode_th((f9.zero(),) * 3, code, dither=torch.zeros(4, dtype=C128))


def test_noiseless_decode_is_exhaustively_correct(make_code):
    code = make_code(3)
    for w in itertools.product(elements(code.field), repeat=3):
        result = stack_decode(encode_th(w, code), code)
        assert decoded_message(result, code) == w
        assert not result.budget_limited
        assert result.metric == pytest.approx(0.0, abs=1e-9)


def test_noiseless_decode_long_code(relay_code, random_message):
    for _ in range(5):
        w = random_message(relay_code.field, relay_code.k)
        result = stack_decode(encode_th(w, relay_code), relay_code)
        assert decoded_message(result, relay_code) == w
        assert len(result.tail) == relay_code.m
        assert len(result.full_coeffs()) == relay_code.n


def test_stack_decoder_matches_ml(make_code):
    code = make_code(4)
    messages, X = all_codewords(code)
    gen = torch.Generator().manual_seed(11)
    noise_var = 0.01
    trials, agree = 1000, 0
    for _ in range(trials):
        t = int(torch.randint(len(messages), (1,), generator=gen))
        y = X[t] + noise_var**0.5 * torch.randn(code.n, dtype=C128, generator=gen)
        # nearest codeword modulo the coarse lattice 3 Z[i]^n
        diff = y.unsqueeze(0) - X
        wrapped = diff - 3 * torch.complex(torch.round(diff.real / 3), torch.round(diff.imag / 3))
        ml = int(wrapped.abs().pow(2).sum(dim=1).argmin())
        result = stack_decode(y, code, noise_var=noise_var)
        agree += decoded_message(result, code) == messages[ml]
    assert agree / trials >= 0.99


def test_decoding_errors_do_not_grow_with_snr(make_code, random_message):
    code = make_code(8)
    gen = torch.Generator().manual_seed(21)
    trials = 200
    packets = []
    for _ in range(trials):
        w = random_message(code.field, code.k)
        packets.append((w, encode_th(w, code), torch.randn(code.n, dtype=C128, generator=gen)))

    errors = []
    for noise_var in (1.0, 0.5, 0.25, 0.1):
        wrong = 0
        for w, x, z in packets:
            y = x + noise_var**0.5 * z
            result = stack_decode(y, code, noise_var=noise_var, bias=1.0, max_expansions=1000)
            wrong += decoded_message(result, code) != w
        errors.append(wrong)
    slack = trials // 50
    assert all(lower <= higher + slack for higher, lower in zip(errors, errors[1:]))
    assert errors[0] > errors[-1]


def test_all_codewords_bound(make_code):
    with pytest.raises(CapacityError):
        all_codewords(make_code(5))


def test_budget_limited_decode(make_code, random_message):
    code = make_code(8)
    w = random_message(code.field, 8)
    y = encode_th(w, code) + 0.3
    result = stack_decode(y, code, max_expansions=1)
    assert result.budget_limited
    assert len(result.coeffs) == 8
    assert len(result.tail) == code.m


def test_stack_decode_rejects_bad_input(make_code):
    code = make_code(3)
    with pytest.raises(InvalidArgumentError):
        stack_decode(torch.zeros(4, dtype=C128), code)
    with pytest.raises(InvalidArgumentError):
        stack_decode(torch.zeros(5, dtype=C128), code, noise_var=0.0)
