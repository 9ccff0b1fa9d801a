"""Codec correctness, checked against brute-force oracles on the small
instance and sampled on the larger ones."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blockmark.bch import (NAMED_CODES, BchCode, ContractError, all_codewords,
                           bits_to_int, encode, int_to_bits, is_codeword,
                           max_weight_codeword, message_of, safe_decode,
                           syndromes)


@pytest.fixture(scope="module")
def small():
    return BchCode.make(15, 5, 3)


@pytest.fixture(scope="module")
def small_codewords(small):
    return all_codewords(small)


@pytest.mark.parametrize("n,k,t", sorted(NAMED_CODES))
def test_construction(n, k, t):
    code = BchCode.make(n, k, t)
    assert code.generator.bit_length() - 1 == n - k
    assert code.d_min == 2 * t + 1
    # generator has a constant term (it divides x^n - 1 and is square-free)
    assert code.generator & 1


def test_make_rejects_unknown_instance():
    with pytest.raises(ValueError):
        BchCode.make(31, 11, 5)


def test_bits_int_roundtrip():
    for v in (0, 1, 5, 31, 2 ** 10 - 1):
        assert bits_to_int(int_to_bits(v, 12)) == v
    assert int_to_bits(0b101, 3).tolist() == [1, 0, 1]


def test_systematic_property(small):
    rng = np.random.default_rng(1)
    for _ in range(50):
        msg = rng.integers(0, 2, small.k).astype(np.uint8)
        cw = encode(small, msg)
        assert np.array_equal(cw[:small.k], msg)
        assert is_codeword(small, cw)
        assert np.array_equal(message_of(small, cw), msg)


def test_linearity(small, small_codewords):
    # the codeword set is closed under XOR
    as_ints = {bits_to_int(c) for c in small_codewords}
    for a, b in itertools.product(small_codewords[:8], small_codewords[:8]):
        assert bits_to_int(a ^ b) in as_ints


def test_min_distance_small(small_codewords):
    weights = sorted(int(c.sum()) for c in small_codewords)
    assert weights[0] == 0
    assert weights[1] == 7  # minimum nonzero weight = designed distance


def test_exhaustive_oracle_small(small, small_codewords):
    """Every received word decodes to its brute-force nearest codeword when
    that lies within distance t, and to None otherwise."""
    rng = np.random.default_rng(7)
    for _ in range(400):
        word = rng.integers(0, 2, small.n).astype(np.uint8)
        dists = (small_codewords ^ word).sum(axis=1)
        best = int(dists.min())
        out = safe_decode(small, word)
        if best <= small.t:
            assert out is not None
            cw, dist = out
            assert dist == best
            assert np.array_equal(cw, small_codewords[dists.argmin()])
        else:
            assert out is None


@pytest.mark.parametrize("n,k,t", [(31, 6, 7), (31, 16, 3), (63, 7, 15),
                                   (63, 45, 3), (127, 92, 5)])
def test_decode_roundtrip_large(n, k, t):
    code = BchCode.make(n, k, t)
    rng = np.random.default_rng(n * 1000 + k)
    for _ in range(60):
        msg = rng.integers(0, 2, k).astype(np.uint8)
        cw = encode(code, msg)
        w = int(rng.integers(0, t + 1))
        err_pos = rng.choice(n, w, replace=False)
        word = cw.copy()
        word[err_pos] ^= 1
        out = safe_decode(code, word)
        assert out is not None
        assert np.array_equal(out[0], cw)
        assert out[1] == w


def test_decode_rejects_beyond_t(small, small_codewords):
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 200:
        word = rng.integers(0, 2, small.n).astype(np.uint8)
        if int((small_codewords ^ word).sum(axis=1).min()) > small.t:
            assert safe_decode(small, word) is None
            checked += 1


def test_syndromes_zero_iff_codeword(small, small_codewords):
    for cw in small_codewords:
        assert not syndromes(small, cw).any()
    flipped = small_codewords[5].copy()
    flipped[0] ^= 1
    assert syndromes(small, flipped).any()


def test_message_of_rejects_noncodeword(small):
    word = np.zeros(small.n, dtype=np.uint8)
    word[0] = 1
    with pytest.raises(ContractError):
        message_of(small, word)


def test_shape_contracts(small):
    with pytest.raises(ContractError):
        encode(small, np.zeros(small.k + 1, dtype=np.uint8))
    with pytest.raises(ContractError):
        safe_decode(small, np.zeros(small.n - 1, dtype=np.uint8))


@pytest.mark.parametrize("n,k,t", sorted(NAMED_CODES))
def test_max_weight_codeword(n, k, t):
    code = BchCode.make(n, k, t)
    cmax = max_weight_codeword(code)
    assert is_codeword(code, cmax)
    assert int(cmax.sum()) == n  # all-ones is a codeword of every instance


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 31), st.lists(st.integers(0, 30), min_size=0,
                                    max_size=7, unique=True))
def test_roundtrip_property(msg_int, err_positions):
    code = BchCode.make(31, 6, 7)
    cw = encode(code, int_to_bits(msg_int, 6))
    word = cw.copy()
    word[np.array(err_positions, dtype=np.int64)] ^= 1
    out = safe_decode(code, word)
    assert out is not None
    assert np.array_equal(out[0], cw)
    assert out[1] == len(err_positions)
