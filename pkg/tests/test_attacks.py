"""Attack channel behavior."""
import numpy as np
import pytest

from blockmark.attacks import (AttackSpec, ConfigurationError, attack,
                               delete_prefix, insert_prefix)
from blockmark.bch import BchCode, ContractError, int_to_bits
from blockmark.detector import extract_bits
from blockmark.generation import EmbedConfig, TokenSequence, UniformSource, \
    embed
from blockmark.keying import SecretKey

KEY = SecretKey(bytes(range(32)))
CODE = BchCode.make(31, 6, 7)


def _seq(n_tokens=500, seed=3):
    rng = np.random.default_rng(seed)
    return TokenSequence(rng.integers(0, 256, n_tokens), 256)


def test_spec_contracts():
    with pytest.raises(ContractError):
        AttackSpec("scramble", 0.1)
    with pytest.raises(ContractError):
        AttackSpec("substitute", 1.5)


def test_rate_zero_is_identity():
    seq = _seq()
    for kind in ("substitute", "delete", "insert"):
        out = attack(seq, AttackSpec(kind, 0.0, 1))
        assert np.array_equal(out.tokens, seq.tokens)


def test_substitute_changes_expected_fraction():
    seq = _seq(20000)
    out = attack(seq, AttackSpec("substitute", 0.2, 1))
    assert len(out) == len(seq)
    changed = float(np.mean(out.tokens != seq.tokens))
    # hit rate 0.2, minus collisions where the random draw equals the original
    expected = 0.2 * (1 - 1 / 256)
    assert abs(changed - expected) < 0.02


def test_delete_and_insert_lengths():
    seq = _seq(20000)
    deleted = attack(seq, AttackSpec("delete", 0.1, 2))
    inserted = attack(seq, AttackSpec("insert", 0.1, 2))
    assert abs(len(deleted) - 18000) < 300
    assert abs(len(inserted) - 22000) < 300


def test_insert_preserves_original_subsequence():
    seq = _seq(200)
    out = attack(seq, AttackSpec("insert", 0.3, 5))
    # original tokens must appear in order within the attacked stream
    it = iter(out.tokens.tolist())
    assert all(tok in it for tok in seq.tokens.tolist())


def test_bitflip_requires_key_material():
    with pytest.raises(ConfigurationError):
        attack(_seq(), AttackSpec("bitflip", 0.1, 1))


def test_bitflip_flips_extracted_bits_at_rate():
    cfg = EmbedConfig(code=CODE, delta=0.0, scheme="hard", token_count=3100,
                      rng_seed=11)
    seq = embed(UniformSource(512), KEY, int_to_bits(9, 6), cfg)
    clean = extract_bits(seq, KEY, CODE.n, CODE.k, 0).bits
    out = attack(seq, AttackSpec("bitflip", 0.1, 4), key=KEY, n=CODE.n,
                 k=CODE.k)
    dirty = extract_bits(out, KEY, CODE.n, CODE.k, 0).bits
    flip_rate = float(np.mean(clean != dirty))
    se = (0.1 * 0.9 / 3100) ** 0.5
    assert abs(flip_rate - 0.1) <= 3.5 * se


def test_substitute_halves_to_bit_error_rate():
    """A uniform replacement keeps its keyed bit with probability ~1/2, so
    token substitution at rate p induces a bit error rate of ~p/2."""
    cfg = EmbedConfig(code=CODE, delta=0.0, scheme="hard",
                      token_count=100000, rng_seed=13)
    seq = embed(UniformSource(1024), KEY, int_to_bits(9, 6), cfg)
    clean = extract_bits(seq, KEY, CODE.n, CODE.k, 0).bits
    out = attack(seq, AttackSpec("substitute", 0.2, 7))
    dirty = extract_bits(out, KEY, CODE.n, CODE.k, 0).bits
    rate = float(np.mean(clean != dirty))
    se = (0.1 * 0.9 / 100000) ** 0.5
    assert abs(rate - 0.1) <= 3 * se


def test_prefix_helpers_shift_stream():
    seq = _seq(100)
    ins = insert_prefix(seq, 4, rng_seed=1)
    assert len(ins) == 104
    assert np.array_equal(ins.tokens[4:], seq.tokens)
    dele = delete_prefix(seq, 4)
    assert len(dele) == 96
    assert np.array_equal(dele.tokens, seq.tokens[4:])
    assert np.array_equal(insert_prefix(seq, 0).tokens, seq.tokens)


def test_attacks_are_deterministic():
    seq = _seq()
    a = attack(seq, AttackSpec("substitute", 0.3, 9))
    b = attack(seq, AttackSpec("substitute", 0.3, 9))
    assert np.array_equal(a.tokens, b.tokens)
