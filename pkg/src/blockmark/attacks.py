"""Token-level attack channels: substitution, deletion-like, insertion-like,
and the keyed bit-flip channel used for theory validation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bch import ContractError
from .generation import TokenSequence
from .keying import SecretKey, derive_block_key, partition_bits

KINDS = ("substitute", "delete", "insert", "bitflip")


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    rate: float
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown attack kind {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ContractError("rate must lie in [0, 1]")


def attack(seq: TokenSequence, spec: AttackSpec, key: SecretKey | None = None,
           n: int | None = None, k: int | None = None) -> TokenSequence:
    """Apply an attack channel; per-position decisions are independent
    Bernoulli(rate) draws.

    bitflip replaces each hit token with a uniform token from the opposite
    keyed list of its block, which needs (key, n, k).
    """
    rng = np.random.default_rng(spec.rng_seed)
    toks = seq.tokens
    V = seq.vocab_size

    if spec.kind == "substitute":
        hit = rng.random(len(toks)) < spec.rate
        out = toks.copy()
        out[hit] = rng.integers(0, V, size=int(hit.sum()))
        return TokenSequence(out, V, meta=dict(seq.meta))

    if spec.kind == "delete":
        keep = rng.random(len(toks)) >= spec.rate
        return TokenSequence(toks[keep], V, meta=dict(seq.meta))

    if spec.kind == "insert":
        hit = rng.random(len(toks)) < spec.rate
        extra = rng.integers(0, V, size=int(hit.sum()))
        out = []
        e = 0
        for i, tok in enumerate(toks):
            out.append(tok)
            if hit[i]:
                out.append(extra[e])
                e += 1
        return TokenSequence(np.array(out, dtype=np.int64), V,
                             meta=dict(seq.meta))

    # bitflip
    if key is None or n is None or k is None:
        raise ConfigurationError("bitflip channel requires key, n and k")
    hit = rng.random(len(toks)) < spec.rate
    out = toks.copy()
    for idx in np.flatnonzero(hit):
        j = idx // n
        part = partition_bits(derive_block_key(key, int(j), k), V)
        opposite = np.flatnonzero(part != part[toks[idx]])
        out[idx] = opposite[rng.integers(0, len(opposite))]
    return TokenSequence(out, V, meta=dict(seq.meta))


def insert_prefix(seq: TokenSequence, r: int, rng_seed: int = 0) -> TokenSequence:
    """Prepend r uniform random tokens: a deterministic +r stream shift."""
    if r == 0:
        return TokenSequence(seq.tokens.copy(), seq.vocab_size,
                             meta=dict(seq.meta))
    rng = np.random.default_rng(rng_seed)
    prefix = rng.integers(0, seq.vocab_size, size=r)
    return TokenSequence(np.concatenate([prefix, seq.tokens]),
                         seq.vocab_size, meta=dict(seq.meta))


def delete_prefix(seq: TokenSequence, r: int) -> TokenSequence:
    """Drop the first r tokens: a deterministic -r stream shift."""
    return TokenSequence(seq.tokens[r:].copy(), seq.vocab_size,
                         meta=dict(seq.meta))
