"""Keyed pseudorandom material: block seeds, vocabulary partitions,
randomizer masks, and per-block codeword plans.

All derivations are SHA-256 with single-byte domain separators:
0x01 block seed, 0x02 token bit, 0x03 randomizer, 0x04 diverse choice.
Integers are hashed little-endian (LE64 block index, LE32 token id).
Everything is bit-exact across runs and platforms.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bch import BchCode, ContractError, encode, max_weight_codeword

KEY_LEN = 32

_LE64 = struct.Struct("<Q").pack
_LE32 = struct.Struct("<I").pack


@dataclass(frozen=True)
class SecretKey:
    key_bytes: bytes

    def __post_init__(self):
        if len(self.key_bytes) != KEY_LEN:
            raise ContractError(f"secret key must be {KEY_LEN} bytes")

    @staticmethod
    def from_hex(text: str) -> "SecretKey":
        return SecretKey(bytes.fromhex(text.strip()))

    def to_hex(self) -> str:
        return self.key_bytes.hex()


@dataclass(frozen=True)
class BlockKey:
    index: int
    seed: bytes              # 32 bytes
    randomizer: np.ndarray   # length-k bit mask

    def __post_init__(self):
        self.randomizer.setflags(write=False)


def _digest(*parts: bytes, digest=hashlib.sha256) -> bytes:
    return digest(b"".join(parts)).digest()


def _first_bits(data: bytes, count: int) -> np.ndarray:
    """First `count` bits of a byte string, MSB-first within each byte."""
    arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    return arr[:count].copy()


def derive_block_key(key: SecretKey, j: int, k: int,
                     digest=hashlib.sha256) -> BlockKey:
    if j < 0:
        raise ContractError("block index must be >= 0")
    seed = _digest(key.key_bytes, b"\x01", _LE64(j), digest=digest)
    randomizer = _first_bits(_digest(seed, b"\x03", digest=digest), k)
    return BlockKey(index=j, seed=seed, randomizer=randomizer)


def token_bit(bk: BlockKey, v: int, digest=hashlib.sha256) -> int:
    """Keyed bit of token v in block bk: the membership function f_j."""
    return _digest(bk.seed, b"\x02", _LE32(v), digest=digest)[0] & 1


@lru_cache(maxsize=512)
def _partition_cached(seed: bytes, vocab_size: int) -> np.ndarray:
    sha = hashlib.sha256
    prefix = seed + b"\x02"
    out = np.empty(vocab_size, dtype=np.uint8)
    pack = _LE32
    for v in range(vocab_size):
        out[v] = sha(prefix + pack(v)).digest()[0] & 1
    out.setflags(write=False)
    return out


def partition_bits(bk: BlockKey, vocab_size: int) -> np.ndarray:
    """Keyed bit per token id for the whole vocabulary (read-only array)."""
    return _partition_cached(bk.seed, vocab_size)


@dataclass(frozen=True)
class BlockPlan:
    block_index: int
    designated: tuple      # one codeword (payload mode) or a pair (diverse)
    target_bits: np.ndarray

    def matches(self, cw: np.ndarray) -> bool:
        return any(np.array_equal(cw, d) for d in self.designated)


def plan_block(key: SecretKey, j: int, payload: np.ndarray, code: BchCode,
               mode: str = "payload", randomizer=None) -> BlockPlan:
    """Designated codeword(s) and embedded bit schedule for block j.

    payload mode embeds encode(payload XOR r_j).  diverse mode pairs that
    codeword with its offset by the maximum-weight codeword and picks one
    of the two by a keyed coin; the all-zero vector is never a target.
    `randomizer` overrides r_j (test hook).
    """
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape != (code.k,):
        raise ContractError(f"payload must have length {code.k}")
    bk = derive_block_key(key, j, code.k)
    r = bk.randomizer if randomizer is None else np.asarray(randomizer,
                                                            dtype=np.uint8)
    c1 = encode(code, payload ^ r)
    if mode == "payload":
        return BlockPlan(j, (c1,), c1)
    if mode != "diverse":
        raise ContractError(f"unknown plan mode {mode!r}")
    c_max = max_weight_codeword(code)
    c2 = c1 ^ c_max
    if not c2.any():
        c2 = c1
    pick = _digest(bk.seed, b"\x04")[0] & 1
    target = (c1, c2)[pick]
    if not target.any():
        # c1 degenerate (zero): the pair partner is c_max, use it
        target = c2
    return BlockPlan(j, (c1, c2), target)
