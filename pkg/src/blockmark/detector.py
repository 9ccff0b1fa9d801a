"""Two-stage detection: bit-stream extraction with alignment offsets,
blind per-block voting, and designated-codeword verification over a
sliding window of linear shifts.  Includes the naive any-codeword
baseline.

Offset sign convention
----------------------
``extract_bits`` with offset s maps the token at post-prompt position idx
to stream position idx - s.  Prepending r tokens is therefore undone by
s = +r and deleting the first r tokens by s = -r; ``detect`` reports that
recovering offset as ``best_offset``.  Stream positions that no token
maps to (idx - s < 0, or the leading hole when s < 0) are skipped or
zero-filled respectively.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bch import BchCode, ContractError, bits_to_int, int_to_bits, message_of, \
    safe_decode
from .generation import TokenSequence
from .keying import SecretKey, derive_block_key, partition_bits, plan_block

MODES = ("designated_only", "shift_only", "both", "naive")


@dataclass
class BitStream:
    bits: np.ndarray
    offset: int


@dataclass
class DetectConfig:
    code: BchCode
    key: SecretKey
    s_max: int = 0
    tau: int = 1
    mode: str = "both"
    diverse: bool = False
    prompt_len: int = 0

    def __post_init__(self):
        if self.tau < 1:
            raise ContractError("tau must be >= 1")
        if not 0 <= self.s_max <= self.code.n:
            raise ContractError("s_max must lie in [0, n]")
        if self.mode not in MODES:
            raise ContractError(f"unknown mode {self.mode!r}")


@dataclass
class BlockResult:
    matched: bool
    distance: int | None
    offset: int


@dataclass
class DetectionReport:
    is_wm: bool
    payload: np.ndarray | None
    best_offset: int
    matched: int
    block_count: int
    per_block: list = field(default_factory=list)
    score: float = 0.0
    diagnostic: str = ""


def extract_bits(seq: TokenSequence, key: SecretKey, n: int, k: int,
                 offset: int = 0, prompt_len: int = 0) -> BitStream:
    """Keyed binary projection of a token sequence at a given alignment."""
    if abs(offset) > n:
        raise ContractError("offset magnitude must be <= n")
    toks = seq.tokens[prompt_len:]
    T = len(toks)
    if T - offset <= 0:
        return BitStream(np.zeros(0, dtype=np.uint8), offset)
    U = T - offset          # highest stream position + 1
    bits = np.zeros(U, dtype=np.uint8)
    pos = np.arange(T) - offset
    keep = pos >= 0
    pos = pos[keep]
    kept = toks[keep]
    blocks = pos // n
    for j in np.unique(blocks):
        part = partition_bits(derive_block_key(key, int(j), k),
                              seq.vocab_size)
        sel = blocks == j
        bits[pos[sel]] = part[kept[sel]]
    return BitStream(bits, offset)


def _decode_blocks(code: BchCode, bits: np.ndarray):
    M = len(bits) // code.n
    return [safe_decode(code, bits[j * code.n:(j + 1) * code.n])
            for j in range(M)]


def stage1_vote(stream: BitStream, code: BchCode, key: SecretKey,
                diverse: bool = False, _decoded=None):
    """Blind payload estimation by majority vote over decodable blocks.

    Returns (message or None, vote table keyed by message int).  Ties go
    to the smallest message value.
    """
    decoded = _decoded if _decoded is not None else \
        _decode_blocks(code, stream.bits)
    votes: dict[int, int] = {}
    c_max = None
    for j, dec in enumerate(decoded):
        if dec is None:
            continue
        cw = dec[0]
        r = derive_block_key(key, j, code.k).randomizer
        cands = [message_of(code, cw) ^ r]
        if diverse:
            if c_max is None:
                from .bch import max_weight_codeword
                c_max = max_weight_codeword(code)
            alt = cw ^ c_max
            if alt.any():
                cands.append(message_of(code, alt) ^ r)
        for cand in cands:
            key_int = bits_to_int(cand)
            votes[key_int] = votes.get(key_int, 0) + 1
    if not votes:
        return None, votes
    best = min(votes, key=lambda v: (-votes[v], v))
    return int_to_bits(best, code.k), votes


def _offset_order(s_max: int):
    yield 0
    for s in range(1, s_max + 1):
        yield -s
        yield s


def detect(seq: TokenSequence, cfg: DetectConfig) -> DetectionReport:
    """Algorithmic core: per candidate offset, vote a payload, rebuild the
    designated codewords, and count exact designated matches; keep the
    offset with the strictly best matched ratio (search order 0, -1, +1,
    -2, +2, ...)."""
    code = cfg.code
    offsets = [0] if cfg.mode in ("designated_only", "naive") \
        else list(_offset_order(cfg.s_max))

    best = None   # (score, matched, offset, payload, per_block, M)
    for s in offsets:
        stream = extract_bits(seq, cfg.key, code.n, code.k, s,
                              cfg.prompt_len)
        M = len(stream.bits) // code.n
        if M == 0:
            continue
        decoded = _decode_blocks(code, stream.bits)
        payload, _votes = stage1_vote(stream, code, cfg.key,
                                      diverse=cfg.diverse, _decoded=decoded)

        per_block = []
        matched = 0
        if cfg.mode in ("naive", "shift_only"):
            for dec in decoded:
                ok = dec is not None
                per_block.append(BlockResult(ok, dec[1] if ok else None, s))
                matched += ok
        else:
            plans = None
            if payload is not None:
                plans = [plan_block(cfg.key, j, payload, code,
                                    "diverse" if cfg.diverse else "payload")
                         for j in range(M)]
            for j, dec in enumerate(decoded):
                ok = (dec is not None and plans is not None
                      and plans[j].matches(dec[0]))
                per_block.append(BlockResult(bool(ok),
                                             dec[1] if dec else None, s))
                matched += ok

        score = matched / M
        if best is None or score > best[0]:
            best = (score, matched, s, payload, per_block, M)

    if best is None:
        return DetectionReport(False, None, 0, 0, 0,
                               diagnostic="text shorter than one block")

    score, matched, s, payload, per_block, M = best
    is_wm = matched >= cfg.tau
    return DetectionReport(is_wm=is_wm,
                           payload=payload if is_wm else None,
                           best_offset=s, matched=matched, block_count=M,
                           per_block=per_block, score=score)
