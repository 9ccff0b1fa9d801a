"""Binary BCH codes: systematic encoder and bounded-radius decoder.

Bit conventions
---------------
A codeword is a length-n uint8 array ``c`` where ``c[i]`` is the coefficient
of x^(n-1-i).  Systematic encoding places the k message bits in ``c[:k]``,
so message recovery is a slice.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .gf import FieldGF2m


class ContractError(ValueError):
    """Raised when an operation precondition is violated."""


# Named instances: (n, k, t) -> extension degree m.  All are narrow-sense
# codes with designed distance 2t+1.
NAMED_CODES = {
    (15, 5, 3): 4,
    (31, 6, 7): 5,
    (31, 16, 3): 5,
    (63, 7, 15): 6,
    (63, 45, 3): 6,
    (127, 92, 5): 7,
}

_code_cache: dict[tuple[int, int, int], "BchCode"] = {}


def _cyclotomic_closure(n: int, powers: range) -> set[int]:
    closure: set[int] = set()
    for i in powers:
        c = i % n
        while c not in closure:
            closure.add(c)
            c = (2 * c) % n
    return closure


def _generator_poly(fld: FieldGF2m, n: int, t: int) -> int:
    """Generator of the narrow-sense BCH code with designed distance 2t+1.

    Returns the polynomial as an int bitmask (bit d = coefficient of x^d).
    """
    roots = _cyclotomic_closure(n, range(1, 2 * t + 1))
    g = [1]  # ascending coefficients over GF(2^m)
    for r in sorted(roots):
        a = fld.alpha_pow(r)
        # g(x) *= (x + alpha^r)
        nxt = [0] * (len(g) + 1)
        for i, c in enumerate(g):
            nxt[i] ^= fld.mul(c, a)
            nxt[i + 1] ^= c
        g = nxt
    mask = 0
    for d, c in enumerate(g):
        if c not in (0, 1):
            raise AssertionError("generator polynomial not binary")
        if c:
            mask |= 1 << d
    return mask


def _poly_mod(value: int, divisor: int, divisor_deg: int) -> int:
    deg = value.bit_length() - 1
    while deg >= divisor_deg:
        value ^= divisor << (deg - divisor_deg)
        deg = value.bit_length() - 1
    return value


@dataclass(frozen=True)
class BchCode:
    n: int
    k: int
    t: int
    m: int
    generator: int                       # bitmask, degree n-k
    fld: FieldGF2m = dc_field(repr=False)
    _synd_mat: np.ndarray = dc_field(repr=False)   # (2t, n) alpha^{i*(n-1-pos)}
    _chien_exp: np.ndarray = dc_field(repr=False)  # (n,) exponents -j mod period

    @property
    def d_min(self) -> int:
        return 2 * self.t + 1

    @staticmethod
    def make(n: int, k: int, t: int) -> "BchCode":
        key = (n, k, t)
        if key in _code_cache:
            return _code_cache[key]
        if key not in NAMED_CODES:
            raise ValueError(f"unknown code instance {key}; "
                             f"supported: {sorted(NAMED_CODES)}")
        m = NAMED_CODES[key]
        fld = FieldGF2m(m)
        if n != (1 << m) - 1:
            raise AssertionError("code length inconsistent with field")
        gen = _generator_poly(fld, n, t)
        if gen.bit_length() - 1 != n - k:
            raise AssertionError(
                f"generator degree {gen.bit_length() - 1} != n-k for {key}")
        period = fld.period
        synd = np.zeros((2 * t, n), dtype=np.int64)
        for i in range(1, 2 * t + 1):
            for pos in range(n):
                synd[i - 1, pos] = fld.alpha_pow(i * (n - 1 - pos))
        chien = np.array([(period - j) % period for j in range(n)],
                         dtype=np.int64)
        code = BchCode(n=n, k=k, t=t, m=m, generator=gen, fld=fld,
                       _synd_mat=synd, _chien_exp=chien)
        _code_cache[key] = code
        return code

    def __hash__(self):
        return hash((self.n, self.k, self.t))

    def __eq__(self, other):
        return isinstance(other, BchCode) and \
            (self.n, self.k, self.t) == (other.n, other.k, other.t)


def bits_to_int(bits: np.ndarray) -> int:
    """Pack a bit array, bits[0] most significant."""
    out = 0
    for b in np.asarray(bits, dtype=np.uint8):
        out = (out << 1) | int(b)
    return out


def int_to_bits(value: int, width: int) -> np.ndarray:
    out = np.zeros(width, dtype=np.uint8)
    for i in range(width - 1, -1, -1):
        out[i] = value & 1
        value >>= 1
    return out


def encode(code: BchCode, msg: np.ndarray) -> np.ndarray:
    """Systematic encoding; message bits end up in codeword[:k]."""
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape != (code.k,):
        raise ContractError(f"message must have length {code.k}")
    shifted = bits_to_int(msg) << (code.n - code.k)
    rem = _poly_mod(shifted, code.generator, code.n - code.k)
    return int_to_bits(shifted ^ rem, code.n)


def syndromes(code: BchCode, received: np.ndarray) -> np.ndarray:
    ones = np.flatnonzero(received)
    if ones.size == 0:
        return np.zeros(2 * code.t, dtype=np.int64)
    return np.bitwise_xor.reduce(code._synd_mat[:, ones], axis=1)


def is_codeword(code: BchCode, bits: np.ndarray) -> bool:
    bits = np.asarray(bits, dtype=np.uint8)
    return bits.shape == (code.n,) and not syndromes(code, bits).any()


def message_of(code: BchCode, cw: np.ndarray) -> np.ndarray:
    cw = np.asarray(cw, dtype=np.uint8)
    if not is_codeword(code, cw):
        raise ContractError("input is not a codeword")
    return cw[:code.k].copy()


def _berlekamp_massey(fld: FieldGF2m, synd: list[int]) -> tuple[list[int], int]:
    """Error-locator polynomial (ascending coefficients) and LFSR length."""
    C = [1]
    B = [1]
    L = 0
    shift = 1
    b = 1
    for N in range(len(synd)):
        d = synd[N]
        for i in range(1, L + 1):
            if i < len(C) and C[i] and synd[N - i]:
                d ^= fld.mul(C[i], synd[N - i])
        if d == 0:
            shift += 1
            continue
        coef = fld.mul(d, fld.inv(b))
        update_from = C[:]
        need = shift + len(B)
        if len(C) < need:
            C = C + [0] * (need - len(C))
        for i, bi in enumerate(B):
            if bi:
                C[i + shift] ^= fld.mul(coef, bi)
        if 2 * L <= N:
            L = N + 1 - L
            B = update_from
            b = d
            shift = 1
        else:
            shift += 1
    return C, L


def safe_decode(code: BchCode, received: np.ndarray):
    """Bounded-radius decoding.

    Returns (codeword, distance) when a codeword lies within Hamming
    distance t of the input, otherwise None.  Never corrects beyond t.
    """
    received = np.asarray(received, dtype=np.uint8)
    if received.shape != (code.n,):
        raise ContractError(f"received word must have length {code.n}")
    synd = syndromes(code, received)
    if not synd.any():
        return received.copy(), 0

    fld = code.fld
    C, L = _berlekamp_massey(fld, synd.tolist())
    if L > code.t:
        return None
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    if len(C) - 1 != L:
        # locator degree disagrees with LFSR length: > t errors
        return None

    # Chien search over all n positions, vectorized through the log table
    exp = code.fld.exp
    period = fld.period
    vals = np.full(code.n, C[0], dtype=np.int64)
    log_l = fld._log_l
    for l in range(1, L + 1):
        if C[l]:
            idx = (log_l[C[l]] + code._chien_exp * l) % period
            vals ^= exp[idx]
    root_j = np.flatnonzero(vals == 0)
    if root_j.size != L:
        return None
    corrected = received.copy()
    corrected[code.n - 1 - root_j] ^= 1
    if syndromes(code, corrected).any():
        return None
    return corrected, L


def max_weight_codeword(code: BchCode) -> np.ndarray:
    """Codeword of maximal Hamming weight; ties go to the smallest message.

    Narrow-sense BCH generators have g(1)=1, so the all-ones vector is
    always a codeword and wins outright at weight n.
    """
    ones = np.ones(code.n, dtype=np.uint8)
    if is_codeword(code, ones):
        return ones
    if code.k > 20:
        raise NotImplementedError("exhaustive weight scan infeasible")
    best = None
    best_w = -1
    for v in range(1 << code.k):
        cw = encode(code, int_to_bits(v, code.k))
        w = int(cw.sum())
        if w > best_w:
            best, best_w = cw, w
    return best


def all_codewords(code: BchCode) -> np.ndarray:
    """(2^k, n) matrix of every codeword; only sensible for small k."""
    if code.k > 16:
        raise ValueError("too many codewords to enumerate")
    return np.stack([encode(code, int_to_bits(v, code.k))
                     for v in range(1 << code.k)])
