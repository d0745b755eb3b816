"""Plain 32/64-bit word semantics underneath the cipher.

Words are held as unsigned Python ints (0 <= w < 2**32).  64-bit values are
(hi, lo) word pairs in bigendian order.  Floats are their IEEE 754 encodings.
"""

from __future__ import annotations

import math
import struct

M32 = 0xFFFF_FFFF
M64 = 0xFFFF_FFFF_FFFF_FFFF


class DivideTrap(ArithmeticError):
    """Integer division or remainder with a zero divisor."""


def u32(x: int) -> int:
    return x & M32


def s32(x: int) -> int:
    x &= M32
    return x - (1 << 32) if x & 0x8000_0000 else x


def u64(x: int) -> int:
    return x & M64


def s64(x: int) -> int:
    x &= M64
    return x - (1 << 64) if x >> 63 else x


def join64(hi: int, lo: int) -> int:
    return ((hi & M32) << 32) | (lo & M32)


def split64(x: int) -> tuple[int, int]:
    x &= M64
    return x >> 32, x & M32


def f32_bits(v: float) -> int:
    try:
        return struct.unpack(">I", struct.pack(">f", v))[0]
    except OverflowError:
        return 0xFF80_0000 if v < 0 else 0x7F80_0000


def bits_f32(w: int) -> float:
    return struct.unpack(">f", struct.pack(">I", w & M32))[0]


def f64_bits(v: float) -> int:
    return struct.unpack(">Q", struct.pack(">d", v))[0]


def bits_f64(w: int) -> float:
    return struct.unpack(">d", struct.pack(">Q", w & M64))[0]


def _fdiv(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _trunc_div(a: int, b: int) -> int:
    if b == 0:
        raise DivideTrap("divide")
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _trunc_rem(a: int, b: int) -> int:
    return a - b * _trunc_div(a, b)


def round_int_to_f32(x: int) -> float:
    """Nearest float32 to an arbitrary integer (ties to even), as a Python float."""
    if x == 0:
        return 0.0
    m = abs(x)
    n = m.bit_length()
    if n > 24:
        shift = n - 24
        q, r = divmod(m, 1 << shift)
        half = 1 << (shift - 1)
        if r > half or (r == half and q & 1):
            q += 1
        m = q << shift
    return float(m) if x > 0 else -float(m)


def float_to_int(v: float, bits: int, signed: bool) -> int:
    """Truncate toward zero then wrap mod 2**bits; NaN and infinities map to 0."""
    if math.isnan(v) or math.isinf(v):
        return 0
    n = int(v) & ((1 << bits) - 1)
    if signed and n >> (bits - 1):
        n -= 1 << bits
    return n


# Binary ops on single words.  Arguments and results are unsigned words.
BINOPS32 = {
    "add": lambda a, b: (a + b) & M32,
    "sub": lambda a, b: (a - b) & M32,
    "mul": lambda a, b: (a * b) & M32,
    "div": lambda a, b: _trunc_div(s32(a), s32(b)) & M32,
    "divu": lambda a, b: (a // b) if b else _raise_div(),
    "rem": lambda a, b: _trunc_rem(s32(a), s32(b)) & M32,
    "remu": lambda a, b: (a % b) if b else _raise_div(),
    "and": lambda a, b: a & b,
    "or": lambda a, b: a | b,
    "xor": lambda a, b: a ^ b,
    "shl": lambda a, b: (a << (b & 31)) & M32,
    "shr": lambda a, b: a >> (b & 31),
    "sra": lambda a, b: (s32(a) >> (b & 31)) & M32,
    "seq": lambda a, b: int(a == b),
    "addf": lambda a, b: f32_bits(bits_f32(a) + bits_f32(b)),
    "subf": lambda a, b: f32_bits(bits_f32(a) - bits_f32(b)),
    "mulf": lambda a, b: f32_bits(bits_f32(a) * bits_f32(b)),
    "divf": lambda a, b: f32_bits(_fdiv(bits_f32(a), bits_f32(b))),
}


def _raise_div():
    raise DivideTrap("divide")


# Binary ops on 64-bit values held as unsigned ints (0 <= v < 2**64).
BINOPS64 = {
    "add_ll": lambda a, b: (a + b) & M64,
    "sub_ll": lambda a, b: (a - b) & M64,
    "mul_ll": lambda a, b: (a * b) & M64,
    "div_ll": lambda a, b: _trunc_div(s64(a), s64(b)) & M64,
    "divu_ll": lambda a, b: (a // b) if b else _raise_div(),
    "rem_ll": lambda a, b: _trunc_rem(s64(a), s64(b)) & M64,
    "remu_ll": lambda a, b: (a % b) if b else _raise_div(),
    "and_ll": lambda a, b: a & b,
    "or_ll": lambda a, b: a | b,
    "xor_ll": lambda a, b: a ^ b,
    "add_d": lambda a, b: f64_bits(bits_f64(a) + bits_f64(b)),
    "sub_d": lambda a, b: f64_bits(bits_f64(a) - bits_f64(b)),
    "mul_d": lambda a, b: f64_bits(bits_f64(a) * bits_f64(b)),
    "div_d": lambda a, b: f64_bits(_fdiv(bits_f64(a), bits_f64(b))),
}

# 64-bit value shifted by a 32-bit count.
SHIFTS64 = {
    "shl_ll": lambda a, b: (a << (b & 63)) & M64,
    "shr_ll": lambda a, b: a >> (b & 63),
    "sra_ll": lambda a, b: (s64(a) >> (b & 63)) & M64,
}

# Unary ops and conversions: name -> (in width, out width, fn on unsigned values).
UNOPS = {
    "neg": (1, 1, lambda a: (-a) & M32),
    "not": (1, 1, lambda a: ~a & M32),
    "negf": (1, 1, lambda a: a ^ 0x8000_0000),
    "neg_ll": (2, 2, lambda a: (-a) & M64),
    "not_ll": (2, 2, lambda a: ~a & M64),
    "neg_d": (2, 2, lambda a: a ^ (1 << 63)),
    # int <-> float family
    "cvt_if": (1, 1, lambda a: f32_bits(round_int_to_f32(s32(a)))),
    "cvt_uf": (1, 1, lambda a: f32_bits(round_int_to_f32(a))),
    "cvt_fi": (1, 1, lambda a: float_to_int(bits_f32(a), 32, True) & M32),
    "cvt_fu": (1, 1, lambda a: float_to_int(bits_f32(a), 32, False)),
    "cvt_id": (1, 2, lambda a: f64_bits(float(s32(a)))),
    "cvt_ud": (1, 2, lambda a: f64_bits(float(a))),
    "cvt_di": (2, 1, lambda a: float_to_int(bits_f64(a), 32, True) & M32),
    "cvt_du": (2, 1, lambda a: float_to_int(bits_f64(a), 32, False)),
    "cvt_lf": (2, 1, lambda a: f32_bits(round_int_to_f32(s64(a)))),
    "cvt_qf": (2, 1, lambda a: f32_bits(round_int_to_f32(a))),
    "cvt_fl": (1, 2, lambda a: float_to_int(bits_f32(a), 64, True) & M64),
    "cvt_fq": (1, 2, lambda a: float_to_int(bits_f32(a), 64, False)),
    "cvt_ld": (2, 2, lambda a: f64_bits(float(s64(a)))),
    "cvt_qd": (2, 2, lambda a: f64_bits(float(a))),
    "cvt_dl": (2, 2, lambda a: float_to_int(bits_f64(a), 64, True) & M64),
    "cvt_dq": (2, 2, lambda a: float_to_int(bits_f64(a), 64, False)),
    "cvt_fd": (1, 2, lambda a: f64_bits(bits_f32(a))),
    "cvt_df": (2, 1, lambda a: f32_bits(bits_f64(a))),
    # integer widen / narrow across the word boundary
    "cvt_sx": (1, 2, lambda a: s32(a) & M64),
    "cvt_zx": (1, 2, lambda a: a),
    "cvt_tr": (2, 1, lambda a: a & M32),
}


def _cmp_key(flavor: str, v: int):
    if flavor == "s":
        return s32(v)
    if flavor == "u" or flavor == "q":
        return v
    if flavor == "l":
        return s64(v)
    if flavor == "f":
        return bits_f32(v)
    if flavor == "d":
        return bits_f64(v)
    raise ValueError(f"unknown comparison flavor {flavor!r}")


RELATIONS = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "lt": lambda a, b: a < b,
    "gt": lambda a, b: a > b,
    "le": lambda a, b: a <= b,
    "ge": lambda a, b: a >= b,
}


def compare(rel: str, flavor: str, a: int, b: int) -> bool:
    """Relation on plain values under a flavor's ordering (IEEE for f/d)."""
    return RELATIONS[rel](_cmp_key(flavor, a), _cmp_key(flavor, b))
