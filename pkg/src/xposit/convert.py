"""Posit <-> integer conversions, raw register moves and float bridges."""

from __future__ import annotations

import math

from . import posit as P

INT_TYPES = {
    # name: (bits, signed)
    "i32": (32, True),
    "u32": (32, False),
    "i64": (64, True),
    "u64": (64, False),
}


def int_range(target: str) -> tuple[int, int]:
    width, signed = INT_TYPES[target]
    if signed:
        return -(1 << (width - 1)), (1 << (width - 1)) - 1
    return 0, (1 << width) - 1


def posit_to_int(a: int, target: str = "i32", n: int = 32) -> int:
    """Round to nearest (ties to even) and saturate into ``target``.

    NaR maps to the most negative value of the target, 0 for unsigned ones.
    """
    lo, hi = int_range(target)
    if P.is_nar(a, n):
        return lo
    v = round(P.to_fraction(a, n))
    return min(max(v, lo), hi)


def int_to_posit(value: int, source: str = "i32", n: int = 32) -> int:
    """Correctly rounded posit of an integer register value.

    ``value`` is reinterpreted through the raw bits of ``source``, so -1 read
    as ``u32`` is 2**32 - 1.
    """
    width, signed = INT_TYPES[source]
    v = value & ((1 << width) - 1)
    if signed and v >> (width - 1):
        v -= 1 << width
    return P.encode(v, n)


def pmv_x_w(bits: int, n: int = 32) -> int:
    """Posit pattern to a 64-bit integer register, sign-extended."""
    bits &= P.mask(n)
    if bits >> (n - 1):
        bits |= ((1 << 64) - 1) ^ P.mask(n)
    return bits


def pmv_w_x(xval: int, n: int = 32) -> int:
    """Low n bits of an integer register, unmodified."""
    return xval & P.mask(n)


def from_float(x: float, n: int = 32) -> int:
    """Nearest posit to a binary float; NaN -> NaR, +-inf saturate."""
    return P.encode(float(x), n)


def to_float(bits: int, n: int = 32) -> float:
    return P.to_float(bits, n)


def to_float32(bits: int, n: int = 32) -> float:
    """Nearest binary32 value, returned as a Python float."""
    import numpy as np

    v = P.to_float(bits, n)
    return float(np.float32(v)) if not math.isnan(v) else math.nan
