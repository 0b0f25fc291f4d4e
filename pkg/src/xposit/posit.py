"""Posit(n, 2) arithmetic on raw bit patterns.

Posits are handled as plain unsigned integers holding the n-bit pattern
(most significant bit first), with ``n`` passed alongside. Supported widths
are 8, 16 and 32; the exponent field width is always 2.

All arithmetic is exact up to a single final rounding: round to nearest,
ties to even on the bit pattern, saturating at +-maxpos / +-minpos. Only NaR
inputs produce NaR.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

ES = 2
WIDTHS = (8, 16, 32)


class Special(enum.Enum):
    ZERO = "zero"
    NAR = "NaR"


def _check_width(n: int) -> None:
    if n not in WIDTHS:
        raise ValueError(f"unsupported posit width {n}; expected one of {WIDTHS}")


def mask(n: int) -> int:
    return (1 << n) - 1


def nar(n: int = 32) -> int:
    return 1 << (n - 1)


def maxpos(n: int = 32) -> int:
    return (1 << (n - 1)) - 1


def minpos(n: int = 32) -> int:
    return 1


def one(n: int = 32) -> int:
    return 1 << (n - 2)


def max_scale(n: int) -> int:
    """Binary exponent of maxpos; minpos is ``2**-max_scale(n)``."""
    return 4 * (n - 2)


def to_signed(bits: int, n: int = 32) -> int:
    bits &= mask(n)
    return bits - (1 << n) if bits >> (n - 1) else bits


def is_nar(bits: int, n: int = 32) -> bool:
    return bits & mask(n) == 1 << (n - 1)


@dataclass(frozen=True)
class PositFields:
    """Fields of a regular posit, read straight off the raw pattern.

    Negative posits are *not* negated first: the hidden value is 1 for
    positive patterns and -2 for negative ones, so the value is
    ``((1 - 3s) + f) * 2**((1 - 2s) * (4r + e + s))``.
    """

    n: int
    s: int
    k: int
    r: int
    e: int
    F: int
    m: int

    @property
    def f(self) -> Fraction:
        return Fraction(self.F, 1 << self.m)

    @property
    def value(self) -> Fraction:
        s = self.s
        return ((1 - 3 * s) + self.f) * Fraction(2) ** ((1 - 2 * s) * (4 * self.r + self.e + s))


def decode(bits: int, n: int = 32) -> Union[PositFields, Special]:
    _check_width(n)
    bits &= mask(n)
    if bits == 0:
        return Special.ZERO
    if bits == 1 << (n - 1):
        return Special.NAR
    s = bits >> (n - 1)
    body = bits & mask(n - 1)
    nbody = n - 1
    r0 = body >> (nbody - 1)
    run = body if r0 == 0 else body ^ mask(nbody)
    # run now has R0-run bits cleared; its bit_length marks the terminator
    k = nbody - run.bit_length()
    r = -k if r0 == 0 else k - 1
    nrem = max(nbody - k - 1, 0)
    rem = body & mask(nrem)
    ebits = min(ES, nrem)
    e = (rem >> (nrem - ebits)) << (ES - ebits)
    m = nrem - ebits
    return PositFields(n=n, s=s, k=k, r=r, e=e, F=rem & mask(m), m=m)


def to_fraction(bits: int, n: int = 32) -> Fraction:
    """Exact value; raises ValueError on NaR."""
    d = decode(bits, n)
    if d is Special.ZERO:
        return Fraction(0)
    if d is Special.NAR:
        raise ValueError("NaR has no real value")
    return d.value


def unpack(bits: int, n: int = 32) -> tuple[int, int, int] | Special:
    """Split a regular posit into ``(neg, mant, exp)`` with value ``+-mant * 2**exp``.

    ``mant`` is a positive integer; negative patterns use the -2 hidden value,
    so no 2's complement pass is needed.
    """
    d = decode(bits, n)
    if isinstance(d, Special):
        return d
    scale = 4 * d.r + d.e
    if d.s == 0:
        return 0, (1 << d.m) + d.F, scale - d.m
    return 1, (2 << d.m) - d.F, -(scale + 1) - d.m


def round_bits(neg: int, mant: int, exp: int, n: int = 32, sticky: bool = False) -> int:
    """Round ``+-(mant + sticky_fraction) * 2**exp`` to the nearest n-bit posit.

    ``sticky`` flags nonzero bits below ``mant``'s LSB; callers supplying it
    must pass at least ``n + 1`` significant bits in ``mant``.
    """
    if mant <= 0:
        raise ValueError("mantissa must be positive")
    bl = mant.bit_length()
    scale = exp + bl - 1
    fbits = bl - 1
    frac = mant - (1 << fbits)
    lim = max_scale(n)
    if scale > lim:
        mag = maxpos(n)
    elif scale < -lim:
        mag = 1
    else:
        r, e = scale >> 2, scale & 3
        if r >= 0:
            reg, rlen = ((1 << (r + 1)) - 1) << 1, r + 2
        else:
            reg, rlen = 1, 1 - r
        body = (((reg << ES) | e) << fbits) | frac
        drop = rlen + ES + fbits - (n - 1)
        if drop > 0:
            kept = body >> drop
            guard = (body >> (drop - 1)) & 1
            rest = bool(body & mask(drop - 1)) or sticky
            if guard and (rest or kept & 1):
                kept += 1
        else:
            kept = body << -drop
        mag = min(max(kept, 1), maxpos(n))
    return (-mag) & mask(n) if neg else mag


class RealScaled(NamedTuple):
    """``sign * significand * 2**scale`` with significand in [1, 2)."""

    sign: int
    scale: int
    significand: Fraction


Real = Union[int, float, Fraction, RealScaled]


def encode(value: Real, n: int = 32) -> int:
    """Nearest posit to an exact real value.

    Floats are taken at their exact binary value; NaN maps to NaR and
    infinities saturate.
    """
    _check_width(n)
    if isinstance(value, RealScaled):
        if value.significand == 0:
            return 0
        x = value.sign * value.significand * Fraction(2) ** value.scale
    elif isinstance(value, float):
        if math.isnan(value):
            return nar(n)
        if math.isinf(value):
            return maxpos(n) if value > 0 else (-maxpos(n)) & mask(n)
        x = Fraction(value)
    else:
        x = Fraction(value)
    if x == 0:
        return 0
    neg = int(x < 0)
    x = abs(x)
    num, den = x.numerator, x.denominator
    if den & (den - 1) == 0:
        return round_bits(neg, num, 1 - den.bit_length(), n)
    # non-dyadic: take n + 3 significant bits and a sticky flag
    shift = n + 3 - (num.bit_length() - den.bit_length())
    if shift >= 0:
        q, rem = divmod(num << shift, den)
    else:
        q, rem = divmod(num, den << -shift)
    return round_bits(neg, q, -shift, n, sticky=rem != 0)


def add(a: int, b: int, n: int = 32) -> int:
    ua, ub = unpack(a, n), unpack(b, n)
    if ua is Special.NAR or ub is Special.NAR:
        return nar(n)
    if ua is Special.ZERO:
        return b & mask(n)
    if ub is Special.ZERO:
        return a & mask(n)
    na, ma, ea = ua
    nb, mb, eb = ub
    lo = min(ea, eb)
    total = (-1) ** na * (ma << (ea - lo)) + (-1) ** nb * (mb << (eb - lo))
    if total == 0:
        return 0
    return round_bits(int(total < 0), abs(total), lo, n)


def neg(a: int, n: int = 32) -> int:
    """2's complement of the pattern; fixes zero and NaR."""
    return (-a) & mask(n)


def sub(a: int, b: int, n: int = 32) -> int:
    return add(a, neg(b, n), n)


def mul(a: int, b: int, n: int = 32) -> int:
    ua, ub = unpack(a, n), unpack(b, n)
    if ua is Special.NAR or ub is Special.NAR:
        return nar(n)
    if ua is Special.ZERO or ub is Special.ZERO:
        return 0
    na, ma, ea = ua
    nb, mb, eb = ub
    return round_bits(na ^ nb, ma * mb, ea + eb, n)


def compare(a: int, b: int, n: int = 32) -> int:
    """-1, 0 or 1, ordering patterns as 2's complement integers (NaR lowest)."""
    sa, sb = to_signed(a, n), to_signed(b, n)
    return (sa > sb) - (sa < sb)


def peq(a: int, b: int, n: int = 32) -> bool:
    return compare(a, b, n) == 0


def plt(a: int, b: int, n: int = 32) -> bool:
    return compare(a, b, n) < 0


def ple(a: int, b: int, n: int = 32) -> bool:
    return compare(a, b, n) <= 0


def pmin(a: int, b: int, n: int = 32) -> int:
    return (a if compare(a, b, n) <= 0 else b) & mask(n)


def pmax(a: int, b: int, n: int = 32) -> int:
    return (a if compare(a, b, n) >= 0 else b) & mask(n)


class SignMode(enum.Enum):
    J = "j"
    JN = "jn"
    JX = "jx"


def sign_inject(a: int, b: int, mode: SignMode | str, n: int = 32) -> int:
    """Replace the sign bit of ``a`` (F-extension FSGNJ* analog).

    This is a raw bit operation. Posit negation is a 2's complement, so
    ``sign_inject(x, x, "jn")`` is generally *not* ``neg(x)``.
    """
    mode = SignMode(mode)
    sbit = 1 << (n - 1)
    a &= mask(n)
    if mode is SignMode.J:
        s = b & sbit
    elif mode is SignMode.JN:
        s = ~b & sbit
    else:
        s = (a ^ b) & sbit
    return (a & ~sbit) | s


def to_float(bits: int, n: int = 32) -> float:
    """Value as a Python float (exact for n <= 32); NaR gives NaN."""
    u = unpack(bits, n)
    if u is Special.ZERO:
        return 0.0
    if u is Special.NAR:
        return math.nan
    ng, m, e = u
    return math.ldexp(-m if ng else m, e)


@dataclass(frozen=True)
class PositBits:
    """Convenience wrapper pairing a pattern with its width."""

    bits: int
    width: int = 32

    def __post_init__(self):
        _check_width(self.width)
        if not 0 <= self.bits <= mask(self.width):
            raise ValueError(f"pattern 0x{self.bits:x} does not fit in {self.width} bits")

    @classmethod
    def from_value(cls, value: Real, width: int = 32) -> "PositBits":
        return cls(encode(value, width), width)

    def _other(self, other: "PositBits") -> int:
        if other.width != self.width:
            raise ValueError("posit widths differ")
        return other.bits

    def __add__(self, other):
        return PositBits(add(self.bits, self._other(other), self.width), self.width)

    def __sub__(self, other):
        return PositBits(sub(self.bits, self._other(other), self.width), self.width)

    def __mul__(self, other):
        return PositBits(mul(self.bits, self._other(other), self.width), self.width)

    def __neg__(self):
        return PositBits(neg(self.bits, self.width), self.width)

    def __lt__(self, other):
        return plt(self.bits, self._other(other), self.width)

    def __le__(self, other):
        return ple(self.bits, self._other(other), self.width)

    def __float__(self):
        return to_float(self.bits, self.width)

    @property
    def is_nar(self) -> bool:
        return is_nar(self.bits, self.width)

    def __repr__(self):
        digits = self.width // 4
        return f"PositBits(0x{self.bits:0{digits}X}, width={self.width}) ~ {float(self)!r}"
