"""Logarithm-approximate division and square root (Mitchell style).

Both units treat ``log2(1 + f)`` as ``f`` on the magnitude, do the log-domain
arithmetic exactly, and map back with the same linear approximation before a
single posit rounding. Powers of two are therefore exact. The quotient
overestimates by at most 12.5% of the true value (11.11% of the returned
value); the square root by at most about 6.07%.
"""

from __future__ import annotations

from . import posit as P


def _log_parts(bits: int, n: int) -> tuple[int, int, int, int]:
    """(neg, scale, frac, fbits) with |value| = (1 + frac/2**fbits) * 2**scale."""
    ng, mant, exp = P.unpack(bits, n)
    fbits = mant.bit_length() - 1
    return ng, exp + fbits, mant - (1 << fbits), fbits


def adiv(a: int, b: int, n: int = 32) -> int:
    """Approximate a / b; NaR for a NaR operand or a zero divisor."""
    ua, ub = P.decode(a, n), P.decode(b, n)
    if ua is P.Special.NAR or ub is P.Special.NAR or ub is P.Special.ZERO:
        return P.nar(n)
    if ua is P.Special.ZERO:
        return 0
    na, sa, fa, wa = _log_parts(a, n)
    nb, sb, fb, wb = _log_parts(b, n)
    w = max(wa, wb)
    fq = (fa << (w - wa)) - (fb << (w - wb))
    scale = sa - sb
    if fq < 0:
        fq += 1 << w
        scale -= 1
    return P.round_bits(na ^ nb, (1 << w) + fq, scale - w, n)


def asqrt(a: int, n: int = 32) -> int:
    """Approximate square root; NaR for negative or NaR input."""
    d = P.decode(a, n)
    if d is P.Special.NAR:
        return P.nar(n)
    if d is P.Special.ZERO:
        return 0
    ng, scale, frac, fbits = _log_parts(a, n)
    if ng:
        return P.nar(n)
    # halve log2 = scale + f; the fraction gains a bit of resolution
    if scale % 2 == 0:
        mant = (2 << fbits) + frac
    else:
        mant = (3 << fbits) + frac
    return P.round_bits(0, mant, scale // 2 - fbits - 1, n)
