"""The 16n-bit fixed-point quire accumulator."""

from __future__ import annotations

from fractions import Fraction

from . import posit as P


class Quire:
    """Exact multiply-accumulate register for n-bit posits.

    The accumulator ``acc`` is a 16n-bit 2's complement integer whose value
    is ``acc * 2**(16 - 8n)``. A quire poisoned by a NaR operand stays NaR
    until :meth:`qclr`.
    """

    def __init__(self, n: int = 32):
        P._check_width(n)
        self.n = n
        self.bits = 16 * n
        self.frac_bits = 8 * n - 16
        self.acc = 0
        self.nar = False

    def _wrap(self, v: int) -> int:
        v &= (1 << self.bits) - 1
        return v - (1 << self.bits) if v >> (self.bits - 1) else v

    def qclr(self) -> "Quire":
        self.acc = 0
        self.nar = False
        return self

    def qneg(self) -> "Quire":
        # the most negative accumulator is its own 2's complement
        self.acc = self._wrap(-self.acc)
        return self

    def _product(self, a: int, b: int) -> int | None:
        ua, ub = P.unpack(a, self.n), P.unpack(b, self.n)
        if ua is P.Special.NAR or ub is P.Special.NAR:
            return None
        if ua is P.Special.ZERO or ub is P.Special.ZERO:
            return 0
        na, ma, ea = ua
        nb, mb, eb = ub
        shift = ea + eb + self.frac_bits
        prod = ma * mb
        # every posit is a multiple of minpos, so a right shift here is exact
        prod = prod << shift if shift >= 0 else prod >> -shift
        return -prod if na ^ nb else prod

    def qmadd(self, a: int, b: int) -> "Quire":
        p = self._product(a, b)
        if p is None:
            self.nar = True
        elif not self.nar:
            self.acc = self._wrap(self.acc + p)
        return self

    def qmsub(self, a: int, b: int) -> "Quire":
        p = self._product(a, b)
        if p is None:
            self.nar = True
        elif not self.nar:
            self.acc = self._wrap(self.acc - p)
        return self

    def accumulate(self, a, b, subtract=None) -> "Quire":
        """Bulk qmadd/qmsub over sequences of patterns (compiled when available)."""
        from ._backend import kernels

        if self.nar:
            return self
        acc, poisoned = kernels.quire_accumulate(self.acc, a, b, subtract, self.n)
        if poisoned:
            self.nar = True
        else:
            self.acc = self._wrap(acc)
        return self

    def qround(self) -> int:
        if self.nar:
            return P.nar(self.n)
        if self.acc == 0:
            return 0
        return P.round_bits(int(self.acc < 0), abs(self.acc), -self.frac_bits, self.n)

    @property
    def value(self) -> Fraction | None:
        if self.nar:
            return None
        return Fraction(self.acc, 1 << self.frac_bits)

    def copy(self) -> "Quire":
        q = Quire(self.n)
        q.acc, q.nar = self.acc, self.nar
        return q

    def hex(self) -> str:
        """Raw accumulator as a 16n-bit hex word (debug dump)."""
        digits = self.bits // 4
        tag = " NaR" if self.nar else ""
        return f"0x{self.acc & ((1 << self.bits) - 1):0{digits}x}{tag}"

    def __eq__(self, other):
        if not isinstance(other, Quire):
            return NotImplemented
        return (self.n, self.acc, self.nar) == (other.n, other.acc, other.nar)

    def __repr__(self):
        return f"Quire(n={self.n}, {self.hex()})"
