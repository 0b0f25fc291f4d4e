from fractions import Fraction

import numpy as np
import pytest

import oracle
from xposit import posit as P
from xposit.quire import Quire

ONE, TWO, HALF = 0x40000000, 0x48000000, 0x38000000
NAR = 0x80000000
MAXPOS, MINPOS = 0x7FFFFFFF, 0x00000001


def test_layout():
    q = Quire(32)
    assert q.bits == 512 and q.frac_bits == 240
    assert Quire(8).bits == 128 and Quire(16).bits == 256


def test_clear_and_round_zero():
    q = Quire().qmadd(TWO, TWO).qclr()
    assert q.value == 0
    assert q.qround() == 0


def test_clear_recovers_nar():
    q = Quire().qmadd(NAR, ONE)
    assert q.nar and q.value is None and q.qround() == NAR
    q.qmadd(ONE, ONE).qneg()
    assert q.nar
    q.qclr()
    assert not q.nar and q.qround() == 0


def test_product_exact():
    assert Quire().qmadd(TWO, HALF).qround() == ONE


def test_tiny_retained_before_rounding():
    q = Quire().qmadd(MINPOS, MINPOS).qmadd(ONE, ONE)
    assert q.value == 1 + Fraction(1, 2 ** 240)
    assert q.qround() == ONE
    q.qmsub(ONE, ONE)
    assert q.value == Fraction(1, 2 ** 240)
    assert q.qround() == MINPOS


def test_negate():
    assert Quire().qneg().value == 0
    assert Quire().qmadd(ONE, ONE).qneg().qround() == 0xC0000000
    rng = np.random.default_rng(5)
    for _ in range(50):
        q = Quire()
        a, b = rng.integers(0, 1 << 32, (2, 8), dtype=np.uint64)
        for x, y in zip(a.tolist(), b.tolist()):
            if NAR not in (x, y):
                q.qmadd(x, y)
        before = q.copy()
        assert q.qneg().qneg() == before


def test_negate_most_negative_unchanged():
    q = Quire()
    q.acc = -(1 << 511)
    assert q.qneg().acc == -(1 << 511)


def test_saturating_round():
    q = Quire()
    for _ in range(4):
        q.qmadd(MAXPOS, MAXPOS)  # 2**240 each
    assert q.qround() == MAXPOS
    q.qneg()
    assert q.qround() == 0x80000001


def test_headroom():
    # 2**31 - 1 products of maxpos**2 (2**240) fit the 511 magnitude bits
    worst = (2 ** 31 - 1) * (2 ** 240 << 240)
    assert worst.bit_length() <= 511


def _exact_sum(pairs, signs):
    return sum(s * oracle.value(a, 32) * oracle.value(b, 32) for (a, b), s in zip(pairs, signs))


def test_random_macs_exact():
    rng = np.random.default_rng(11)
    for trial in range(20):
        m = 500
        pairs = rng.integers(0, 1 << 32, (m, 2), dtype=np.uint64).tolist()
        pairs = [(a, b) for a, b in pairs if NAR not in (a, b)]
        signs = rng.choice([1, -1], len(pairs)).tolist()
        q = Quire()
        for (a, b), s in zip(pairs, signs):
            (q.qmadd if s > 0 else q.qmsub)(a, b)
        exact = _exact_sum(pairs, signs)
        assert q.value == exact
        assert q.qround() == oracle.round_to_posit(exact, 32)


def test_moderate_values_cancel():
    rng = np.random.default_rng(12)
    from xposit.convert import from_float
    a = [from_float(x) for x in rng.uniform(-10, 10, 2000)]
    b = [from_float(x) for x in rng.uniform(-10, 10, 2000)]
    q = Quire()
    for x, y in zip(a, b):
        q.qmadd(x, y)
    for x, y in zip(a, b):
        q.qmsub(x, y)
    assert q.acc == 0


@pytest.mark.parametrize("n", [8, 16])
def test_small_widths(n):
    rng = np.random.default_rng(n)
    pairs = rng.integers(0, 1 << n, (300, 2)).tolist()
    pairs = [(a, b) for a, b in pairs if a != 1 << (n - 1) and b != 1 << (n - 1)]
    q = Quire(n)
    for a, b in pairs:
        q.qmadd(a, b)
    exact = sum(oracle.value(a, n) * oracle.value(b, n) for a, b in pairs)
    assert q.value == exact
    assert q.qround() == oracle.round_to_posit(exact, n)


def test_accumulate_matches_scalar(kern):
    rng = np.random.default_rng(21)
    a = rng.integers(0, 1 << 32, 5000, dtype=np.uint64).astype(np.uint32)
    b = rng.integers(0, 1 << 32, 5000, dtype=np.uint64).astype(np.uint32)
    a[a == NAR] = ONE
    b[b == NAR] = ONE
    sub = rng.integers(0, 2, 5000).astype(bool)
    ref = Quire()
    for x, y, s in zip(a.tolist(), b.tolist(), sub.tolist()):
        (ref.qmsub if s else ref.qmadd)(x, y)
    acc, poisoned = kern.quire_accumulate(0, a, b, sub)
    assert not poisoned and acc == ref.acc


def test_accumulate_poisoned(kern):
    acc, poisoned = kern.quire_accumulate(0, [ONE, NAR], [ONE, ONE])
    assert poisoned


def test_bulk_method():
    q = Quire()
    q.accumulate([TWO, ONE], [HALF, ONE])
    assert q.qround() == TWO
    q.accumulate([NAR], [ONE])
    assert q.nar


def test_hex_dump():
    q = Quire().qmadd(ONE, ONE)
    h = q.hex()
    assert len(h) == 2 + 128
    assert int(h, 16) == 1 << 240
    assert P.is_nar(Quire().qmadd(NAR, NAR).qround())
