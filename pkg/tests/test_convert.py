import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from xposit import convert as C
from xposit import posit as P


@pytest.mark.parametrize("bits,target,expected", [
    (0x48000000, "i32", 2),
    (0x80000000, "i32", -2 ** 31),
    (0x80000000, "u32", 0),
    (0x80000000, "i64", -2 ** 63),
    (0x7FFFFFFF, "i32", 2 ** 31 - 1),
    (0x7FFFFFFF, "u64", 2 ** 64 - 1),
    (0xC0000000, "u32", 0),
    (0xC0000000, "i32", -1),
    (0x00000001, "i32", 0),
])
def test_posit_to_int(bits, target, expected):
    assert C.posit_to_int(bits, target) == expected


def test_posit_to_int_ties_even():
    assert C.posit_to_int(C.from_float(2.5), "i32") == 2
    assert C.posit_to_int(C.from_float(3.5), "i32") == 4
    assert C.posit_to_int(C.from_float(-2.5), "i64") == -2


def test_int_to_posit():
    assert C.int_to_posit(0) == 0
    assert C.int_to_posit(1) == 0x40000000
    assert C.int_to_posit(2 ** 63 - 1, "i64") == oracle.round_to_posit(Fraction(2 ** 63 - 1), 32)
    assert C.int_to_posit(2 ** 64 - 1, "u64") == oracle.round_to_posit(Fraction(2 ** 64 - 1), 32)
    # the register's raw bits are read in the source type
    assert C.int_to_posit(2 ** 64 - 1, "i64") == 0xC0000000
    assert C.int_to_posit(0xFFFFFFFF, "u32") == oracle.round_to_posit(Fraction(2 ** 32 - 1), 32)
    assert C.int_to_posit(0xFFFFFFFF, "i32") == 0xC0000000


@given(st.integers(-2 ** 27, 2 ** 27))
@settings(max_examples=500, deadline=None)
def test_int_roundtrip_representable(v):
    p = C.int_to_posit(v & 0xFFFFFFFF, "i32")
    if P.to_fraction(p) == v:
        assert C.posit_to_int(p, "i32") == v


def test_small_ints_exact():
    for v in range(-5000, 5000):
        assert C.posit_to_int(C.int_to_posit(v & 0xFFFFFFFF, "i32"), "i32") == v


def test_pmv():
    assert C.pmv_x_w(0xC0000000) == 0xFFFFFFFFC0000000
    assert C.pmv_x_w(0x00000001) == 1
    for p in (0, 1, 0x7FFFFFFF, 0x80000000, 0xDEADBEEF):
        assert C.pmv_w_x(C.pmv_x_w(p)) == p


def test_float_bridge():
    assert C.from_float(1.0) == 0x40000000
    assert C.from_float(math.nan) == 0x80000000
    assert C.from_float(math.inf) == 0x7FFFFFFF
    assert C.from_float(-math.inf) == 0x80000001
    assert C.from_float(0.1) == oracle.round_to_posit(Fraction(0.1), 32)
    assert C.from_float(5e-324) == 0x00000001
    assert math.isnan(C.to_float(0x80000000))


@pytest.mark.parametrize("n", [8, 16])
def test_float_roundtrip_exhaustive(n):
    for b in range(1 << n):
        if b != 1 << (n - 1):
            assert C.from_float(C.to_float(b, n), n) == b


def test_posit32_to_f64_exact():
    rng = np.random.default_rng(2)
    for b in rng.integers(0, 1 << 32, 5000, dtype=np.uint64).tolist():
        if b != 0x80000000:
            assert Fraction(C.to_float(b)) == oracle.value(b, 32)


def test_conversions_monotone():
    xs = np.sort(np.random.default_rng(4).uniform(-1e6, 1e6, 3000))
    ps = [P.to_signed(C.from_float(x)) for x in xs]
    assert ps == sorted(ps)


def test_to_float32():
    assert C.to_float32(0x40000000) == 1.0
    v = C.to_float32(C.from_float(0.1))
    assert v == float(np.float32(0.1))
