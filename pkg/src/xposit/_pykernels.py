"""Pure-Python/numpy implementations of the compiled kernel surface.

Used when the extension is not built (or XPOSIT_PURE_PYTHON=1). Posit GEMMs
here run one library call per multiply-accumulate, so they are only practical
for small matrices.
"""

from __future__ import annotations

import numpy as np

from . import posit as P
from .quire import Quire

NAME = "python"


def add(a: int, b: int, n: int = 32) -> int:
    return P.add(a, b, n)


def mul(a: int, b: int, n: int = 32) -> int:
    return P.mul(a, b, n)


def _map2(fn, a, b, n):
    av = np.asarray(a, dtype=np.uint32)
    bv = np.asarray(b, dtype=np.uint32)
    out = np.fromiter((fn(int(x), int(y), n) for x, y in zip(av.ravel(), bv.ravel())),
                      dtype=np.uint32, count=av.size)
    return out.reshape(av.shape)


def add_array(a, b, n: int = 32):
    return _map2(P.add, a, b, n)


def mul_array(a, b, n: int = 32):
    return _map2(P.mul, a, b, n)


def from_f64_array(x, n: int = 32):
    xv = np.asarray(x, dtype=np.float64)
    out = np.fromiter((P.encode(float(v), n) for v in xv.ravel()), dtype=np.uint32, count=xv.size)
    return out.reshape(xv.shape)


def to_f64_array(bits, n: int = 32):
    bv = np.asarray(bits, dtype=np.uint32)
    out = np.fromiter((P.to_float(int(v), n) for v in bv.ravel()), dtype=np.float64, count=bv.size)
    return out.reshape(bv.shape)


def quire_accumulate(acc: int, a, b, subtract=None, n: int = 32):
    q = Quire(n)
    q.acc = acc
    av = np.asarray(a, dtype=np.uint32).ravel()
    bv = np.asarray(b, dtype=np.uint32).ravel()
    if av.size != bv.size:
        raise ValueError("operand sequences differ in length")
    sv = np.zeros(av.size, bool) if subtract is None else np.asarray(subtract, bool).ravel()
    for x, y, s in zip(av.tolist(), bv.tolist(), sv.tolist()):
        if s:
            q.qmsub(x, y)
        else:
            q.qmadd(x, y)
        if q.nar:
            return q.acc, True
    return q.acc, False


def _check_dims(a, b):
    if a.shape[1] != b.shape[0]:
        raise ValueError("inner dimensions differ")


def gemm_posit_quire(a, b):
    a = np.asarray(a, dtype=np.uint32)
    b = np.asarray(b, dtype=np.uint32)
    _check_dims(a, b)
    al, bl = a.tolist(), b.T.tolist()
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.uint32)
    q = Quire(32)
    for i, row in enumerate(al):
        for j, col in enumerate(bl):
            q.qclr()
            for x, y in zip(row, col):
                q.qmadd(x, y)
            out[i, j] = q.qround()
    return out


def gemm_posit_noquire(a, b):
    a = np.asarray(a, dtype=np.uint32)
    b = np.asarray(b, dtype=np.uint32)
    _check_dims(a, b)
    al, bl = a.tolist(), b.T.tolist()
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.uint32)
    for i, row in enumerate(al):
        for j, col in enumerate(bl):
            c = 0
            for x, y in zip(row, col):
                c = P.add(c, P.mul(x, y))
            out[i, j] = c
    return out


def _two_sum(x, y):
    s = x + y
    bb = s - x
    return s, (x - (s - bb)) + (y - bb)


def _fma_f32(a, b, c):
    """Correctly rounded binary32 a*b + c via round-to-odd in binary64."""
    p = a.astype(np.float64) * b.astype(np.float64)  # exact: 48 bits
    s, err = _two_sum(p, c.astype(np.float64))
    even = (s.view(np.int64) & 1) == 0
    bump = (err != 0) & even & np.isfinite(s)
    s = np.where(bump, np.nextafter(s, np.where(err > 0, np.inf, -np.inf)), s)
    return s.astype(np.float32)


def _split(x):
    t = x * 134217729.0  # 2**27 + 1
    hi = t - (t - x)
    return hi, x - hi


def _fma_f64(a, b, c):
    """a*b + c from error-free transforms; within an ulp, not always correctly rounded."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    ep = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    s, es = _two_sum(p, c)
    return s + (ep + es)


def gemm_f32(a, b, fused: bool = True):
    a = np.asarray(a, dtype=np.float32)
    b = np.asarray(b, dtype=np.float32)
    _check_dims(a, b)
    c = np.zeros((a.shape[0], b.shape[1]), dtype=np.float32)
    for k in range(a.shape[1]):
        x, y = a[:, k, None], b[None, k, :]
        if fused:
            c = _fma_f32(np.broadcast_to(x, c.shape), np.broadcast_to(y, c.shape), c)
        else:
            c = c + x * y
    return c


def gemm_f64(a, b, fused: bool = True):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dims(a, b)
    c = np.zeros((a.shape[0], b.shape[1]), dtype=np.float64)
    for k in range(a.shape[1]):
        x, y = a[:, k, None], b[None, k, :]
        if fused:
            c = _fma_f64(np.broadcast_to(x, c.shape), np.broadcast_to(y, c.shape), c)
        else:
            c = c + x * y
    return c
