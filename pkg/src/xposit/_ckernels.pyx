# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: scalar posit ops, array conversions, quire MACs and GEMM."""

from libc.stdint cimport uint32_t, uint64_t
from libc.math cimport fma, fmaf
from libc.stdlib cimport free, malloc

import numpy as np

cdef extern from "_posit_kernels.h":
    ctypedef struct px_unpacked:
        int status
        int neg
        int scale
        uint32_t sig
    int PX_REGULAR
    int PX_ZERO
    int PX_NAR
    uint32_t px_add(uint32_t a, uint32_t b, int n) nogil
    uint32_t px_mul(uint32_t a, uint32_t b, int n) nogil
    uint32_t px_from_double(double x, int n) nogil
    double px_to_double(uint32_t bits, int n) nogil
    px_unpacked px_split(uint32_t bits) nogil
    void pq_clear(uint64_t *w) nogil
    void pq_mac(uint64_t *w, px_unpacked a, px_unpacked b, int subtract) nogil
    uint32_t pq_round(const uint64_t *w) nogil

NAME = "cython"

cdef int _width(int n) except -1:
    if n != 8 and n != 16 and n != 32:
        raise ValueError(f"unsupported posit width {n}")
    return n


def add(uint32_t a, uint32_t b, int n=32):
    _width(n)
    return px_add(a, b, n)


def mul(uint32_t a, uint32_t b, int n=32):
    _width(n)
    return px_mul(a, b, n)


def add_array(a, b, int n=32):
    _width(n)
    cdef const uint32_t[::1] av = np.ascontiguousarray(a, dtype=np.uint32).ravel()
    cdef const uint32_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint32).ravel()
    out = np.empty(av.shape[0], dtype=np.uint32)
    cdef uint32_t[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(av.shape[0]):
            ov[i] = px_add(av[i], bv[i], n)
    return out.reshape(np.shape(a))


def mul_array(a, b, int n=32):
    _width(n)
    cdef const uint32_t[::1] av = np.ascontiguousarray(a, dtype=np.uint32).ravel()
    cdef const uint32_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint32).ravel()
    out = np.empty(av.shape[0], dtype=np.uint32)
    cdef uint32_t[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(av.shape[0]):
            ov[i] = px_mul(av[i], bv[i], n)
    return out.reshape(np.shape(a))


def from_f64_array(x, int n=32):
    _width(n)
    arr = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] xv = arr.ravel()
    out = np.empty(xv.shape[0], dtype=np.uint32)
    cdef uint32_t[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = px_from_double(xv[i], n)
    return out.reshape(arr.shape)


def to_f64_array(bits, int n=32):
    _width(n)
    arr = np.ascontiguousarray(bits, dtype=np.uint32)
    cdef const uint32_t[::1] bv = arr.ravel()
    out = np.empty(bv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(bv.shape[0]):
            ov[i] = px_to_double(bv[i], n)
    return out.reshape(arr.shape)


cdef _limbs_from_int(object acc, uint64_t *w):
    raw = (acc & ((1 << 512) - 1)).to_bytes(64, "little")
    cdef int i
    for i in range(8):
        w[i] = int.from_bytes(raw[8 * i:8 * i + 8], "little")


cdef object _int_from_limbs(const uint64_t *w):
    raw = b"".join(int(w[i]).to_bytes(8, "little") for i in range(8))
    v = int.from_bytes(raw, "little")
    return v - (1 << 512) if v >> 511 else v


def quire_accumulate(acc, a, b, subtract=None, int n=32):
    """Add (or subtract where ``subtract`` is set) each a[i]*b[i] into ``acc``.

    Returns ``(acc, poisoned)``; only the 32-bit quire is compiled.
    """
    if n != 32:
        from . import _pykernels
        return _pykernels.quire_accumulate(acc, a, b, subtract, n)
    cdef const uint32_t[::1] av = np.ascontiguousarray(a, dtype=np.uint32).ravel()
    cdef const uint32_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint32).ravel()
    if av.shape[0] != bv.shape[0]:
        raise ValueError("operand sequences differ in length")
    if subtract is None:
        sub_arr = np.zeros(av.shape[0], dtype=np.uint8)
    else:
        sub_arr = np.ascontiguousarray(subtract, dtype=np.uint8).ravel()
    cdef const unsigned char[::1] sv = sub_arr
    cdef uint64_t w[8]
    _limbs_from_int(acc, w)
    cdef Py_ssize_t i
    cdef px_unpacked ua, ub
    cdef int poisoned = 0
    with nogil:
        for i in range(av.shape[0]):
            ua = px_split(av[i])
            ub = px_split(bv[i])
            if ua.status == PX_NAR or ub.status == PX_NAR:
                poisoned = 1
                break
            if ua.status == PX_ZERO or ub.status == PX_ZERO:
                continue
            pq_mac(w, ua, ub, sv[i] != 0)
    return _int_from_limbs(w), bool(poisoned)


def gemm_posit_quire(a, b):
    """Posit32 C = A @ B: one quire per entry, k ascending, one rounding."""
    cdef const uint32_t[:, ::1] av = np.ascontiguousarray(a, dtype=np.uint32)
    cdef const uint32_t[:, ::1] bv = np.ascontiguousarray(b, dtype=np.uint32)
    cdef Py_ssize_t n = av.shape[0], kk = av.shape[1], m = bv.shape[1]
    if bv.shape[0] != kk:
        raise ValueError("inner dimensions differ")
    out = np.empty((n, m), dtype=np.uint32)
    cdef uint32_t[:, ::1] ov = out
    cdef px_unpacked *ua = <px_unpacked *> malloc(n * kk * sizeof(px_unpacked))
    cdef px_unpacked *ub = <px_unpacked *> malloc(kk * m * sizeof(px_unpacked))
    if ua == NULL or ub == NULL:
        free(ua)
        free(ub)
        raise MemoryError()
    cdef Py_ssize_t i, j, k
    cdef uint64_t w[8]
    cdef int nar_flag
    cdef px_unpacked x, y
    try:
        with nogil:
            for i in range(n):
                for k in range(kk):
                    ua[i * kk + k] = px_split(av[i, k])
            for k in range(kk):
                for j in range(m):
                    ub[k * m + j] = px_split(bv[k, j])
            for i in range(n):
                for j in range(m):
                    pq_clear(w)
                    nar_flag = 0
                    for k in range(kk):
                        x = ua[i * kk + k]
                        y = ub[k * m + j]
                        if x.status == PX_NAR or y.status == PX_NAR:
                            nar_flag = 1
                        elif x.status == PX_REGULAR and y.status == PX_REGULAR:
                            pq_mac(w, x, y, 0)
                    ov[i, j] = <uint32_t> 0x80000000 if nar_flag else pq_round(w)
    finally:
        free(ua)
        free(ub)
    return out


def gemm_posit_noquire(a, b):
    """Posit32 C = A @ B with a rounded multiply then a rounded add per step."""
    cdef const uint32_t[:, ::1] av = np.ascontiguousarray(a, dtype=np.uint32)
    cdef const uint32_t[:, ::1] bv = np.ascontiguousarray(b, dtype=np.uint32)
    cdef Py_ssize_t n = av.shape[0], kk = av.shape[1], m = bv.shape[1]
    if bv.shape[0] != kk:
        raise ValueError("inner dimensions differ")
    out = np.empty((n, m), dtype=np.uint32)
    cdef uint32_t[:, ::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef uint32_t c
    with nogil:
        for i in range(n):
            for j in range(m):
                c = 0
                for k in range(kk):
                    c = px_add(c, px_mul(av[i, k], bv[k, j], 32), 32)
                ov[i, j] = c
    return out


def gemm_f32(a, b, bint fused=True):
    cdef const float[:, ::1] av = np.ascontiguousarray(a, dtype=np.float32)
    cdef const float[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float32)
    cdef Py_ssize_t n = av.shape[0], kk = av.shape[1], m = bv.shape[1]
    if bv.shape[0] != kk:
        raise ValueError("inner dimensions differ")
    out = np.empty((n, m), dtype=np.float32)
    cdef float[:, ::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef float c, p
    with nogil:
        for i in range(n):
            for j in range(m):
                c = 0.0
                for k in range(kk):
                    if fused:
                        c = fmaf(av[i, k], bv[k, j], c)
                    else:
                        p = av[i, k] * bv[k, j]
                        c = c + p
                ov[i, j] = c
    return out


def gemm_f64(a, b, bint fused=True):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], kk = av.shape[1], m = bv.shape[1]
    if bv.shape[0] != kk:
        raise ValueError("inner dimensions differ")
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef double c, p
    with nogil:
        for i in range(n):
            for j in range(m):
                c = 0.0
                for k in range(kk):
                    if fused:
                        c = fma(av[i, k], bv[k, j], c)
                    else:
                        p = av[i, k] * bv[k, j]
                        c = c + p
                ov[i, j] = c
    return out
