/* Fixed-width posit(n, 2) primitives for n <= 32 and a 512-bit quire. */
#ifndef XPOSIT_KERNELS_H
#define XPOSIT_KERNELS_H

#include <math.h>
#include <stdint.h>
#include <string.h>

#define PX_REGULAR 0
#define PX_ZERO 1
#define PX_NAR 2

static inline uint32_t px_mask(int n) { return n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1u); }
static inline uint32_t px_nar(int n) { return 1u << (n - 1); }
static inline uint32_t px_maxpos(int n) { return (1u << (n - 1)) - 1u; }

/* Sign-magnitude unpack. frac holds the fraction bits left aligned (bit 63
 * first), without the hidden bit. |value| = (1 + frac/2^64) * 2^scale. */
static inline int px_unpack(uint32_t bits, int n, int *neg, int *scale, uint64_t *frac)
{
    uint32_t m = px_mask(n);
    bits &= m;
    if (bits == 0)
        return PX_ZERO;
    if (bits == px_nar(n))
        return PX_NAR;
    *neg = (bits >> (n - 1)) & 1;
    if (*neg)
        bits = (0u - bits) & m;
    uint64_t t = ((uint64_t)bits) << (65 - n);
    int k, r;
    if (t >> 63) {
        k = __builtin_clzll(~t);
        r = k - 1;
    } else {
        k = __builtin_clzll(t);
        r = -k;
    }
    uint64_t rem = t << (k + 1);
    *scale = 4 * r + (int)(rem >> 62);
    *frac = rem << 2;
    return PX_REGULAR;
}

/* Round (1 + frac/2^64 + sticky) * 2^scale to n bits, ties to even on the
 * bit string, saturating at maxpos/minpos. */
static inline uint32_t px_pack(int neg, int scale, uint64_t frac, int sticky, int n)
{
    uint32_t maxpos = px_maxpos(n);
    int lim = 4 * (n - 2);
    uint64_t mag;
    if (scale > lim) {
        mag = maxpos;
    } else if (scale < -lim) {
        mag = 1;
    } else {
        int r = scale >= 0 ? scale / 4 : -((-scale + 3) / 4);
        int e = scale - 4 * r;
        uint64_t reg;
        int rlen;
        if (r >= 0) {
            rlen = r + 2;
            reg = ((1ull << (r + 1)) - 1) << 1;
        } else {
            rlen = 1 - r;
            reg = 1;
        }
        uint64_t s = reg << (64 - rlen);
        s |= ((uint64_t)e) << (62 - rlen);
        int fs = rlen + 2;
        s |= frac >> fs;
        sticky |= (frac & ((1ull << fs) - 1)) != 0;
        int keep = n - 1;
        mag = s >> (64 - keep);
        uint64_t guard = (s >> (63 - keep)) & 1;
        sticky |= (s & ((1ull << (63 - keep)) - 1)) != 0;
        if (guard && (sticky || (mag & 1)))
            mag++;
        if (mag > maxpos)
            mag = maxpos;
        if (mag == 0)
            mag = 1;
    }
    uint32_t out = (uint32_t)mag;
    return neg ? ((0u - out) & px_mask(n)) : out;
}

static inline uint32_t px_mul(uint32_t a, uint32_t b, int n)
{
    int na = 0, nb = 0, sa = 0, sb = 0;
    uint64_t fa = 0, fb = 0;
    int ka = px_unpack(a, n, &na, &sa, &fa);
    int kb = px_unpack(b, n, &nb, &sb, &fb);
    if (ka == PX_NAR || kb == PX_NAR)
        return px_nar(n);
    if (ka == PX_ZERO || kb == PX_ZERO)
        return 0;
    uint64_t ma = (1ull << 31) | (fa >> 33);
    uint64_t mb = (1ull << 31) | (fb >> 33);
    uint64_t p = ma * mb;
    int scale = sa + sb;
    uint64_t frac;
    if (p >> 63) {
        scale++;
        frac = p << 1;
    } else {
        frac = p << 2;
    }
    return px_pack(na ^ nb, scale, frac, 0, n);
}

static inline uint32_t px_add(uint32_t a, uint32_t b, int n)
{
    int na = 0, nb = 0, sa = 0, sb = 0;
    uint64_t fa = 0, fb = 0;
    int ka = px_unpack(a, n, &na, &sa, &fa);
    int kb = px_unpack(b, n, &nb, &sb, &fb);
    if (ka == PX_NAR || kb == PX_NAR)
        return px_nar(n);
    if (ka == PX_ZERO)
        return b & px_mask(n);
    if (kb == PX_ZERO)
        return a & px_mask(n);
    uint64_t ma = (1ull << 61) | (fa >> 3);
    uint64_t mb = (1ull << 61) | (fb >> 3);
    if (sb > sa || (sb == sa && mb > ma)) {
        int ti = na; na = nb; nb = ti;
        ti = sa; sa = sb; sb = ti;
        uint64_t tu = ma; ma = mb; mb = tu;
    }
    int d = sa - sb;
    if (d >= 62)
        mb = 1;
    else if (d > 0)
        mb = (mb >> d) | ((mb & ((1ull << d) - 1)) != 0);
    uint64_t s = (na == nb) ? ma + mb : ma - mb;
    if (s == 0)
        return 0;
    int p = 63 - __builtin_clzll(s);
    uint64_t frac = p == 0 ? 0 : s << (64 - p);
    return px_pack(na, sa + (p - 61), frac, 0, n);
}

static inline uint32_t px_from_double(double x, int n)
{
    if (isnan(x))
        return px_nar(n);
    if (x == 0.0)
        return 0;
    if (isinf(x))
        return x > 0 ? px_maxpos(n) : ((0u - px_maxpos(n)) & px_mask(n));
    uint64_t u;
    memcpy(&u, &x, sizeof u);
    int neg = (int)(u >> 63);
    int ex = (int)((u >> 52) & 0x7FF);
    uint64_t man = u & ((1ull << 52) - 1);
    int scale;
    uint64_t frac;
    if (ex == 0) {
        int p = 63 - __builtin_clzll(man);
        scale = p - 1074;
        frac = p == 0 ? 0 : man << (64 - p);
    } else {
        scale = ex - 1023;
        frac = man << 12;
    }
    return px_pack(neg, scale, frac, 0, n);
}

static inline double px_to_double(uint32_t bits, int n)
{
    int neg = 0, scale = 0;
    uint64_t frac = 0;
    int kind = px_unpack(bits, n, &neg, &scale, &frac);
    if (kind == PX_ZERO)
        return 0.0;
    if (kind == PX_NAR)
        return NAN;
    /* n <= 32 leaves at most 28 significant bits: exact in a double */
    double v = ldexp((double)((1ull << 31) | (frac >> 33)), scale - 31);
    return neg ? -v : v;
}

/* ---- 512-bit quire for posit32, little-endian limbs, 2's complement ---- */

#define PQ_LIMBS 8
#define PQ_FRAC 240

typedef struct {
    int status; /* PX_REGULAR / PX_ZERO / PX_NAR */
    int neg;
    int scale;
    uint32_t sig; /* hidden bit at 31, 31 fraction bits */
} px_unpacked;

static inline px_unpacked px_split(uint32_t bits)
{
    px_unpacked u = {0, 0, 0, 0};
    uint64_t frac = 0;
    u.status = px_unpack(bits, 32, &u.neg, &u.scale, &frac);
    u.sig = (uint32_t)((1ull << 31) | (frac >> 33));
    return u;
}

static inline void pq_clear(uint64_t *w)
{
    for (int i = 0; i < PQ_LIMBS; i++)
        w[i] = 0;
}

/* w += sign * p * 2^shift, modulo 2^512 */
static inline void pq_add_shifted(uint64_t *w, uint64_t p, int shift, int neg)
{
    if (shift < 0) {
        p >>= -shift;
        shift = 0;
    }
    int idx = shift >> 6, off = shift & 63;
    uint64_t lo = p << off;
    uint64_t hi = off ? (p >> (64 - off)) : 0;
    if (!neg) {
        unsigned __int128 c = (unsigned __int128)w[idx] + lo;
        w[idx] = (uint64_t)c;
        c >>= 64;
        for (int i = idx + 1; i < PQ_LIMBS; i++) {
            c += (unsigned __int128)w[i] + (i == idx + 1 ? hi : 0);
            w[i] = (uint64_t)c;
            c >>= 64;
            if (!c)
                break;
        }
    } else {
        uint64_t x = w[idx];
        uint64_t borrow = x < lo;
        w[idx] = x - lo;
        for (int i = idx + 1; i < PQ_LIMBS; i++) {
            uint64_t sub = i == idx + 1 ? hi : 0;
            x = w[i];
            uint64_t y = x - sub;
            uint64_t b1 = x < sub;
            uint64_t b2 = y < borrow;
            w[i] = y - borrow;
            borrow = b1 | b2;
            if (!borrow)
                break;
        }
    }
}

static inline void pq_mac(uint64_t *w, px_unpacked a, px_unpacked b, int subtract)
{
    uint64_t p = (uint64_t)a.sig * (uint64_t)b.sig;
    /* p has 62 fraction bits; quire LSB is 2^-240 */
    pq_add_shifted(w, p, a.scale + b.scale - 62 + PQ_FRAC, (a.neg ^ b.neg) ^ subtract);
}

static inline uint32_t pq_round(const uint64_t *w)
{
    uint64_t m[PQ_LIMBS];
    int neg = (int)(w[PQ_LIMBS - 1] >> 63);
    if (neg) {
        unsigned __int128 c = 1;
        for (int i = 0; i < PQ_LIMBS; i++) {
            c += (uint64_t)~w[i];
            m[i] = (uint64_t)c;
            c >>= 64;
        }
    } else {
        memcpy(m, w, sizeof m);
    }
    int top = -1;
    for (int i = PQ_LIMBS - 1; i >= 0; i--) {
        if (m[i]) {
            top = 64 * i + 63 - __builtin_clzll(m[i]);
            break;
        }
    }
    if (top < 0)
        return 0;
    /* the 64 bits just below the leading one, then a sticky over the rest */
    int lo = top - 64;
    uint64_t frac = 0;
    int sticky = 0;
    if (lo >= 0) {
        int idx = lo >> 6, off = lo & 63;
        frac = m[idx] >> off;
        if (off)
            frac |= m[idx + 1] << (64 - off);
        for (int i = 0; i < idx; i++)
            sticky |= m[i] != 0;
        if (off)
            sticky |= (m[idx] & ((1ull << off) - 1)) != 0;
    } else if (lo > -64) {
        frac = m[0] << (-lo);
    }
    return px_pack(neg, top - PQ_FRAC, frac, sticky, 32);
}

#endif
