# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled row-reduction kernels.

These mirror the pure-Python kernels in intres.exactla exactly (same pivot
choices, same arithmetic), so results are identical whichever is loaded.
"""

from libc.stdlib cimport malloc, free


def rref_frac(list data, Py_ssize_t nrows, Py_ssize_t ncols):
    """In-place RREF over an exact scalar type (mpq/Fraction entries)."""
    cdef Py_ssize_t r = 0, c, i, j, p, base, row, pr, pp
    cdef list pivots = []
    cdef object piv, factor, x, tmp
    for c in range(ncols):
        p = -1
        for i in range(r, nrows):
            if data[i * ncols + c]:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            pr = r * ncols
            pp = p * ncols
            for j in range(c, ncols):
                tmp = data[pr + j]
                data[pr + j] = data[pp + j]
                data[pp + j] = tmp
        piv = data[r * ncols + c]
        if piv != 1:
            base = r * ncols
            for j in range(c, ncols):
                if data[base + j]:
                    data[base + j] = data[base + j] / piv
        for i in range(nrows):
            if i == r:
                continue
            factor = data[i * ncols + c]
            if factor:
                base = r * ncols
                row = i * ncols
                for j in range(c, ncols):
                    x = data[base + j]
                    if x:
                        data[row + j] = data[row + j] - factor * x
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return data, pivots


cdef long long _modpow(long long b, long long e, long long p):
    cdef long long acc = 1
    b %= p
    while e:
        if e & 1:
            acc = acc * b % p
        b = b * b % p
        e >>= 1
    return acc


def rref_mod(list data, Py_ssize_t nrows, Py_ssize_t ncols, long long p):
    """In-place RREF over GF(p) with int entries in [0, p), p < 2**31."""
    cdef Py_ssize_t n = nrows * ncols
    cdef long long *buf = <long long *> malloc(n * sizeof(long long))
    if buf == NULL and n > 0:
        raise MemoryError()
    cdef Py_ssize_t r = 0, c, i, j, piv_row, base, row
    cdef long long inv, factor, x, tmp
    cdef list pivots = []
    try:
        for i in range(n):
            buf[i] = data[i]
        for c in range(ncols):
            piv_row = -1
            for i in range(r, nrows):
                if buf[i * ncols + c]:
                    piv_row = i
                    break
            if piv_row < 0:
                continue
            if piv_row != r:
                base = r * ncols
                row = piv_row * ncols
                for j in range(c, ncols):
                    tmp = buf[base + j]
                    buf[base + j] = buf[row + j]
                    buf[row + j] = tmp
            inv = _modpow(buf[r * ncols + c], p - 2, p)
            if inv != 1:
                base = r * ncols
                for j in range(c, ncols):
                    if buf[base + j]:
                        buf[base + j] = buf[base + j] * inv % p
            for i in range(nrows):
                if i == r:
                    continue
                factor = buf[i * ncols + c]
                if factor:
                    base = r * ncols
                    row = i * ncols
                    for j in range(c, ncols):
                        x = buf[base + j]
                        if x:
                            buf[row + j] = (buf[row + j] - factor * x) % p
                            if buf[row + j] < 0:
                                buf[row + j] += p
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        for i in range(n):
            data[i] = buf[i]
    finally:
        free(buf)
    return data, pivots
