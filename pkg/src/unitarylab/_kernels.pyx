# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels; see _kernels_py for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, cos, sin, M_PI

cnp.import_array()


cdef inline int _ctz(long long i) nogil:
    cdef int b = 0
    while (i & 1) == 0:
        i >>= 1
        b += 1
    return b


def _signs_of_gray(long long i, int n):
    cdef long long g = i ^ (i >> 1)
    x = np.empty(n, dtype=np.int8)
    cdef int b
    for b in range(n):
        x[b] = -1 if (g >> b) & 1 else 1
    return x


def _gray_rows(idx, int n):
    g = idx ^ (idx >> 1)
    return (1 - 2 * ((g[:, None] >> np.arange(n, dtype=np.int64)) & 1)).astype(np.int8)


def lhv_pm1(core):
    cdef double[:, ::1] A = np.ascontiguousarray(core, dtype=np.float64)
    cdef int rows = A.shape[0]
    cdef int n = A.shape[1]
    cdef long long total = 1LL << (n - 1)
    cdef double[::1] v = np.zeros(rows)
    cdef signed char[::1] x = np.ones(n, dtype=np.int8)
    cdef double scale = max(1.0, float(np.abs(np.asarray(A)).sum()))
    cdef double tol = 1e-12 * scale
    cdef double best, val
    cdef long long i, best_i = 0
    cdef int r, c, b
    with nogil:
        for r in range(rows):
            val = 0.0
            for c in range(n):
                val += A[r, c]
            v[r] = val
        best = 0.0
        for r in range(rows):
            best += fabs(v[r])
        for i in range(1, total):
            b = _ctz(i)
            x[b] = -x[b]
            val = 0.0
            if x[b] > 0:
                for r in range(rows):
                    v[r] += 2.0 * A[r, b]
                    val += fabs(v[r])
            else:
                for r in range(rows):
                    v[r] -= 2.0 * A[r, b]
                    val += fabs(v[r])
            if val > best + tol:
                best = val
                best_i = i
    return float(best), _signs_of_gray(best_i, n)


def lhv_qary(M, int q, int m):
    cdef double complex[:, ::1] A = np.ascontiguousarray(M, dtype=np.complex128)
    cdef int N = q * m
    cdef double complex[::1] w = np.exp(2j * np.pi * np.arange(q) / q)
    cdef long long total = 1
    cdef int k
    for k in range(m):
        total *= q
    cdef long long[::1] a = np.zeros(m, dtype=np.int64)
    cdef long long[::1] best_b = np.zeros(m, dtype=np.int64)
    cdef long long[::1] cur_b = np.zeros(m, dtype=np.int64)
    cdef double complex[::1] v = np.zeros(N, dtype=np.complex128)
    cdef double scale = max(1.0, float(np.abs(np.asarray(A)).sum()))
    cdef double tol = 1e-12 * scale
    cdef double best = -1e300, val, colbest, sb
    cdef double complex acc, delta
    cdef long long i, best_i = 0, ii
    cdef int x, s, t, y, bb, col, digit, olda, carry
    with nogil:
        for col in range(N):
            acc = 0
            for s in range(q):
                for x in range(m):
                    acc = acc + A[s * m + x, col]
            v[col] = acc
        i = 0
        while True:
            val = 0.0
            for y in range(m):
                colbest = -1e300
                for bb in range(q):
                    acc = 0
                    for t in range(q):
                        acc = acc + w[(bb * t) % q] * v[t * m + y]
                    sb = acc.real
                    if sb > colbest:
                        colbest = sb
                        cur_b[y] = bb
                val += colbest
            if val > best + tol:
                best = val
                best_i = i
                for y in range(m):
                    best_b[y] = cur_b[y]
            i += 1
            if i >= total:
                break
            # odometer step, a[0] fastest
            digit = 0
            carry = 1
            while carry:
                olda = <int>a[digit]
                a[digit] = (olda + 1) % q
                carry = 1 if a[digit] == 0 else 0
                for s in range(1, q):
                    delta = w[(a[digit] * s) % q] - w[(olda * s) % q]
                    for col in range(N):
                        v[col] = v[col] + delta * A[s * m + digit, col]
                digit += 1
            if digit > 3:
                # refresh to bound drift from repeated updates
                for col in range(N):
                    acc = 0
                    for s in range(q):
                        for x in range(m):
                            acc = acc + w[(a[x] * s) % q] * A[s * m + x, col]
                    v[col] = acc
    a_out = np.empty(m, dtype=np.int64)
    ii = best_i
    for k in range(m):
        a_out[k] = ii % q
        ii //= q
    return float(best), a_out, np.asarray(best_b).copy()


def optimal_pm1(H, double tol=1e-9):
    cdef double[:, ::1] A = np.ascontiguousarray(H, dtype=np.float64)
    cdef int n = A.shape[0]
    cdef int cols = A.shape[1]
    cdef long long total = 1LL << (n - 1)
    cdef double[::1] v = np.zeros(cols)
    cdef signed char[::1] x = np.ones(n, dtype=np.int8)
    vals_arr = np.empty(total)
    cdef double[::1] vals = vals_arr
    cdef double val
    cdef long long i
    cdef int r, c, b
    with nogil:
        for c in range(cols):
            val = 0.0
            for r in range(n):
                val += A[r, c]
            v[c] = val
        val = 0.0
        for c in range(cols):
            val += fabs(v[c])
        vals[0] = val
        for i in range(1, total):
            b = _ctz(i)
            x[b] = -x[b]
            val = 0.0
            if x[b] > 0:
                for c in range(cols):
                    v[c] += 2.0 * A[b, c]
                    val += fabs(v[c])
            else:
                for c in range(cols):
                    v[c] -= 2.0 * A[b, c]
                    val += fabs(v[c])
            vals[i] = val
    best = float(vals_arr.max())
    hit = np.nonzero(vals_arr >= best - tol)[0]
    return best, _gray_rows(hit, n)


def unbiased_pm1(H, double target, double tol=1e-9):
    cdef double[:, ::1] A = np.ascontiguousarray(H, dtype=np.float64)
    cdef int rows = A.shape[0]
    cdef int n = A.shape[1]
    cdef long long total = 1LL << n
    cdef double[::1] v = np.zeros(rows)
    cdef signed char[::1] x = np.ones(n, dtype=np.int8)
    hits = []
    cdef long long i
    cdef int r, c, b, ok
    cdef double val
    for r in range(rows):
        val = 0.0
        for c in range(n):
            val += A[r, c]
        v[r] = val
    for i in range(total):
        if i > 0:
            b = _ctz(i)
            x[b] = -x[b]
            if x[b] > 0:
                for r in range(rows):
                    v[r] += 2.0 * A[r, b]
            else:
                for r in range(rows):
                    v[r] -= 2.0 * A[r, b]
        ok = 1
        for r in range(rows):
            if fabs(fabs(v[r]) - target) > tol:
                ok = 0
                break
        if ok:
            hits.append(i)
    if not hits:
        return np.zeros((0, n), dtype=np.int8)
    return _gray_rows(np.array(hits, dtype=np.int64), n)
