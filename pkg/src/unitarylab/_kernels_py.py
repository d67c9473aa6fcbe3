"""Pure numpy versions of the enumeration kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and the same tie-breaking (first maximizer in enumeration order).
Enumeration over sign vectors follows the binary reflected Gray code: step i
visits g = i ^ (i >> 1), where bit b of g set means x[b] = -1.
"""

import numpy as np

CHUNK = 1 << 15


def _gray_signs(start, stop, n):
    return _signs_at(np.arange(start, stop, dtype=np.int64), n)


def _signs_at(i, n):
    i = np.asarray(i, dtype=np.int64)
    g = i ^ (i >> 1)
    bits = (g[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.float64)


def lhv_pm1(core):
    """max over x in {+-1}^n of ||core x||_1, with x[n-1] = +1 fixed."""
    A = np.ascontiguousarray(core, dtype=np.float64)
    n = A.shape[1]
    total = 1 << (n - 1)
    best, best_i = -np.inf, 0
    scale = max(1.0, float(np.abs(A).sum()))
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        X = _gray_signs(start, stop, n)
        vals = np.abs(X @ A.T).sum(axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best + 1e-12 * scale:
            best, best_i = float(vals[k]), start + k
    x = _gray_signs(best_i, best_i + 1, n)[0].astype(np.int8)
    return best, x


def lhv_qary(M, q, m):
    """Max of Re sum_{s,t,x,y} w^(a_x s + b_y t) M[ms+x, mt+y] over a, b in Z_q^m.

    a is enumerated in odometer order (a[0] fastest); for each a the best b
    is chosen column group by column group.
    """
    M = np.ascontiguousarray(M, dtype=np.complex128)
    N = q * m
    w = np.exp(2j * np.pi * np.arange(q) / q)
    total = q ** m
    radix = q ** np.arange(m, dtype=np.int64)
    # phase table: row b, column t -> w^(b t)
    bt = w[(np.arange(q)[:, None] * np.arange(q)[None, :]) % q]
    best, best_i, best_b = -np.inf, 0, None
    scale = max(1.0, float(np.abs(M).sum()))
    s_of = np.arange(N) // m
    x_of = np.arange(N) % m
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        idx = np.arange(start, stop, dtype=np.int64)
        A = (idx[:, None] // radix) % q  # (chunk, m)
        coef = w[(A[:, x_of] * s_of) % q]  # (chunk, N)
        V = (coef @ M).reshape(-1, q, m)  # (chunk, t, y)
        S = np.einsum("bt,kty->kby", bt, V).real  # (chunk, b, y)
        bsel = np.argmax(S, axis=1)  # (chunk, y)
        vals = np.take_along_axis(S, bsel[:, None, :], axis=1)[:, 0, :].sum(axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best + 1e-12 * scale:
            best, best_i, best_b = float(vals[k]), start + k, bsel[k].copy()
    a = ((best_i // radix) % q).astype(np.int64)
    return best, a, best_b.astype(np.int64)


def optimal_pm1(H, tol=1e-9):
    """All x in {+-1}^n (x[n-1] = +1) reaching max ||H^T x||_1, in Gray order."""
    A = np.ascontiguousarray(H, dtype=np.float64)
    n = A.shape[0]
    total = 1 << (n - 1)
    vals = np.empty(total)
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        X = _gray_signs(start, stop, n)
        vals[start:stop] = np.abs(X @ A).sum(axis=1)
    best = float(vals.max())
    hit = np.nonzero(vals >= best - tol)[0]
    return best, _signs_at(hit, n).astype(np.int8)


def unbiased_pm1(H, target, tol=1e-9):
    """All x in {+-1}^n with |<row_j, x>| = target for every row, in Gray order."""
    A = np.ascontiguousarray(H, dtype=np.float64)
    n = A.shape[1]
    total = 1 << n
    found = []
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        X = _gray_signs(start, stop, n)
        ok = np.all(np.abs(np.abs(X @ A.T) - target) <= tol, axis=1)
        if ok.any():
            found.append(X[ok])
    if not found:
        return np.zeros((0, n), dtype=np.int8)
    return np.vstack(found).astype(np.int8)
