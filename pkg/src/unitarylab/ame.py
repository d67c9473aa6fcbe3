"""Bipartite unitaries of order d^2: realignments, entangling power, the
isoentropic projection, the polar dynamical map and a few explicit matrices
(the best permutation of order 36, its orthogonal improvements and an exact
2-unitary of order 36).

Index convention: U[d*j + k, d*l + m] = <j,k|U|l,m>.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DegenerateInput, DimensionError, UsageError
from .numerics import (DEFAULT_TOL, ToleranceConfig, _polar_unchecked, as_matrix,
                       haar_unitary, unitarity_residual)


@dataclass
class EpGtPoint:
    e_p: float
    g_t: float


@dataclass
class MapRunRecord:
    iterations: int
    trajectory: list
    outcome: str  # "two_unitary" | "attractor_Q" | "exhausted"
    final: np.ndarray = field(repr=False)


def local_dim(M) -> int:
    n = np.shape(M)[0]
    d = int(round(np.sqrt(n)))
    if d * d != n or d < 1:
        raise DimensionError(f"matrix order {n} is not a perfect square")
    return d


def _bipartite(M, d=None):
    M = as_matrix(M, square=True)
    dd = local_dim(M)
    if d is not None and d != dd:
        raise DimensionError(f"matrix order {M.shape[0]} does not match d={d}")
    return M, dd


# ------------------------------------------------------------ realignments

_AXES = {"R": (0, 2, 1, 3), "Gamma": (0, 3, 2, 1)}


def realign(M, kind: str, d: int | None = None) -> np.ndarray:
    """R: U_jk,lm -> U_jl,km.  Gamma: U_jk,lm -> U_jm,lk.  T: transpose."""
    M, d = _bipartite(M, d)
    if kind == "T":
        return M.T.copy()
    if kind not in _AXES:
        raise UsageError(f"unknown realignment {kind!r}; use R, Gamma or T")
    return M.reshape(d, d, d, d).transpose(_AXES[kind]).reshape(d * d, d * d)


def _R(M, d):
    return M.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def _G(M, d):
    return M.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)


def linear_entropy(M) -> float:
    """E(M) = n/(n-1) (1 - Tr(MM^+MM^+)/Tr^2(MM^+)) for M of order n."""
    M = np.asarray(M)
    n = M.shape[0]
    P = M @ M.conj().T
    t = np.trace(P).real
    if t <= 0:
        raise DegenerateInput("linear entropy of the zero matrix is undefined")
    t2 = np.vdot(P, P).real  # Tr(P P) for Hermitian P
    return float(n / (n - 1.0) * (1.0 - t2 / (t * t)))


def swap(d: int) -> np.ndarray:
    if d < 2:
        raise UsageError("swap needs d >= 2")
    S = np.zeros((d * d, d * d))
    j, k = np.divmod(np.arange(d * d), d)
    S[k * d + j, j * d + k] = 1.0
    return S


def ep_gt(M, d: int | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> EpGtPoint:
    M, d = _bipartite(M, d)
    if unitarity_residual(M) > 1e-6 * M.shape[0]:
        warnings.warn("ep_gt called on a non-unitary matrix", RuntimeWarning, stacklevel=2)
    a = linear_entropy(_R(M, d))
    # US permutes columns: (US)[:, jd+k] = U[:, kd+j]
    US = M.reshape(-1, d, d).transpose(0, 2, 1).reshape(d * d, d * d)
    b = linear_entropy(_R(US, d))
    return EpGtPoint(a + b - 1.0, a - b + 1.0)


def entangling_power(M, d: int | None = None) -> float:
    return ep_gt(M, d).e_p


def gate_typicality(M, d: int | None = None) -> float:
    return ep_gt(M, d).g_t


def is_two_unitary(M, tol: float = DEFAULT_TOL.unitarity_tol, d: int | None = None) -> bool:
    M, d = _bipartite(M, d)
    return all(unitarity_residual(X) <= tol for X in (M, _R(M, d), _G(M, d)))


def two_unitarity_report(M, d: int | None = None) -> dict:
    M, d = _bipartite(M, d)
    pt = ep_gt(M, d)
    return {"d": d,
            "residual": unitarity_residual(M),
            "residual_R": unitarity_residual(_R(M, d)),
            "residual_Gamma": unitarity_residual(_G(M, d)),
            "E": linear_entropy(M), "E_R": linear_entropy(_R(M, d)),
            "E_Gamma": linear_entropy(_G(M, d)),
            "e_p": pt.e_p, "g_t": pt.g_t}


# ------------------------------------------------------- explicit matrices

# Two Latin squares of order 6 that are orthogonal except at two cells; the
# superimposed pair (j, k) in cell (a, b) places |a j><b k| in the matrix.
_L1 = [[1, 2, 3, 4, 5, 6],
       [2, 1, 4, 3, 6, 5],
       [3, 4, 6, 5, 1, 2],
       [4, 3, 5, 6, 2, 1],
       [5, 6, 2, 1, 4, 3],
       [6, 5, 1, 2, 3, 4]]
_L2 = [[1, 2, 3, 4, 5, 6],
       [3, 4, 5, 6, 1, 2],
       [2, 1, 4, 3, 6, 5],
       [6, 5, 1, 2, 4, 3],
       [4, 3, 6, 5, 2, 1],
       [5, 6, 2, 1, 3, 4]]

P36_VECTOR = (1, 15, 8, 29, 36, 22, 16, 2, 30, 7, 21, 35, 23, 31, 3, 18, 10, 26,
              32, 24, 17, 4, 25, 9, 12, 28, 33, 20, 5, 13, 27, 11, 19, 34, 14, 6)
AME43_VECTOR = (3, 7, 5, 4, 2, 9, 8, 6, 1)


def permutation_from_vector(v) -> np.ndarray:
    """Column j carries its unit in row v[j] (1-based)."""
    v = np.asarray(v, dtype=int) - 1
    n = v.size
    if sorted(v.tolist()) != list(range(n)):
        raise ContractViolation("not a permutation vector")
    P = np.zeros((n, n))
    P[v, np.arange(n)] = 1.0
    return P


def permutation_from_squares(L1, L2) -> np.ndarray:
    L1 = np.asarray(L1) - 1
    L2 = np.asarray(L2) - 1
    d = L1.shape[0]
    P = np.zeros((d * d, d * d))
    a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    P[(a * d + L1).ravel(), (b * d + L2).ravel()] = 1.0
    return P


def permutation_P36() -> np.ndarray:
    return permutation_from_squares(_L1, _L2)


def ame43() -> np.ndarray:
    return permutation_from_vector(AME43_VECTOR)


def rotation(w: float) -> np.ndarray:
    c, s = np.cos(w), np.sin(w)
    return np.array([[c, -s], [s, c]])


def _block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.result_type(*blocks))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def _phases(w, count, name):
    w = np.asarray(w, dtype=float).ravel()
    if w.size != count:
        raise UsageError(f"{name} takes {count} phases, got {w.size}")
    return w


def build_Q(w1: float, w2: float) -> np.ndarray:
    I2 = np.eye(2)
    Q0 = _block_diag([I2, rotation(w1), np.eye(28), rotation(w2), I2])
    return Q0 @ permutation_P36()


def build_V(w) -> np.ndarray:
    w = _phases(w, 18, "build_V")
    return _block_diag([rotation(x) for x in w]) @ permutation_P36()


def build_W(w) -> np.ndarray:
    w = _phases(w, 6, "build_W")
    I2 = np.eye(2)
    return _block_diag([b for x in w for b in (I2, rotation(x), I2)]) @ permutation_P36()


Q_STAR_PHASES = np.pi * np.array([5 / 6, 1 / 6])
V_STAR_PHASES = np.pi * np.array([1 / 5, 5 / 6, 1 / 4, 6 / 5, 3 / 4, 1 / 4, 6 / 5, 7 / 12, 5 / 4,
                                  6 / 5, 5 / 3, 5 / 4, 6 / 5, 3 / 2, 5 / 4, 6 / 5, 17 / 12, 5 / 4])
W_PHASES = np.pi * np.array([5 / 6, 23 / 12, 1 / 12, 0, 7 / 6, 5 / 4])


# Golden 2-unitary of order 36: three 12x12 blocks, entries coef * w^k with
# w = exp(i pi/10); "." is zero.
_GOLDEN_BLOCKS = (
    ('. . c19 . . . b18 . . . . a6',
     '. c9 . . . . . a3 b0 . . .',
     '. . . c7 c15 . . . . b13 b14 .',
     '. . . b2 b14 . . . . c2 c19 .',
     '. b5 . . . a19 . . c6 . . .',
     'a19 . b17 . . . c6 . . . . .',
     'a0 . b8 . . . c17 . . . . .',
     '. b6 . . . a10 . . c7 . . .',
     '. . . b16 b12 . . . . c12 c1 .',
     '. . . c1 c1 . . . . b11 b16 .',
     '. c12 . . . . . a16 b3 . . .',
     '. . c16 . . . b15 . . . . a13'),
    ('. . b0 . . . . a13 c16 . . .',
     'b18 . . . c1 a14 . . . . . .',
     '. . . a15 . . . . . b1 . c3',
     '. . . . . . a18 . . c2 . b14',
     'c8 a14 . . b1 . . . . . . .',
     '. . c0 . . . . . b6 . a0 .',
     '. . c11 . . . . . b17 . a1 .',
     'c1 a17 . . b14 . . . . . . .',
     '. . . . . . a6 . . c0 . b12',
     '. . . a15 . . . . . b11 . c13',
     'b1 . . . c4 a7 . . . . . .',
     '. . b1 . . . . a4 c17 . . .'),
    ('b4 . . . . . a8 . . c14 . .',
     '. . a14 . . . . b6 . . . c17',
     '. b6 . . c16 . . . a0 . . .',
     '. c19 . . b19 . . . . . a15 .',
     '. . . . . a1 . c8 . . . b9',
     'c0 . . a14 . . . . . b0 . .',
     'c2 . . a6 . . . . . b2 . .',
     '. . . . . a19 . c16 . . . b17',
     '. c12 . . b12 . . . . . a18 .',
     '. b15 . . c5 . . . a19 . . .',
     '. . a6 . . . . b8 . . . c19',
     'b8 . . . . . a2 . . c18 . .'),
)


def golden_coefficients() -> dict:
    s5 = np.sqrt(5.0)
    return {"a": 1 / np.sqrt(2.0),
            "b": 1 / np.sqrt(5 + s5),
            "c": np.sqrt(5 + s5) / (2 * s5)}


def _golden_block(rows, coef, w):
    B = np.zeros((12, 12), dtype=complex)
    for i, row in enumerate(rows):
        for j, tok in enumerate(row.split()):
            if tok != ".":
                B[i, j] = coef[tok[0]] * w ** int(tok[1:])
    return B


def golden_ame() -> np.ndarray:
    """A = (B1 + B2 + B3) P36^T, a 2-unitary matrix of order 36 with 112 nonzeros."""
    coef = golden_coefficients()
    w = np.exp(1j * np.pi / 10)
    blocks = [_golden_block(rows, coef, w) for rows in _GOLDEN_BLOCKS]
    return _block_diag(blocks) @ permutation_P36().T


# --------------------------------------------------------- isoentropic map

def iso_map(X, d: int | None = None) -> np.ndarray:
    """Y = (X + X^{R Gamma} + X^{Gamma R}) / 3."""
    X, d = _bipartite(X, d)
    XRG = _G(_R(X, d), d)
    XGR = _R(_G(X, d), d)
    return (X + XRG + XGR) / 3.0


def iso_sequence(X, steps: int, d: int | None = None) -> np.ndarray:
    """Iterate X <- (X^R + X^Gamma)/2 a given number of times."""
    X, d = _bipartite(X, d)
    for _ in range(steps):
        X = 0.5 * (_R(X, d) + _G(X, d))
    return X


def iso_random_stats(d: int, n_samples: int, rng_seed: int = 0) -> tuple[float, float]:
    """Mean and sample standard deviation of E(iso_map(X)) for real Gaussian X."""
    if d < 2 or n_samples < 1:
        raise UsageError("need d >= 2 and n_samples >= 1")
    rng = np.random.default_rng(rng_seed)
    vals = np.empty(n_samples)
    for i in range(n_samples):
        X = rng.standard_normal((d * d, d * d))
        vals[i] = linear_entropy(iso_map(X, d))
    std = float(vals.std(ddof=1)) if n_samples > 1 else 0.0
    return float(vals.mean()), std


# ----------------------------------------------------------- dynamical map

def _is_permutation(P) -> bool:
    P = np.asarray(P)
    ok = np.all((np.abs(P) < 1e-12) | (np.abs(P - 1) < 1e-12))
    return bool(ok and np.allclose(P.sum(0), 1) and np.allclose(P.sum(1), 1))


def seed_m0(P, eps: float = 0.05, rng_seed: int = 0) -> np.ndarray:
    """P exp{i (eps/2)(G + G^T)} with G a real Gaussian matrix."""
    P = as_matrix(P, square=True)
    if not _is_permutation(P):
        raise ContractViolation("seed_m0 expects a permutation matrix")
    if eps < 0:
        raise UsageError("eps must be nonnegative")
    rng = np.random.default_rng(rng_seed)
    n = P.shape[0]
    G = rng.standard_normal((n, n))
    H = 0.5 * eps * (G + G.T)
    w, V = np.linalg.eigh(H)
    return P @ ((V * np.exp(1j * w)) @ V.T)


Q_STAR_EP = 419.0 / 420.0


def dynamical_map_run(M0, max_iters: int = 10_000, tol: float = 1e-10,
                      d: int | None = None, attractor_window: int = 50,
                      attractor_tol: float = 1e-6) -> MapRunRecord:
    """Iterate M <- polar((M^R)^Gamma) until e_p reaches 1 within tol."""
    M, d = _bipartite(M0, d)
    if unitarity_residual(M) > 1e-8 * M.shape[0]:
        raise ContractViolation("dynamical map needs a unitary starting point")
    traj = []
    near_q = 0
    for it in range(max_iters + 1):
        pt = ep_gt(M, d)
        traj.append(pt)
        if 1.0 - pt.e_p <= tol:
            return MapRunRecord(it, traj, "two_unitary", M)
        near_q = near_q + 1 if abs(pt.e_p - Q_STAR_EP) < attractor_tol else 0
        if near_q >= attractor_window:
            return MapRunRecord(it, traj, "attractor_Q", M)
        if it == max_iters:
            break
        M = _polar_unchecked(_G(_R(M, d), d))
    return MapRunRecord(max_iters, traj, "exhausted", M)


def ep_gt_sample(d: int, n: int, rng_seed: int = 0) -> list[EpGtPoint]:
    if n < 1 or d < 2:
        raise UsageError("need d >= 2 and n >= 1")
    rng = np.random.default_rng(rng_seed)
    return [ep_gt(haar_unitary(d * d, rng), d) for _ in range(n)]
