"""Bipartite Bell inequalities written as correlation matrices: classical
(local hidden variable) values through the excess of a matrix, spectral upper
bounds, the circulant family M_n, qubit Bell operators, vectors unbiased to a
Hadamard matrix and the tightness test by affine rank of optimal strategies.

Indexing of a correlation matrix of order N = q m: row m*s + x, column m*t + y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import CapacityError, ContractViolation, DimensionError, UsageError
from .numerics import as_matrix

MAX_PM1 = 24
MAX_QARY = 1 << 24


@dataclass
class BellScenario:
    q: int
    m: int

    def __post_init__(self):
        if self.q < 2 or self.m < 2:
            raise UsageError("a Bell scenario needs q >= 2 and m >= 2")

    @property
    def N(self) -> int:
        return self.q * self.m


@dataclass
class LHVResult:
    value: float
    x: np.ndarray  # maximizing +-1 vector (q = 2) or outcome labels a (general q)
    y: np.ndarray | None = None


@dataclass
class TightnessReport:
    classical_value: float
    vertex_count: int
    affine_rank: int
    is_tight: bool


# ------------------------------------------------------------- matrices

def correlation_matrix(S, q: int | None = None, m: int | None = None) -> np.ndarray:
    """M[ms+x, mt+y] = q^(-1/2) sum_{a,b} w^(sa+tb) S[a,b,x,y], w = exp(2 pi i/q)."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 4 or S.shape[0] != S.shape[1] or S.shape[2] != S.shape[3]:
        raise DimensionError(f"coefficients must have shape (q,q,m,m), got {S.shape}")
    qq, mm = S.shape[0], S.shape[2]
    if (q is not None and q != qq) or (m is not None and m != mm):
        raise DimensionError("coefficient shape does not match the scenario")
    BellScenario(qq, mm)
    F = np.exp(2j * np.pi * np.outer(np.arange(qq), np.arange(qq)) / qq)  # F[s,a]
    T = np.einsum("sa,tb,abxy->sxty", F, F, S) / np.sqrt(qq)
    M = T.reshape(qq * mm, qq * mm)
    if qq == 2:
        M = M.real.copy()
    return M


def symmetry_residual(M, q: int) -> float:
    M = as_matrix(M, square=True)
    m = M.shape[0] // q
    T = M.reshape(q, m, q, m)
    neg = (-np.arange(q)) % q
    return float(np.max(np.abs(T[neg][:, :, neg] - T.conj())))


def core(M, q: int) -> np.ndarray:
    """Drop the first m rows and columns (the marginal terms)."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % q:
        raise DimensionError(f"order {M.shape[0]} is not a multiple of q={q}")
    m = M.shape[0] // q
    return M[m:, m:].copy()


def full_from_core(C, q: int = 2) -> np.ndarray:
    """Embed a core into a correlation matrix with vanishing marginals."""
    C = np.asarray(C)
    n = C.shape[0]
    if n % (q - 1):
        raise DimensionError(f"core order {n} is not a multiple of q-1={q - 1}")
    m = n // (q - 1)
    M = np.zeros((n + m, n + m), dtype=C.dtype)
    M[m:, m:] = C
    return M


def excess(M, tol: float = 1e-10) -> float:
    total = np.sum(M)
    if abs(np.imag(total)) > tol * max(1.0, float(np.abs(M).sum())):
        raise ContractViolation(f"entry sum {total} is not real")
    return float(np.real(total))


def circulant(first_row) -> np.ndarray:
    c = np.asarray(first_row)
    n = c.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return c[idx]


def circulant_bell(n: int) -> np.ndarray:
    """circ[-1 (floor(n/2) times), +1 (ceil(n/2) times)]."""
    if n < 3:
        raise UsageError("the circulant family starts at n = 3")
    return circulant(np.r_[-np.ones(n // 2), np.ones(n - n // 2)])


def sylvester_hadamard(k: int) -> np.ndarray:
    H = np.ones((1, 1))
    for _ in range(k):
        H = np.block([[H, H], [H, -H]])
    return H


def paley_hadamard(p: int) -> np.ndarray:
    """Order p+1 Hadamard matrix for a prime p = 3 mod 4."""
    if p % 4 != 3 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise UsageError("Paley construction needs a prime p = 3 (mod 4)")
    squares = {(i * i) % p for i in range(1, p)}
    chi = np.array([0] + [1 if i in squares else -1 for i in range(1, p)])
    Q = chi[(np.arange(p)[None, :] - np.arange(p)[:, None]) % p]
    S = np.zeros((p + 1, p + 1))
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return S + np.eye(p + 1)


# --------------------------------------------------------- classical values

def lhv_value(M, q: int = 2, m: int | None = None) -> LHVResult:
    """Classical value.

    q = 2 and m omitted: M is a real core and the value is
    max_x ||M x||_1 over x in {-1,1}^n.  Otherwise M is a full correlation
    matrix of order q m and the value is its maximal excess over q-equivalence.
    """
    if q == 2 and m is None:
        C = np.asarray(M)
        if np.iscomplexobj(C):
            if np.max(np.abs(C.imag)) > 1e-12:
                raise ContractViolation("a q=2 core must be real")
            C = C.real
        C = np.asarray(as_matrix(C).real)
        n = C.shape[1]
        if n > MAX_PM1:
            raise CapacityError(f"2^{n} sign vectors exceed the n <= {MAX_PM1} guard")
        value, x = kernels.lhv_pm1(C)
        y = np.where(C @ x >= 0, 1, -1).astype(np.int8)
        return LHVResult(value, x, y)
    value, a, b = max_excess_q(M, q)
    return LHVResult(value, a, b)


def max_excess_q(M, q: int):
    """Max of sum(D1 M D2) over q-equivalence diagonals; returns (value, a, b).

    D1[ms+x] = w^(a_x s) and D2[mt+y] = w^(b_y t).
    """
    M = as_matrix(M, square=True)
    N = M.shape[0]
    if N % q:
        raise DimensionError(f"order {N} is not a multiple of q={q}")
    m = N // q
    if float(q) ** m > MAX_QARY:
        raise CapacityError(f"q^m = {q}^{m} exceeds the 2^24 guard")
    value, a, b = kernels.lhv_qary(M, q, m)
    return value, np.asarray(a), np.asarray(b)


def equivalence_diagonal(labels, q: int) -> np.ndarray:
    labels = np.asarray(labels)
    m = labels.size
    s = np.repeat(np.arange(q), m)
    return np.exp(2j * np.pi * ((np.tile(labels, q) * s) % q) / q)


def maximal_excess_form(M, q: int) -> np.ndarray:
    """The q-equivalent D1 M D2 whose plain entry sum is the maximal excess."""
    M = as_matrix(M, square=True)
    _, a, b = max_excess_q(M, q)
    out = equivalence_diagonal(a, q)[:, None] * M * equivalence_diagonal(b, q)[None, :]
    return out.real.copy() if q == 2 else out


def max_excess_bruteforce(M, q: int) -> float:
    """Double enumeration over both diagonals; reference for small cases."""
    M = as_matrix(M, square=True)
    m = M.shape[0] // q
    labels = np.array(np.meshgrid(*[np.arange(q)] * m, indexing="ij")).reshape(m, -1).T
    D = np.array([equivalence_diagonal(a, q) for a in labels])  # (q^m, N)
    vals = np.real(D @ M @ D.T)
    return float(vals.max())


# ----------------------------------------------------------------- bounds

def numerical_radius(M, grid: int = 360, tol: float = 1e-10) -> float:
    """max_theta lambda_max((e^{i theta} M + e^{-i theta} M^+)/2)."""
    M = as_matrix(M, square=True)

    def f(th):
        H = 0.5 * (np.exp(1j * th) * M + np.exp(-1j * th) * M.conj().T)
        return float(np.linalg.eigvalsh(H)[-1])

    ths = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = np.array([f(t) for t in ths])
    k = int(np.argmax(vals))
    h = 2 * np.pi / grid
    res = minimize_scalar(lambda t: -f(t), bounds=(ths[k] - h, ths[k] + h),
                          method="bounded", options={"xatol": tol})
    return max(float(vals[k]), -float(res.fun))


def bounds(M) -> dict:
    """Spectral bounds of a correlation matrix.

    The classical bounds hold for the representative in maximal excess form;
    `maximal_excess_form` produces it.
    """
    M = as_matrix(M, square=True)
    N = M.shape[0]
    nu = float(np.linalg.norm(M.sum(axis=1)))
    return {"c_radius": N * numerical_radius(M),
            "q_singular": N * float(np.linalg.svd(M, compute_uv=False)[0]),
            "c_taxicab": np.sqrt(N) * nu}


# ------------------------------------------------------- quantum operators

def circulant_quantum_value(n: int) -> float:
    """n sigma_max(M_n); for even n this is 2n/sin(pi/n)."""
    s = float(np.linalg.svd(circulant_bell(n), compute_uv=False)[0])
    if n % 2 == 0 and abs(s - 2 / np.sin(np.pi / n)) > 1e-10 * s:
        raise ContractViolation("largest singular value disagrees with 2/sin(pi/n)")
    return n * s


def circulant_classical_formula(n: int) -> int:
    """Closed-form pattern of classical values of M_n (regression target only)."""
    if n < 3:
        raise UsageError("n >= 3")
    if n % 2:
        k = (n - 1) // 2
        return 2 * k * (k + 1) + 1
    if n % 4 == 0:
        return 8 * (n // 4) ** 2
    k = (n - 2) // 4
    return 4 * (2 * k * (k + 1) + 1)


def optimal_phases(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Phase pattern alpha = (0..n-1) and the matching beta for M_n."""
    alpha = np.arange(n, dtype=float)
    if n % 4 in (3, 0):
        k = (n - 3) // 4 if n % 4 == 3 else (n - 4) // 4
        beta = ((2 * k + 3 + 2 * np.arange(n)) % (2 * n)) / 2.0
    else:
        k = (n - 5) // 4 if n % 4 == 1 else (n - 6) // 4
        beta = ((2 + k + np.arange(n)) % n).astype(float)
    return alpha, beta


def observable(phi: float, n: int) -> np.ndarray:
    th = 2 * np.pi * phi / n
    c, s = np.cos(th), np.sin(th)
    return np.array([[c, -s], [-s, -c]])


@dataclass
class QubitBellOperator:
    operator: np.ndarray
    c: float | None
    largest_eigenvalue: float


def qubit_bell_operator(C, alpha, beta) -> QubitBellOperator:
    """sum_jk C_jk A_j (x) B_k with A_j = X(alpha_j), B_k = X(beta_k)."""
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.size != n or beta.size != C.shape[1]:
        raise DimensionError("phase vectors must match the core order")
    A = np.array([observable(a, n) for a in alpha])
    B = np.array([observable(b, n) for b in beta])
    op = np.einsum("jk,jab,kcd->acbd", C, A, B).reshape(4, 4)
    ca = np.cos(2 * np.pi * alpha / n)
    cb = np.cos(2 * np.pi * beta / n)
    c = float(ca @ C @ cb)
    template = c * np.array([[1, 0, 0, 1], [0, -1, 1, 0], [0, 1, -1, 0], [1, 0, 0, 1]])
    lam = float(np.linalg.eigvalsh(op)[-1])
    scale = max(1.0, float(np.abs(op).max()))
    return QubitBellOperator(op, c if np.abs(op - template).max() <= 1e-10 * scale else None, lam)


def expectation(op, gamma: float = np.pi / 4) -> float:
    psi = np.array([np.cos(gamma), 0, 0, np.sin(gamma)])
    return float(psi @ op @ psi)


# ----------------------------------------------------- Hadamard structure

def _pm1_matrix(H, name):
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionError(f"{name} needs a square matrix")
    if not np.all(np.abs(np.abs(H) - 1) < 1e-12):
        raise ContractViolation(f"{name} needs a +-1 matrix")
    return np.rint(H)


def unbiased_vectors(H) -> np.ndarray:
    """All x in {-1,1}^n with |<row, x>| = sqrt(n) for every row of H."""
    H = _pm1_matrix(H, "unbiased_vectors")
    n = H.shape[0]
    if n > MAX_PM1:
        raise CapacityError(f"n = {n} exceeds the {MAX_PM1} guard")
    r = int(round(np.sqrt(n)))
    if r * r != n:
        return np.zeros((0, n), dtype=np.int8)
    return kernels.unbiased_pm1(H, float(r))


def optimal_strategies(H) -> tuple[float, list]:
    """Classical value and all pairs (x, y) reaching it, x[-1] = +1."""
    H = np.asarray(H, dtype=float)
    m = H.shape[0]
    if m > MAX_PM1:
        raise CapacityError(f"m = {m} exceeds the {MAX_PM1} guard")
    value, X = kernels.optimal_pm1(H)
    pairs = []
    for x in X:
        v = x @ H
        zero = np.abs(v) < 1e-9
        base = np.where(v > 0, 1, -1).astype(np.int8)
        idx = np.nonzero(zero)[0]
        for bits in range(1 << idx.size):
            y = base.copy()
            y[idx] = np.where((bits >> np.arange(idx.size)) & 1, -1, 1)
            pairs.append((x.copy(), y))
    return value, pairs


def tightness(H, max_order: int = 12) -> TightnessReport:
    H = _pm1_matrix(H, "tightness")
    m = H.shape[0]
    if m > max_order:
        raise CapacityError(f"tightness enumeration limited to m <= {max_order}")
    value, pairs = optimal_strategies(H)
    V = np.unique(np.array([np.outer(x, y).ravel() for x, y in pairs]), axis=0)
    if len(V) <= 1:
        rank = 0
    else:
        rank = int(np.linalg.matrix_rank((V[1:] - V[0]).astype(float)))
    return TightnessReport(value, len(V), rank, rank == m * m - 1)
