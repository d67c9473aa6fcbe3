"""Restricted defect of Hermitian unitaries with constant diagonal, built from
Gram matrices of rank-one measurements, plus a few measurement builders."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractViolation, DegenerateInput, DimensionError, UsageError
from .numerics import DEFAULT_TOL, ToleranceConfig, as_matrix, rank_from_singulars


@dataclass
class POVMSet:
    d: int
    vectors: np.ndarray  # shape (N, d), rows normalized

    @property
    def N(self) -> int:
        return self.vectors.shape[0]


@dataclass
class GramMatrix:
    G: np.ndarray
    d: int

    @property
    def N(self) -> int:
        return self.G.shape[0]


@dataclass
class RestrictedDefectReport:
    tau: int
    f: int
    z: int
    r: int
    delta: int
    singular_values: np.ndarray = field(repr=False)

    @property
    def sigma1(self) -> float:
        """Smallest singular value still counted in the rank."""
        if self.r == 0:
            return 0.0
        return float(self.singular_values[self.r - 1])


@dataclass
class ConfidenceBound:
    sigma1: float
    f_dN: float
    s_max: float

    def perturbation(self, s: float) -> float:
        return self.f_dN * s


def make_povm(vectors, d: int | None = None) -> POVMSet:
    V = np.array(vectors, dtype=complex)
    if V.ndim != 2 or V.shape[0] == 0:
        raise DimensionError("expected a nonempty list of vectors")
    if d is not None and V.shape[1] != d:
        raise DimensionError(f"vectors have length {V.shape[1]}, expected {d}")
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms == 0):
        raise DegenerateInput("zero vector in measurement set")
    return POVMSet(V.shape[1], V / norms[:, None])


def gram_from_vectors(P: POVMSet) -> GramMatrix:
    """G_jk = <phi_j|phi_k>."""
    V = P.vectors
    return GramMatrix(V.conj() @ V.T, P.d)


def is_valid_povm_gram(G, N: int, d: int) -> bool:
    G = as_matrix(G.G if isinstance(G, GramMatrix) else G, square=True)
    if G.shape[0] != N:
        raise DimensionError(f"Gram matrix has order {G.shape[0]}, expected {N}")
    return float(np.linalg.norm(G @ G - (N / d) * G)) <= 1e-8 * N


def gram_to_hermitian_unitary(G, N: int, d: int) -> np.ndarray:
    """U = I - 2dG/N, Hermitian and unitary for a valid measurement Gram matrix."""
    Gm = G.G if isinstance(G, GramMatrix) else as_matrix(G, square=True)
    if not is_valid_povm_gram(Gm, N, d):
        raise ContractViolation("Gram matrix fails G^2 = (N/d) G")
    return np.eye(N) - (2.0 * d / N) * Gm


# ------------------------------------------------------------- the system

def _pair_index(n):
    idx = np.full((n, n), -1)
    iu = np.triu_indices(n, 1)
    idx[iu] = np.arange(iu[0].size)
    return idx


def restricted_defect_system(U) -> np.ndarray:
    """Real matrix of the linearized conditions, two rows per pair j < k.

    Variables are R_ab for a < b; R_ba = -R_ab.  Row (j, k) encodes
    -2c U_kj R_jk + sum_{l != j,k} U_kl U_lj (R_kl - R_jl).
    """
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    c = U[0, 0].real
    idx = _pair_index(n)
    var = np.maximum(idx, idx.T)  # var[a, b] = index of {a, b}
    sign = np.sign(np.subtract.outer(np.arange(n), np.arange(n))) * -1  # +1 above diagonal
    tau = n * (n - 1) // 2
    A = np.zeros((tau, tau), dtype=complex)
    ls = np.arange(n)
    for j in range(n):
        for k in range(j + 1, n):
            row = idx[j, k]
            A[row, idx[j, k]] += -2 * c * U[k, j]
            l = ls[(ls != j) & (ls != k)]
            w = U[k, l] * U[l, j]
            # R_kl with orientation sign, minus R_jl with orientation sign
            np.add.at(A[row], var[k, l], w * sign[k, l])
            np.add.at(A[row], var[j, l], -w * sign[j, l])
    return np.vstack([A.real, A.imag])


def _check_hermitian_constant_diagonal(U, tol):
    scale = max(1.0, float(np.max(np.abs(U))))
    if float(np.max(np.abs(U - U.conj().T))) > 1e-8 * scale:
        raise ContractViolation("restricted_defect expects a Hermitian matrix")
    diag = np.diag(U)
    if float(np.max(np.abs(diag - diag[0]))) > 1e-8 * scale:
        raise ContractViolation("restricted_defect expects a constant diagonal")
    P = U @ U.conj().T
    lam = np.trace(P).real / U.shape[0]
    if lam <= 0 or float(np.linalg.norm(P - lam * np.eye(U.shape[0]))) > 1e-8 * lam * U.shape[0]:
        raise ContractViolation("restricted_defect expects a unitary matrix up to positive scale")


def restricted_defect(U, tol: ToleranceConfig = DEFAULT_TOL, check: bool = True) -> RestrictedDefectReport:
    """Delta = tau - f - z - r for a Hermitian (scaled) unitary with constant diagonal."""
    U = as_matrix(U, square=True)
    if check:
        _check_hermitian_constant_diagonal(U, tol)
    n = U.shape[0]
    tau = n * (n - 1) // 2
    f = n - 1
    iu = np.triu_indices(n, 1)
    mod = np.abs(U)
    z = int(np.count_nonzero(mod[iu] < tol.rank_gap_tol * mod.max()))
    A = restricted_defect_system(U)
    s = np.linalg.svd(A, compute_uv=False)
    r = rank_from_singulars(s, tol.rank_gap_tol)
    return RestrictedDefectReport(tau, f, z, r, tau - f - z - r, s)


def restricted_defect_of_vectors(P: POVMSet, tol: ToleranceConfig = DEFAULT_TOL) -> RestrictedDefectReport:
    G = gram_from_vectors(P)
    U = gram_to_hermitian_unitary(G, P.N, P.d)
    return restricted_defect(U, tol)


# --------------------------------------------------------------- builders

def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def mub_prime(p: int) -> list[np.ndarray]:
    """p+1 mutually unbiased bases of C^p; basis vectors are the columns."""
    if not _is_prime(p):
        raise UsageError(f"mub_prime needs a prime dimension, got {p}")
    if p == 2:
        s = 1 / np.sqrt(2)
        return [np.eye(2, dtype=complex),
                s * np.array([[1, 1], [1, -1]], dtype=complex),
                s * np.array([[1, 1], [1j, -1j]], dtype=complex)]
    j = np.arange(p)
    w = np.exp(2j * np.pi / p)
    bases = [np.eye(p, dtype=complex)]
    for k in range(p):
        # column m: w^(k j^2 + m j) / sqrt(p)
        expo = (k * j[:, None] ** 2 + j[:, None] * j[None, :]) % p
        bases.append(w ** expo / np.sqrt(p))
    return bases


def mub_povm(bases) -> POVMSet:
    V = np.concatenate([B.T for B in bases], axis=0)
    return make_povm(V)


def etf_hermitian_fourier(k: int) -> np.ndarray:
    """[F]_ab = exp{(2 pi i/k)(mod(a,k) floor(b/k) - mod(b,k) floor(a/k))}, order k^2."""
    if k < 2:
        raise UsageError("the Hermitian Fourier construction needs k >= 2")
    a = np.arange(k * k)
    expo = (np.outer(a % k, a // k) - np.outer(a // k, a % k)) % k
    return np.exp(2j * np.pi * expo / k)


def sic_d3(gamma: float) -> POVMSet:
    """Weyl-Heisenberg orbit X^a Z^b of the fiducial (1, e^{i gamma}, 0)/sqrt 2."""
    X = np.roll(np.eye(3), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(3) / 3))
    phi = np.array([1, np.exp(1j * gamma), 0]) / np.sqrt(2)
    vecs = [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) @ phi
            for a in range(3) for b in range(3)]
    return make_povm(vecs)


def robustness_bound(d: int, N: int, sigma1: float, s: float = 1.0) -> ConfidenceBound:
    """f(d,N) = (64 d^2/N)(1 - 2d/N)^2 sqrt((N-d)/(N(N-1))) and s_max = sigma1/(2f)."""
    if N <= 2 * d:
        raise UsageError("the perturbation bound holds only for N > 2d")
    if s < 0 or sigma1 <= 0:
        raise UsageError("need s >= 0 and sigma1 > 0")
    f = (64.0 * d * d / N) * (1 - 2.0 * d / N) ** 2 * np.sqrt((N - d) / (N * (N - 1.0)))
    return ConfidenceBound(float(sigma1), float(f), float(sigma1 / (2 * f)))


# ---------------------------------------------------------------- datasets

def vectors_to_json(P: POVMSet) -> dict:
    return {"d": P.d,
            "vectors": [[[float(z.real), float(z.imag)] for z in v] for v in P.vectors]}


def vectors_from_json(obj) -> POVMSet:
    try:
        d = int(obj["d"])
        raw = obj["vectors"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed vector-set object: {exc}") from None
    if not raw:
        raise DimensionError("vector set is empty")
    vecs = []
    for v in raw:
        if len(v) != d:
            raise DimensionError(f"vector of length {len(v)} in a d={d} set")
        vecs.append([complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in v])
    return make_povm(vecs, d)


def dataset_load(path) -> POVMSet:
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise DimensionError(f"{path} is empty")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DimensionError(f"{path}: {exc}") from None
    return vectors_from_json(obj)


def file_checksum(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
