"""Dense complex-matrix helpers used by every other module.

Matrices are plain ``numpy`` arrays of dtype complex128. ``as_matrix`` is the
single entry point that validates shape and finiteness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .errors import ContractViolation, DimensionError, SingularityError


@dataclass(frozen=True)
class ToleranceConfig:
    unitarity_tol: float = 1e-10
    rank_gap_tol: float = 1e-8
    phase_cluster_tol: float = 1e-8
    convergence_tol: float = 1e-12

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")

    def to_dict(self):
        return asdict(self)


DEFAULT_TOL = ToleranceConfig()


def as_matrix(M, square=False) -> np.ndarray:
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise DimensionError(f"expected a nonempty 2-d matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractViolation("matrix contains NaN or Inf")
    return A


def svd_values(M) -> np.ndarray:
    """Singular values in nonincreasing order."""
    return np.linalg.svd(as_matrix(M), compute_uv=False)


def rank_from_singulars(sigmas, tol: float) -> int:
    s = np.asarray(sigmas, dtype=float)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def unitarity_residual(U) -> float:
    U = as_matrix(U, square=True)
    return float(np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0])))


def is_unitary(U, tol: float = DEFAULT_TOL.unitarity_tol) -> bool:
    return unitarity_residual(U) <= tol


def polar_unitary(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Nearest unitary in Frobenius norm, W V^dagger from M = W diag(s) V^dagger."""
    M = as_matrix(M, square=True)
    W, s, Vh = np.linalg.svd(M)
    if s[-1] <= tol.rank_gap_tol * s[0]:
        raise SingularityError(
            f"matrix is rank deficient (sigma_min/sigma_max = {s[-1] / s[0]:.3e})")
    return W @ Vh


def _polar_unchecked(M: np.ndarray) -> np.ndarray:
    W, _, Vh = np.linalg.svd(M)
    return W @ Vh


def is_hermitian(H, tol: float = DEFAULT_TOL.unitarity_tol) -> bool:
    H = as_matrix(H, square=True)
    return float(np.linalg.norm(H - H.conj().T)) <= tol * max(1.0, float(np.linalg.norm(H)))


def matrix_exponential_hermitian(Hm, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """exp(i Hm) for Hermitian Hm through its eigendecomposition."""
    Hm = as_matrix(Hm, square=True)
    if not is_hermitian(Hm, tol.unitarity_tol):
        raise ContractViolation("matrix_exponential_hermitian needs a Hermitian argument")
    Hm = 0.5 * (Hm + Hm.conj().T)
    w, V = np.linalg.eigh(Hm)
    return (V * np.exp(1j * w)) @ V.conj().T


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary: polar part of a complex Ginibre matrix."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return _polar_unchecked(G)


def random_phase_diagonal(n: int, rng: np.random.Generator) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(n))


# ---------------------------------------------------------------- file formats

def matrix_to_json(M) -> dict:
    M = as_matrix(M)
    data = [[float(z.real), float(z.imag)] for z in M.ravel()]
    return {"rows": M.shape[0], "cols": M.shape[1], "data": data}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed matrix object: {exc}") from None
    flat = []
    for item in data:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise DimensionError("matrix entries must be [re, im] pairs")
            flat.append(complex(item[0], item[1]))
        else:
            flat.append(complex(item))
    if len(flat) != rows * cols:
        raise DimensionError(f"expected {rows * cols} entries, found {len(flat)}")
    return as_matrix(np.array(flat).reshape(rows, cols))


def _parse_text_matrix(text: str) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([complex(tok.replace("i", "j")) for tok in line.split()])
    if not rows or len({len(r) for r in rows}) != 1:
        raise DimensionError("text matrix must have rows of equal nonzero length")
    return as_matrix(rows)


def load_matrix(path) -> np.ndarray:
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return matrix_from_json(json.loads(text))
    return _parse_text_matrix(text)


def save_matrix(path, M) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M)))
