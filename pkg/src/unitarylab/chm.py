"""Complex Hadamard matrices: builders, searches, invariants and a small catalogue."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import ContractViolation, DegenerateInput, DimensionError, NonConvergence, UsageError
from .numerics import DEFAULT_TOL, ToleranceConfig, _polar_unchecked, as_matrix, rank_from_singulars


@dataclass
class HadamardCandidate:
    matrix: np.ndarray
    deviation: float
    iterations: int = 0
    converged: bool = True

    def recompute(self) -> float:
        return chm_deviation(self.matrix)


@dataclass
class ButsonReport:
    is_butson: bool
    q: int | None
    max_phase_residual: float


@dataclass
class HaagerupCard:
    cardinality: int
    cluster_tol: float


@dataclass
class DefectReport:
    size: int
    n_equations: int
    n_variables: int
    rank: int
    defect: int
    singular_values: np.ndarray = field(repr=False)


def chm_deviation(M) -> float:
    """Z(M) = ||M M^dagger - N I||_F."""
    M = np.asarray(M, dtype=complex)
    N = M.shape[0]
    return float(np.linalg.norm(M @ M.conj().T - N * np.eye(N)))


def fourier(N: int) -> np.ndarray:
    if N < 1:
        raise DimensionError("Fourier matrix needs N >= 1")
    j = np.arange(N)
    # reduce the exponent mod N first so entries like -1 are exact
    return np.exp(2j * np.pi * (np.outer(j, j) % N) / N)


def is_chm(M, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    M = as_matrix(M, square=True)
    N = M.shape[0]
    if np.max(np.abs(np.abs(M) - 1.0)) > tol.phase_cluster_tol:
        return False
    return chm_deviation(M) <= tol.unitarity_tol * N


def dephase(M) -> np.ndarray:
    M = as_matrix(M, square=True)
    first_row, first_col = M[0, :], M[:, 0]
    if np.any(np.abs(first_row) == 0) or np.any(np.abs(first_col) == 0):
        raise DegenerateInput("cannot dephase: zero entry in first row or column")
    d1 = np.conj(first_col) / np.abs(first_col)
    A = d1[:, None] * M
    d2 = np.conj(A[0, :]) / np.abs(A[0, :])
    return A * d2[None, :]


# ------------------------------------------------------------------ searches

def _unimodular(M):
    a = np.abs(M)
    a[a == 0] = 1.0
    return M / a


def sinkhorn_chm(N: int, rng_seed: int = 0, max_iters: int = 10_000,
                 tol: ToleranceConfig = DEFAULT_TOL, polish_every: int | None = 250,
                 stall_window: int | None = 1000, raise_on_failure: bool = False) -> HadamardCandidate:
    """Alternate entrywise unimodularization with projection onto sqrt(N)-scaled unitaries.

    Alternating projections converge only linearly (or worse) near the
    solution.  Every `polish_every` sweeps a Newton-type refinement is tried on
    a copy of the iterate; it is kept only if it lands on a Hadamard matrix.
    If Z has not halved over `stall_window` sweeps the iterate sits in a
    spurious fixed point: a longer refinement is tried and, failing that, the
    run restarts from a fresh Gaussian draw of the same generator.  The sweep
    budget `max_iters` is shared by all restarts.  Pass ``polish_every=None,
    stall_window=None`` for the bare alternating scheme.
    """
    if N < 2:
        raise DimensionError("sinkhorn_chm needs N >= 2")
    rng = np.random.default_rng(rng_seed)

    def fresh():
        return _unimodular(rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))

    M = fresh()
    target = tol.convergence_tol * N
    scale = np.sqrt(N)
    dev = chm_deviation(M)
    checkpoint = dev
    it = 0
    while it < max_iters and dev > target:
        M = _unimodular(scale * _polar_unchecked(M))
        dev = chm_deviation(M)
        it += 1
        if polish_every and it % polish_every == 0 and dev > target:
            P = polish_chm(M)
            zp = chm_deviation(P)
            if zp <= target:
                M, dev = P, zp
        if stall_window and it % stall_window == 0 and dev > target:
            if dev > 0.5 * checkpoint:
                P = polish_chm(M, max_nfev=2000)
                zp = chm_deviation(P)
                if zp <= target:
                    M, dev = P, zp
                    break
                M = fresh()
                dev = chm_deviation(M)
            checkpoint = dev
    cand = HadamardCandidate(M, dev, it, dev <= target)
    if not cand.converged and raise_on_failure:
        raise NonConvergence(f"sinkhorn stalled at Z = {dev:.3e}", cand)
    return cand


def _bordered(core_phases):
    n = core_phases.shape[0] + 1
    M = np.ones((n, n), dtype=complex)
    M[1:, 1:] = np.exp(1j * core_phases)
    return M


def _gram_residual(M):
    N = M.shape[0]
    G = M @ M.conj().T - N * np.eye(N)
    iu = np.triu_indices(N, 1)
    g = G[iu]
    return np.concatenate([g.real, g.imag])


def _expand_groups(groups):
    trip = [(v, j, k) for v, group in enumerate(groups) for j, k in group]
    v, j, k = (np.array(t, dtype=int) for t in zip(*trip))
    return v, j, k


def _gram_jacobian(M, v, js, ks, nvar):
    """d(_gram_residual)/d(phase); variable v[t] rotates entry (js[t], ks[t])."""
    N = M.shape[0]
    iu = np.triu_indices(N, 1)
    pair = np.full((N, N), -1)
    pair[iu] = np.arange(iu[0].size)
    pair = pair + pair.T + 1  # symmetric lookup, diagonal unused
    b = np.arange(N)[None, :]
    jj, kk, vv = js[:, None], ks[:, None], np.broadcast_to(v[:, None], (v.size, N))
    # G_jb gains i M_jk conj(M_bk) for b > j; G_bj gains -i M_bk conj(M_jk) for b < j
    up = 1j * M[jj, kk] * np.conj(M[b, kk])
    down = -1j * M[b, kk] * np.conj(M[jj, kk])
    vals = np.where(b > jj, up, down)
    keep = np.broadcast_to(b != jj, vals.shape)
    J = np.zeros((iu[0].size, nvar), dtype=complex)
    np.add.at(J, (pair[jj, b][keep], vv[keep]), vals[keep])
    return np.vstack([J.real, J.imag])


def _phase_lm(M, groups, max_nfev=200):
    """Trust-region least squares on entry phases of M; `groups` lists the entries each variable rotates."""
    base = np.array(M, dtype=complex)
    if sum(len(g) for g in groups) == 0:
        return base
    v, js, ks = _expand_groups(groups)
    nvar = len(groups)

    def build(x):
        A = base.copy()
        A[js, ks] = base[js, ks] * np.exp(1j * x[v])
        return A

    sol = least_squares(lambda x: _gram_residual(build(x)), np.zeros(nvar),
                        jac=lambda x: _gram_jacobian(build(x), v, js, ks, nvar),
                        method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    return build(sol.x)


def polish_chm(M, max_nfev=200) -> np.ndarray:
    """Newton-type refinement of a near-Hadamard matrix over its dephased core phases."""
    D = dephase(_unimodular(as_matrix(M, square=True)))
    N = D.shape[0]
    groups = [[(j, k)] for j in range(1, N) for k in range(1, N)]
    return _phase_lm(D, groups, max_nfev)


def random_walk_chm(N: int, fixed_phase_mask=None, fixed_phases=None, rng_seed: int = 0,
                    step_schedule=(0.5, 1e-7, 0.85), trials_per_level: int | None = None,
                    tol: ToleranceConfig = DEFAULT_TOL, symmetric: bool = False,
                    polish: bool = True) -> HadamardCandidate:
    """Stochastic coordinate descent of Z over the core phases of a dephased matrix.

    `step_schedule` is (start, stop, factor) for geometric cooling of the step size.
    With `symmetric` the core is kept equal to its transpose.  A final
    Levenberg-Marquardt pass on the free phases removes the residual left by the
    smallest step.
    """
    if N < 2:
        raise DimensionError("random_walk_chm needs N >= 2")
    n = N - 1
    mask = np.zeros((n, n), bool) if fixed_phase_mask is None else np.asarray(fixed_phase_mask, bool)
    if mask.shape != (n, n):
        raise DimensionError(f"mask must be {n}x{n}")
    rng = np.random.default_rng(rng_seed)
    phases = 2 * np.pi * rng.random((n, n))
    if fixed_phases is not None:
        fp = np.asarray(fixed_phases, float)
        if fp.shape != (n, n):
            raise DimensionError(f"fixed phases must be {n}x{n}")
        phases[mask] = fp[mask]
    if symmetric:
        phases = np.triu(phases) + np.triu(phases, 1).T
        free_idx = [(j, k) for j in range(n) for k in range(j, n) if not mask[j, k]]
    else:
        free_idx = [(j, k) for j in range(n) for k in range(n) if not mask[j, k]]

    z = chm_deviation(_bordered(phases))
    if not free_idx:
        cand = HadamardCandidate(_bordered(phases), z, 0, z <= tol.unitarity_tol * N)
        if not cand.converged:
            raise NonConvergence(f"all phases fixed and Z = {z:.3e}", cand)
        return cand

    start, stop, factor = step_schedule
    trials = trials_per_level or 8 * len(free_idx)
    step, it = start, 0
    while step >= stop and z > tol.convergence_tol * N:
        for _ in range(trials):
            j, k = free_idx[rng.integers(len(free_idx))]
            delta = step * rng.standard_normal()
            old = phases[j, k]
            phases[j, k] = old + delta
            if symmetric:
                phases[k, j] = phases[j, k]
            znew = chm_deviation(_bordered(phases))
            it += 1
            if znew < z:
                z = znew
            else:
                phases[j, k] = old
                if symmetric:
                    phases[k, j] = old
        step *= factor

    M = _bordered(phases)
    if polish and z > tol.convergence_tol * N:
        groups = [[(j + 1, k + 1)] if (j == k or not symmetric) else [(j + 1, k + 1), (k + 1, j + 1)]
                  for j, k in free_idx]
        P = _phase_lm(M, groups)
        if chm_deviation(P) < z:
            M = P
    z = chm_deviation(M)
    return HadamardCandidate(M, z, it, z <= tol.unitarity_tol * N)


# --------------------------------------------------------------- invariants

def cluster_phases(angles, tol: float) -> int:
    """Number of clusters of angles on the circle, split where sorted gaps exceed tol."""
    a = np.sort(np.mod(np.asarray(angles, float).ravel(), 2 * np.pi))
    if a.size == 0:
        return 0
    gaps = np.diff(a)
    count = 1 + int(np.count_nonzero(gaps > tol))
    # merge the cluster straddling 0 / 2pi
    if count > 1 and (a[0] + 2 * np.pi - a[-1]) <= tol:
        count -= 1
    return count


def haagerup_card(H, tol: ToleranceConfig = DEFAULT_TOL, check: bool = True) -> HaagerupCard:
    """Count distinct values among all quartets H_jk H_lm H*_jm H*_lk."""
    H = as_matrix(H, square=True)
    if check and not is_chm(H, ToleranceConfig(unitarity_tol=1e-6, phase_cluster_tol=1e-6)):
        raise ContractViolation("haagerup_card expects a complex Hadamard matrix")
    Hc = H.conj()
    lam = np.einsum("jk,lm,jm,lk->jklm", H, H, Hc, Hc, optimize=True)
    return HaagerupCard(cluster_phases(np.angle(lam), tol.phase_cluster_tol), tol.phase_cluster_tol)


def butson_fit(H, q_max: int = 64, tol: ToleranceConfig = DEFAULT_TOL) -> ButsonReport:
    H = as_matrix(H)
    if np.max(np.abs(np.abs(H) - 1.0)) > max(tol.phase_cluster_tol, 1e-6):
        raise ContractViolation("butson_fit expects unimodular entries")
    turns = np.unique(np.round((np.angle(H) / (2 * np.pi)).ravel(), 14))
    best = np.inf
    # scan q in chunks; the first q whose lattice holds every phase is minimal
    for lo in range(1, q_max + 1, 4096):
        qs = np.arange(lo, min(lo + 4096, q_max + 1))
        x = np.outer(qs, turns)
        res = np.max(np.abs(x - np.round(x)), axis=1)
        best = min(best, float(res.min()))
        hit = np.flatnonzero(res < tol.phase_cluster_tol)
        if hit.size:
            return ButsonReport(True, int(qs[hit[0]]), float(res[hit[0]]))
    return ButsonReport(False, None, best)


def _defect_system(U):
    N = U.shape[0]
    Uc = U.conj()
    rows = []
    for j in range(N):
        for k in range(j + 1, N):
            row = np.zeros((N, N), dtype=complex)
            w = U[j, :] * Uc[k, :]
            row[j, :] += w
            row[k, :] -= w
            rows.append(row.ravel())
    A = np.array(rows)
    return np.vstack([A.real, A.imag])


def unitary_defect(U, tol: ToleranceConfig = DEFAULT_TOL) -> DefectReport:
    """Dimension of first-order unitarity and modulus preserving phase directions, minus 2N-1."""
    U = as_matrix(U, square=True)
    N = U.shape[0]
    if is_chm(U, ToleranceConfig(unitarity_tol=1e-8, phase_cluster_tol=1e-8)):
        U = U / np.sqrt(N)
    if np.linalg.norm(U @ U.conj().T - np.eye(N)) > 1e-8 * N:
        raise ContractViolation("unitary_defect expects a unitary (or complex Hadamard) matrix")
    A = _defect_system(U)
    s = np.linalg.svd(A, compute_uv=False)
    r = rank_from_singulars(s, tol.rank_gap_tol)
    dim = N * N - r
    return DefectReport(N, A.shape[0], N * N, r, max(0, dim - (2 * N - 1)), s)


# ------------------------------------------------------ circulant constructions

def circulant(first_row) -> np.ndarray:
    c = np.asarray(first_row, dtype=complex)
    n = c.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return c[idx]


def circulant_constraints(c) -> np.ndarray:
    """sum_j c_j / c_{j+k} for k = 1..N-1; all vanish for a circulant CHM."""
    c = np.asarray(c, dtype=complex)
    N = c.size
    return np.array([np.sum(c / np.roll(c, -k)) for k in range(1, N)])


def _solve_phases(n_free, residual, rng, tol_value, restarts):
    best = None
    for _ in range(restarts):
        x0 = 2 * np.pi * rng.random(n_free)
        sol = least_squares(residual, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=400 * (n_free + 1))
        val = float(np.linalg.norm(sol.fun))
        if best is None or val < best[0]:
            best = (val, sol.x)
        if val <= tol_value:
            break
    return best


def circulant_chm_solve(N: int, rng_seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL,
                        restarts: int = 50) -> HadamardCandidate:
    """Circulant CHM circ[c_0..c_{N-1}] from the compact unitarity constraints, c_0 = 1."""
    if N < 3:
        raise DimensionError("circulant_chm_solve needs N >= 3")
    rng = np.random.default_rng(rng_seed)

    def build(x):
        return np.exp(1j * np.concatenate([[0.0], x]))

    def residual(x):
        r = circulant_constraints(build(x))[: N // 2]
        return np.concatenate([r.real, r.imag])

    val, x = _solve_phases(N - 1, residual, rng, 1e-13, restarts)
    M = circulant(build(x))
    z = chm_deviation(M)
    cand = HadamardCandidate(M, z, 0, z <= tol.unitarity_tol * N)
    if not cand.converged:
        raise NonConvergence(f"circulant solver stagnated at Z = {z:.3e}", cand)
    return cand


def build_LN(N: int, block_values) -> np.ndarray:
    """Bordered matrix whose core is a circulant of 2x2 blocks [[c, c*], [c*, c]]."""
    if N < 3 or (N - 3) % 4 != 0:
        raise UsageError("the bordered block-circulant pattern needs N = 3 + 4k")
    n = (N - 1) // 2
    c = np.asarray(block_values, dtype=complex).ravel()
    if c.size != n:
        raise DimensionError(f"expected {n} block values, got {c.size}")
    L = np.ones((N, N), dtype=complex)
    for bi in range(n):
        for bj in range(n):
            x = c[(bj - bi) % n]
            L[1 + 2 * bi:3 + 2 * bi, 1 + 2 * bj:3 + 2 * bj] = [[x, np.conj(x)], [np.conj(x), x]]
    return L


def solve_LN(N: int, rng_seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL,
             restarts: int = 50) -> HadamardCandidate:
    """Unimodular block values making build_LN a CHM (least squares over their phases)."""
    if N < 3 or (N - 3) % 4 != 0:
        raise UsageError("the bordered block-circulant pattern needs N = 3 + 4k")
    n = (N - 1) // 2
    rng = np.random.default_rng(rng_seed)

    def residual(x):
        return _gram_residual(build_LN(N, np.exp(1j * x)))

    val, x = _solve_phases(n, residual, rng, 1e-13, restarts)
    M = build_LN(N, np.exp(1j * x))
    z = chm_deviation(M)
    cand = HadamardCandidate(M, z, 0, z <= tol.unitarity_tol * N)
    if not cand.converged:
        raise NonConvergence(f"block-circulant solver stagnated at Z = {z:.3e}", cand)
    return cand


# ---------------------------------------------------------------- catalogue

_B8A = [[5, 10, 13, 8, 3, 15, 18],
        [10, 5, 18, 3, 13, 15, 8],
        [12, 7, 10, 15, 17, 5, 2],
        [17, 2, 15, 10, 7, 5, 12],
        [7, 17, 3, 13, 0, 10, 10],
        [2, 12, 8, 18, 10, 0, 10],
        [15, 15, 5, 5, 10, 10, 0]]

_B8B = [[8, 10, 13, 5, 3, 15, 18],
        [18, 10, 3, 5, 13, 15, 8],
        [12, 10, 7, 15, 17, 5, 2],
        [2, 10, 17, 15, 7, 5, 12],
        [10, 0, 0, 10, 0, 10, 10],
        [10, 0, 10, 0, 10, 0, 10],
        [0, 0, 10, 10, 10, 10, 0]]

# published four-digit values, refined below
_T9_ABCD = (-0.3396 + 0.9406j, -0.9635 + 0.2676j, -0.0365 + 0.9993j, 0.8396 + 0.5432j)
_V8_ABC = (-0.6509 - 0.7592j, -0.7799 + 0.6258j, 0.6183 - 0.7859j)


def _butson_from_table(core, q):
    E = np.zeros((8, 8), dtype=int)
    E[1:, 1:] = core
    return np.exp(2j * np.pi * (E % q) / q)


def t6(gamma: float) -> np.ndarray:
    if not 0.5 <= gamma <= 1.5:
        raise UsageError("T6 is defined for gamma in [1/2, 3/2]")
    a = np.exp(1j * np.pi * gamma)
    b = a * a
    # a^4 + 4a^3 + 2a^2 + 4a + 1 = 4 a^2 cos(t)(cos(t) + 2); on [1/2, 3/2] this is
    # -|.| a^2, so take 2ia sqrt(.) and match the principal branch of the raw sqrt.
    # Cancellation near the endpoints would otherwise cost half the digits.
    ct = np.cos(np.pi * gamma)
    root = 2j * a * np.sqrt(max(0.0, -ct * (ct + 2)))
    raw = np.sqrt(a ** 4 + 4 * a ** 3 + 2 * a ** 2 + 4 * a + 1)
    if np.real(root * np.conj(raw)) < 0:
        root = -root
    c = (-2 * a - 1 - b - root) / 2
    d = (-2 * a - 1 - b + root) / 2
    # rows 3 and 4 carry d (not b) next to the leading one; with b there the
    # rows are not orthogonal to the all-ones row
    return np.array([[1, 1, 1, 1, 1, 1],
                     [1, a, b, c, a, d],
                     [1, b, a, a, c, d],
                     [1, d, a, -a, -1, -d],
                     [1, a, d, -1, -a, -d],
                     [1, c, c, -c, -c, -1]], dtype=complex)


def t9_from(a, b, c, d) -> np.ndarray:
    ai, bi, ci, di = 1 / a, 1 / b, 1 / c, 1 / d
    return np.array([[1] * 9,
                     [1, a, d, ai, ci, bi, c, b, di],
                     [1, b, c, bi, a, di, ai, d, ci],
                     [1, c, bi, ci, d, a, di, ai, b],
                     [1, bi, ci, b, ai, d, a, di, c],
                     [1, d, ai, di, b, ci, bi, c, a],
                     [1, ai, di, a, c, b, ci, bi, d],
                     [1, ci, b, c, di, ai, d, a, bi],
                     [1, di, a, d, bi, c, b, ci, ai]], dtype=complex)


def t9_constraints(a, b, c, d) -> np.ndarray:
    """The five independent unitarity equations of the nine-dimensional quadruplet matrix."""
    i = lambda x: 1 / x
    return np.array([
        1 + a + i(a) + b + i(b) + c + i(c) + d + i(d),
        1 + a**2 + i(a**2) + b**2 + i(b**2) + c**2 + i(c**2) + d**2 + i(d**2),
        1 + a / b + b / a + b / d + d / b + c / d + d / c + a * c + i(a * c),
        1 + a / c + c / a + a * b + i(a * b) + c * d + i(c * d) + b * d + i(b * d),
        1 + a / d + d / a + b / c + c / b + b * c + i(b * c) + a * d + i(a * d),
    ])


def v8_from(a, b, c) -> np.ndarray:
    return np.array([[-1, -1, b, b, c, c, a, a],
                     [-1, b, -1, c, b, a, c, -a],
                     [b, -1, c, -1, a, b, -a, c],
                     [b, c, -1, a, -1, -a, b, -c],
                     [c, b, a, -1, -a, -1, -c, b],
                     [c, a, b, -a, -1, -c, -1, -b],
                     [a, c, -a, b, -c, -1, -b, -1],
                     [a, -a, c, -c, b, -b, -1, 1]], dtype=complex)


def v8_constraints(a, b, c) -> np.ndarray:
    return np.array([
        -1 / b - b + b / c + c / b + c / a + a / c,
        -1 / b - b - 1 / c - c - c / a - a / c + b / a + a / b,
        1 / c + c + 1 / a + a + b / a + a / b,
    ])


def _refine(values, constraints):
    x0 = np.angle(np.array(values))

    def fun(x):
        r = constraints(*np.exp(1j * x))
        return np.concatenate([r.real, r.imag])

    sol = least_squares(fun, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return tuple(np.exp(1j * sol.x))


def t9_parameters():
    return _refine(_T9_ABCD, t9_constraints)


def v8_parameters():
    return _refine(_V8_ABC, v8_constraints)


CATALOGUE_NAMES = ("F", "T6", "T9", "B8a", "B8b", "V8")


def catalogue(name: str, params=None) -> np.ndarray:
    """Named matrices; F takes (N,), T6 takes (gamma,)."""
    params = list(params or [])
    if name == "F":
        return fourier(int(params[0]) if params else 2)
    if name == "T6":
        return t6(float(params[0]) if params else 1.0)
    if name == "T9":
        return t9_from(*t9_parameters())
    if name == "B8a":
        return _butson_from_table(_B8A, 20)
    if name == "B8b":
        return _butson_from_table(_B8B, 20)
    if name == "V8":
        return v8_from(*v8_parameters())
    raise UsageError(f"unknown catalogue entry {name!r}; choose from {', '.join(CATALOGUE_NAMES)}")
