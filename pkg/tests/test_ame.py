import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ep_gt_loops, partial_transpose_loops, realign_loops
from unitarylab import ame
from unitarylab.errors import ContractViolation, DegenerateInput, DimensionError, UsageError
from unitarylab.numerics import haar_unitary, unitarity_residual

seeds = st.integers(0, 2**32 - 1)
GOLDEN_RATIO = (1 + np.sqrt(5)) / 2


def rand_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def local(rng, d):
    return np.kron(haar_unitary(d, rng), haar_unitary(d, rng))


# ---------------------------------------------------------- realignments

@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 4))
def test_involutions_and_braid(seed, d):
    X = rand_complex(np.random.default_rng(seed), d * d)
    for k in ("R", "Gamma", "T"):
        assert np.array_equal(ame.realign(ame.realign(X, k), k), X)
    R = lambda M: ame.realign(M, "R")
    G = lambda M: ame.realign(M, "Gamma")
    assert np.array_equal(R(G(R(X))), G(R(G(X))))


def test_realignments_match_loop_oracle():
    rng = np.random.default_rng(4)
    for d in (2, 3):
        X = rand_complex(rng, d * d)
        assert np.array_equal(ame.realign(X, "R"), realign_loops(X, d))
        assert np.array_equal(ame.realign(X, "Gamma"), partial_transpose_loops(X, d))


def test_block_schematic_under_R():
    # blocks A_jl of a 4x4 matrix become rows of the reshuffled matrix
    X = np.arange(16.0).reshape(4, 4)
    blocks = [X[0:2, 0:2], X[0:2, 2:4], X[2:4, 0:2], X[2:4, 2:4]]
    assert np.array_equal(ame.realign(X, "R"), np.array([b.ravel() for b in blocks]))


def test_realign_errors():
    with pytest.raises(DimensionError):
        ame.realign(np.eye(5), "R")
    with pytest.raises(UsageError):
        ame.realign(np.eye(4), "Q")


def test_swap_entropies():
    S = ame.swap(2)
    assert np.array_equal(S, np.eye(4)[[0, 2, 1, 3]])
    assert ame.linear_entropy(S) == pytest.approx(1)
    assert ame.linear_entropy(ame.realign(S, "R")) == pytest.approx(1)
    assert ame.linear_entropy(ame.realign(S, "Gamma")) == pytest.approx(0, abs=1e-15)


def test_linear_entropy_limits():
    assert ame.linear_entropy(haar_unitary(9, np.random.default_rng(0))) == pytest.approx(1, abs=1e-14)
    assert ame.linear_entropy(np.ones((4, 4))) == pytest.approx(0, abs=1e-15)
    with pytest.raises(DegenerateInput):
        ame.linear_entropy(np.zeros((4, 4)))


# -------------------------------------------------------- entangling power

def test_swap_point():
    for d in (2, 3, 6):
        pt = ame.ep_gt(ame.swap(d))
        assert pt.e_p == pytest.approx(0, abs=1e-14) and pt.g_t == pytest.approx(2, abs=1e-14)


def test_ep_against_loop_oracle():
    rng = np.random.default_rng(9)
    for d in (2, 3):
        U = haar_unitary(d * d, rng)
        pt = ame.ep_gt(U)
        assert (pt.e_p, pt.g_t) == pytest.approx(ep_gt_loops(U, d), abs=1e-13)


def test_ladder_values():
    assert ame.entangling_power(ame.permutation_P36()) == pytest.approx(314 / 315, abs=1e-12)
    assert ame.entangling_power(ame.build_Q(*ame.Q_STAR_PHASES)) == pytest.approx(419 / 420, abs=1e-12)
    target = (208 + np.sqrt(3)) / 210
    W = ame.build_W(ame.W_PHASES)
    assert ame.entangling_power(W) == pytest.approx(target, abs=1e-12)
    assert ame.gate_typicality(W) == pytest.approx(1, abs=1e-10)
    assert ame.entangling_power(ame.build_V(ame.V_STAR_PHASES)) == pytest.approx(target, abs=1e-12)


def test_p36_realignment_spectrum():
    # for any permutation of order 36 the squared singulars of P^R sum to 36
    s = np.linalg.svd(ame.realign(ame.permutation_P36(), "R"), compute_uv=False)
    expected = np.r_[[np.sqrt(2)] * 2, [1.0] * 32, [0.0] * 2]
    assert np.allclose(s, expected, atol=1e-10)


def test_p36_forms_agree():
    assert np.array_equal(ame.permutation_P36(), ame.permutation_from_vector(ame.P36_VECTOR))
    with pytest.raises(ContractViolation):
        ame.permutation_from_vector([1, 1, 2])


def test_builders():
    assert np.array_equal(ame.build_Q(0, 0), ame.permutation_P36())
    with pytest.raises(UsageError):
        ame.build_V(np.zeros(5))
    with pytest.raises(UsageError):
        ame.build_W(np.zeros(7))


def test_trajectory_from_p_to_q_star():
    eps = [ame.entangling_power(ame.build_Q(*(np.pi / 6 * t * np.array([5, 1]))))
           for t in np.linspace(0, 1, 21)]
    assert eps[0] == pytest.approx(314 / 315) and eps[-1] == pytest.approx(419 / 420)
    assert max(eps) <= 1 + 1e-12


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 4))
def test_ep_local_invariance(seed, d):
    rng = np.random.default_rng(seed)
    U = haar_unitary(d * d, rng)
    V = local(rng, d) @ U @ local(rng, d)
    assert ame.entangling_power(V) == pytest.approx(ame.entangling_power(U), abs=1e-10)


def test_ep_gt_inside_triangle():
    for d in (2, 3, 4):
        for pt in ame.ep_gt_sample(d, 50, rng_seed=d):
            assert -1e-12 <= pt.e_p <= 1 + 1e-12
            assert -1e-12 <= pt.g_t <= 2 + 1e-12
    pt = ame.ep_gt_sample(2, 1, rng_seed=0)[0]
    assert pt.e_p <= 1 and pt.g_t <= 2


def test_sample_reproducible():
    a = ame.ep_gt_sample(3, 5, rng_seed=11)
    b = ame.ep_gt_sample(3, 5, rng_seed=11)
    assert a == b
    with pytest.raises(UsageError):
        ame.ep_gt_sample(1, 5)


def test_non_unitary_warns():
    with pytest.warns(RuntimeWarning):
        ame.ep_gt(np.ones((4, 4)))


# ------------------------------------------------------------ 2-unitarity

def test_two_unitary_examples():
    assert ame.is_two_unitary(ame.golden_ame(), 1e-10)
    assert ame.is_two_unitary(ame.ame43(), 1e-10)
    assert not ame.is_two_unitary(np.eye(36))
    rep = ame.two_unitarity_report(ame.ame43())
    assert rep["e_p"] == pytest.approx(1, abs=1e-12) and rep["d"] == 3


def test_golden_structure():
    A = ame.golden_ame()
    assert np.count_nonzero(np.abs(A) > 1e-14) == 112
    c = ame.golden_coefficients()
    assert c["c"] / c["b"] == pytest.approx(GOLDEN_RATIO, abs=1e-12)
    pt = ame.ep_gt(A)
    assert pt.e_p == pytest.approx(1, abs=1e-12) and pt.g_t == pytest.approx(1, abs=1e-12)


# --------------------------------------------------------------- iso map

@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 3, 6]))
def test_iso_idempotent_and_isoentropic(seed, d):
    X = np.random.default_rng(seed).standard_normal((d * d, d * d))
    Y = ame.iso_map(X)
    assert np.max(np.abs(ame.iso_map(Y) - Y)) < 1e-12
    s = [np.linalg.svd(M, compute_uv=False) for M in (Y, ame.realign(Y, "R"), ame.realign(Y, "Gamma"))]
    assert np.allclose(s[0], s[1], atol=1e-10) and np.allclose(s[0], s[2], atol=1e-10)


def test_iso_d2_symmetric_and_rank_three():
    X = np.random.default_rng(1).standard_normal((4, 4))
    Y = ame.iso_map(X)
    assert np.allclose(Y, ame.realign(Y, "R"), atol=1e-15)
    assert np.allclose(Y, ame.realign(Y, "Gamma"), atol=1e-15)
    W, s, Vh = np.linalg.svd(Y)
    assert s[3] < 1e-12
    flat = W @ np.diag([1, 1, 1, 0]) @ Vh
    assert ame.linear_entropy(flat) == pytest.approx(8 / 9, abs=1e-12)


def test_iso_d3_only_partial_symmetry():
    X = np.random.default_rng(2).standard_normal((9, 9))
    Y = ame.iso_map(X)
    assert not np.allclose(Y, ame.realign(Y, "R"))
    assert np.allclose(ame.realign(Y, "R"), ame.realign(Y, "Gamma"))


def test_iso_recursion_even_steps_converge_to_closed_form():
    rng = np.random.default_rng(5)
    for d in (2, 3, 6):
        X = rng.standard_normal((d * d, d * d))
        Y = ame.iso_map(X)
        assert np.max(np.abs(ame.iso_sequence(X, 40) - Y)) < 1e-10
        # the error halves with every step
        e20 = np.max(np.abs(ame.iso_sequence(X, 20) - Y))
        e22 = np.max(np.abs(ame.iso_sequence(X, 22) - Y))
        assert e22 == pytest.approx(e20 / 4, rel=1e-3)


def test_iso_recursion_odd_steps_oscillate():
    X = np.random.default_rng(6).standard_normal((9, 9))
    Y = ame.iso_map(X)
    assert np.max(np.abs(ame.iso_sequence(X, 41) - Y)) > 1e-3


def test_iso_stats():
    mean2, _ = ame.iso_random_stats(2, 200, rng_seed=0)
    assert mean2 <= 8 / 9 + 1e-12
    assert ame.iso_random_stats(3, 1, rng_seed=0)[1] == 0.0


# ------------------------------------------------------------ dynamical map

def test_seed_m0():
    P = ame.permutation_P36()
    assert np.allclose(ame.seed_m0(P, 0.0), P)
    M = ame.seed_m0(P, 0.05, 1)
    assert unitarity_residual(M) < 1e-12
    assert np.linalg.norm(M - ame.seed_m0(P, 0.05, 2)) > 0
    with pytest.raises(ContractViolation):
        ame.seed_m0(np.ones((4, 4)))


def test_map_fixed_point_at_ame43():
    rec = ame.dynamical_map_run(ame.ame43())
    assert rec.outcome == "two_unitary" and rec.iterations == 0


def test_map_keeps_unitarity():
    M0 = haar_unitary(16, np.random.default_rng(3))
    for k in (1, 5, 20, 100):
        rec = ame.dynamical_map_run(M0, max_iters=k)
        assert unitarity_residual(rec.final) < 1e-8


def test_map_attractor_near_p36():
    # a single transposition away from P36
    perm = np.arange(36)
    perm[[3, 17]] = perm[[17, 3]]
    seed = ame.permutation_P36()[:, perm]
    rec = ame.dynamical_map_run(ame.seed_m0(seed, 0.05, 0), max_iters=3000)
    assert rec.outcome == "attractor_Q"
    assert rec.trajectory[-1].e_p == pytest.approx(419 / 420, abs=1e-6)


def test_map_rejects_non_unitary():
    with pytest.raises(ContractViolation):
        ame.dynamical_map_run(np.ones((9, 9)))


@pytest.mark.slow
@pytest.mark.parametrize("d", [3, 4, 5])
def test_map_success_fraction(d):
    """At least half of Haar-random starts reach a 2-unitary within 10^4 steps."""
    hits = 0
    trials = 20
    for s in range(trials):
        M0 = haar_unitary(d * d, np.random.default_rng(1000 * d + s))
        if ame.dynamical_map_run(M0, max_iters=10_000).outcome == "two_unitary":
            hits += 1
    assert hits / trials >= 0.5, f"d={d}: {hits}/{trials} reached a 2-unitary"
