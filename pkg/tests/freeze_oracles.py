"""Compute oracle values with tests/oracles.py and freeze them to data/frozen.json.

Run once; the tests compare the package against the frozen numbers.
    python tests/freeze_oracles.py
"""

import json
from pathlib import Path

import numpy as np

import oracles

HERE = Path(__file__).resolve().parent


def circ(row):
    row = np.asarray(row, dtype=float)
    n = row.size
    return np.array([[row[(c - r) % n] for c in range(n)] for r in range(n)])


def m_n(n):
    return circ([-1.0] * (n // 2) + [1.0] * (n - n // 2))


def main():
    rng = np.random.default_rng(20240611)
    out = {}
    out["circulant_lhv"] = {str(n): oracles.lhv_core_bruteforce(m_n(n)) for n in range(3, 13)}
    pm1 = []
    for _ in range(50):
        m = int(rng.integers(2, 6))
        C = rng.choice([-1.0, 1.0], size=(m, m))
        pm1.append({"core": C.tolist(), "value": oracles.sign_pair_bruteforce(C)})
    out["pm1_pairs"] = pm1
    qary = []
    for q, m in [(2, 4), (3, 3), (3, 4), (4, 3), (5, 2), (3, 5), (4, 4), (2, 6), (8, 2), (6, 3), (2, 12), (4, 6), (8, 4), (16, 3)]:
        S = rng.normal(size=(q, q, m, m))
        w = np.exp(2j * np.pi / q)
        F = np.array([[w ** (s * a) for a in range(q)] for s in range(q)])
        M = np.einsum("sa,tb,abxy->sxty", F, F, S).reshape(q * m, q * m) / np.sqrt(q)
        qary.append({"q": q, "m": m, "re": M.real.tolist(), "im": M.imag.tolist(),
                     "value": oracles.qary_excess_bruteforce(M, q)})
    out["qary"] = qary
    out["nilpotent_radius"] = oracles.numerical_radius_grid(np.array([[0, 1], [0, 0]]))
    F2 = np.array([[1, 1], [1, -1]], dtype=complex)
    out["haagerup_F2"] = oracles.haagerup_bruteforce(F2)
    F5 = np.exp(2j * np.pi * np.outer(range(5), range(5)) / 5)
    out["haagerup_F5"] = oracles.haagerup_bruteforce(F5)
    out["defect_fd"] = {str(n): oracles.chm_defect_finite_difference(
        np.exp(2j * np.pi * np.outer(range(n), range(n)) / n)) for n in (4, 5, 6, 7)}
    (HERE / "data" / "frozen.json").write_text(json.dumps(out) + "\n")
    print({k: v for k, v in out.items() if k not in ("pm1_pairs", "qary")})


if __name__ == "__main__":
    main()
