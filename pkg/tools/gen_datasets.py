"""Regenerate the bundled vector-set assets in src/unitarylab/data.

KS sets are written from their integer coordinates.  Complete MUB sets in
prime-power dimension d = p^k are the common eigenbases of the d+1 maximal
commuting classes of generalized Pauli operators; the partition into classes
(a symplectic spread) is found by backtracking.
"""

import itertools
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from unitarylab.defect import make_povm, vectors_to_json, file_checksum  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "unitarylab" / "data"

KS13 = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 1, 1], [0, 1, -1], [1, 0, 1], [1, 0, -1],
        [1, 1, 0], [1, -1, 0], [1, 1, 1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]]
KS18 = [[0, 0, 0, 1], [0, 0, 1, 0], [1, 1, 0, 0], [1, -1, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0],
        [1, 0, -1, 0], [1, -1, 1, -1], [1, -1, -1, 1], [0, 0, 1, 1], [1, 1, 1, 1],
        [0, 1, 0, -1], [1, 0, 0, 1], [1, 0, 0, -1], [0, 1, -1, 0], [1, 1, -1, 1],
        [1, 1, 1, -1], [-1, 1, 1, 1]]


def _weyl(p, k):
    w = np.exp(2j * np.pi / p)
    X = np.roll(np.eye(p), 1, axis=0)
    Z = np.diag(w ** np.arange(p))

    def op(a, b):
        M = np.ones((1, 1))
        for ai, bi in zip(a, b):
            M = np.kron(M, np.linalg.matrix_power(X, ai) @ np.linalg.matrix_power(Z, bi))
        return M
    return op


def _symp(u, v, p, k):
    return (sum(u[i] * v[k + i] - u[k + i] * v[i] for i in range(k))) % p


def _spread(p, k):
    """Partition nonzero vectors of GF(p)^{2k} into d+1 Lagrangian subspaces."""
    d = p ** k
    pts = [v for v in itertools.product(range(p), repeat=2 * k) if any(v)]
    covered = set()
    chosen = []

    def span(gens):
        out = set()
        for c in itertools.product(range(p), repeat=len(gens)):
            out.add(tuple(sum(ci * g[j] for ci, g in zip(c, gens)) % p for j in range(2 * k)))
        return out

    def lagrangians_through(v):
        # depth-first: extend {v} to k isotropic generators avoiding covered points
        res = []

        def grow(gens, S):
            if len(gens) == k:
                res.append(S)
                return
            for u in pts:
                if u in S or u in covered:
                    continue
                if all(_symp(u, g, p, k) == 0 for g in gens):
                    T = span(gens + [u])
                    if not (T - {tuple([0] * 2 * k)}) & covered:
                        grow(gens + [u], T)
                        if len(res) > 50:
                            return
        grow([v], span([v]))
        return res

    def solve():
        if len(chosen) == d + 1:
            return True
        v = next(u for u in pts if u not in covered)
        for S in lagrangians_through(v):
            nz = S - {tuple([0] * 2 * k)}
            chosen.append(nz)
            covered.update(nz)
            if solve():
                return True
            chosen.pop()
            covered.difference_update(nz)
        return False

    if not solve():
        raise RuntimeError("no spread found")
    return chosen


def full_mub(p, k, seed=0):
    d = p ** k
    op = _weyl(p, k)
    rng = np.random.default_rng(seed)
    vecs = []
    for cls in _spread(p, k):
        H = np.zeros((d, d), dtype=complex)
        for v in cls:
            P = op(v[:k], v[k:])
            c = rng.normal() + 1j * rng.normal()
            H += c * P + np.conj(c) * P.conj().T
        _, U = np.linalg.eigh(H)
        for j in range(d):
            u = U[:, j]
            u = u * np.exp(-1j * np.angle(u[np.argmax(np.abs(u) > 1e-9)]))
            u[np.abs(u) < 1e-14] = 0
            vecs.append(u)
    V = np.array(vecs)
    G = np.abs(V.conj() @ V.T) ** 2
    off = G[~np.eye(len(V), dtype=bool)]
    assert np.all((np.abs(off) < 1e-10) | (np.abs(off - 1 / d) < 1e-10)), "not unbiased"
    return V


def write(name, V, source):
    P = make_povm(V)
    obj = vectors_to_json(P)
    obj["name"] = name
    obj["source"] = source
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(obj, indent=None) + "\n")
    return path


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    paths = [
        write("ks13_d3", np.array(KS13, dtype=complex), "Yu-Oh 13-vector set, integer coordinates"),
        write("ks18_d4", np.array(KS18, dtype=complex), "Cabello-Estebaranz-Garcia-Alcaine 18-vector set"),
    ]
    for p, k in [(2, 2), (2, 3), (3, 2)]:
        d = p ** k
        paths.append(write(f"mub_d{d}", full_mub(p, k),
                           f"complete MUB set from a generalized Pauli spread, p={p}, k={k}"))
    manifest = {}
    for path in paths:
        obj = json.loads(path.read_text())
        manifest[path.stem] = {"file": path.name, "d": obj["d"], "N": len(obj["vectors"]),
                               "sha256": file_checksum(path)}
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for k, v in manifest.items():
        print(k, v["d"], v["N"], v["sha256"][:12])


if __name__ == "__main__":
    main()
