"""Time the compiled enumeration kernels against the numpy reference.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from unitarylab import _kernels_py as py
from unitarylab.bell import circulant_bell, correlation_matrix, paley_hadamard

try:
    from unitarylab import _kernels as cy
except ImportError:
    cy = None


def best_of(fn, repeat):
    t = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        t.append(time.perf_counter() - t0)
    return min(t), out


def cases():
    rng = np.random.default_rng(0)
    for n in (14, 18, 22):
        C = circulant_bell(n)
        yield f"lhv_pm1 circulant n={n}", lambda k, C=C: k.lhv_pm1(C)
    for q, m in ((3, 8), (4, 6), (5, 5)):
        M = correlation_matrix(rng.normal(size=(q, q, m, m)))
        yield f"lhv_qary q={q} m={m}", lambda k, M=M, q=q, m=m: k.lhv_qary(M, q, m)
    H = paley_hadamard(11)
    yield "optimal_pm1 Paley m=12", lambda k: k.optimal_pm1(H)
    H16 = np.kron(circulant_bell(4) * -1, circulant_bell(4) * -1)
    yield "unbiased_pm1 order 16", lambda k: k.unbiased_pm1(H16, 4.0)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not built; only the numpy timings are shown")
    print(f"{'case':32s} {'numpy [s]':>10s} {'cython [s]':>10s} {'speedup':>8s}")
    for name, fn in cases():
        tp, rp = best_of(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:32s} {tp:10.4f}")
            continue
        tc, rc = best_of(lambda: fn(cy), args.repeat)
        assert abs(float(rp[0] if isinstance(rp, tuple) else 0) - float(rc[0] if isinstance(rc, tuple) else 0)) < 1e-9
        print(f"{name:32s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
