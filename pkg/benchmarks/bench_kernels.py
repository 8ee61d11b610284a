"""Compare the compiled and numpy enumeration kernels on Dicke and GHZ supports.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from nonlocality import _kernels
from nonlocality.empirical import Scenario, build_model, support
from nonlocality.qcore import Observable
from nonlocality.states import dicke, ghz

X, Y, Z = Observable("X"), Observable("Y"), Observable("Z")


def cases():
    for n, k in [(5, 2), (6, 3), (7, 3), (8, 4)]:
        yield f"dicke({n},{k}) X/Z", support(build_model(dicke(n, k), Scenario.uniform(X, Z, n)))
    for n in (6, 8):
        yield f"ghz({n}) X/Y", support(build_model(ghz(n), Scenario.uniform(X, Y, n)))


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    comp, py = _kernels.compiled_backend, _kernels.python_backend
    if comp is None:
        print("compiled kernels not built; only the numpy backend is available")
    print(f"{'case':22} {'assignments':>11} {'numpy s':>9} {'cython s':>9} {'speedup':>8}")
    for name, sup in cases():
        n = sup.n
        tp, codes_py = timed(lambda: (py.consistent_codes(sup.mask, n), py.hit_sections(
            py.consistent_codes(sup.mask, n), n)), args.repeat)
        if comp is None:
            print(f"{name:22} {len(codes_py[0]):>11} {tp:9.4f} {'-':>9} {'-':>8}")
            continue
        tc, codes_c = timed(lambda: (comp.consistent_codes(sup.mask, n), comp.hit_sections(
            comp.consistent_codes(sup.mask, n), n)), args.repeat)
        assert np.array_equal(codes_py[0], codes_c[0]) and np.array_equal(codes_py[1], codes_c[1])
        print(f"{name:22} {len(codes_py[0]):>11} {tp:9.4f} {tc:9.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
