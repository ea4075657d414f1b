"""Time the polynomial evaluation kernel under both backends.

    python3 benchmarks/bench_kernels.py [--points 20000] [--repeat 5]

The numba backend is timed after one warm-up call so compilation is not
counted. Both backends are checked to agree before timing.
"""
import argparse
import os
import time

import numpy as np

from ccclose import kernels
from ccclose.poly import parse_ideal, parse_poly
from ccclose.witness import canonical_witness, lift, ring_vars


def workload():
    vs = ("x", "y", "z")
    I = parse_ideal("x^3,y^3,x*y*z^2", vs)
    W = canonical_witness(I, parse_poly("x^2*y^2*z + 3*x*y^2*z^2 - y^4", vs))
    polys = list(W.numerators) + [W.denominator, lift(W.g, vs)]
    return [kernels.pack(p, len(vs), conj_offset=len(vs)) for p in polys
            if p.terms and p.vars == ring_vars(vs)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    pts = rng.normal(size=(args.points, 3)) + 1j * rng.normal(size=(args.points, 3))
    packed = workload()
    terms = sum(len(c) for _, c in packed)
    print(f"{len(packed)} polynomials, {terms} terms, {args.points} points")

    def run(f):
        return [f(e, c, pts) for e, c in packed]

    ref = run(kernels.eval_numpy)
    t_np = best_of(lambda: run(kernels.eval_numpy), args.repeat)
    print(f"numpy : {t_np * 1e3:9.2f} ms")
    if kernels._eval_numba is None:
        print("numba : not installed")
        return
    got = run(kernels.eval_numba)          # warm-up and compile
    err = max(float(np.max(np.abs(a - b) / (1 + np.abs(a)))) for a, b in zip(ref, got))
    t_nb = best_of(lambda: run(kernels.eval_numba), args.repeat)
    print(f"numba : {t_nb * 1e3:9.2f} ms  (speed-up {t_np / t_nb:.1f}x, max rel. diff {err:.1e})")
    print(f"active backend: {kernels.backend()} (CCCLOSE_NUMBA={os.environ.get('CCCLOSE_NUMBA', 'unset')})")


if __name__ == "__main__":
    main()
