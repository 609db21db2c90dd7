"""Throughput comparison of the witness-term kernel backends.

Both implementations are imported directly (regardless of which one the
package selected), fed the identical pre-generated inputs, and timed over
the same Python-level call loop.

Usage: python benchmarks/bench_kernels.py [n_calls]
"""

import sys
import time

import numpy as np

from gaussfade._kernels import _fallback

try:
    from gaussfade._kernels import _core
except ImportError:
    _core = None


def make_inputs(n, seed=0):
    rng = np.random.default_rng(seed)

    def cmat():
        return rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))

    def cvec():
        return rng.standard_normal(2) + 1j * rng.standard_normal(2)

    return [
        (
            cmat(),
            cmat(),
            cmat(),
            cvec(),
            cvec(),
            rng.uniform(1e-3, 1.0),
            rng.uniform(1e-3, 1.0),
            rng.uniform(0.0, 1.0),
            rng.uniform(0.0, 1.0),
        )
        for _ in range(n)
    ]


def bench(impl, inputs, repeats=3):
    best = float("inf")
    sink = 0.0
    for _ in range(repeats):
        t0 = time.perf_counter()
        for args in inputs:
            sink += impl.witness_terms(*args)[0]
        best = min(best, time.perf_counter() - t0)
    return best, sink


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
    inputs = make_inputs(n)

    results = {}
    t, sink_fb = bench(_fallback, inputs)
    results["fallback"] = t
    print(f"fallback: {n / t:10.0f} calls/s   ({1e6 * t / n:8.2f} us/call)")

    if _core is None:
        print("cython:   extension not built in this install")
        return

    t, sink_cy = bench(_core, inputs)
    results["cython"] = t
    print(f"cython:   {n / t:10.0f} calls/s   ({1e6 * t / n:8.2f} us/call)")
    print(f"speedup:  {results['fallback'] / results['cython']:.2f}x")

    if abs(sink_fb - sink_cy) > 1e-6 * max(abs(sink_fb), 1.0):
        raise SystemExit(f"backends disagree: {sink_fb!r} vs {sink_cy!r}")
    print("checksum: backends agree")


if __name__ == "__main__":
    main()
