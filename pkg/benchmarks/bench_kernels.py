"""Benchmark the compiled kernel extension against the pure-numpy twin.

Run:  python benchmarks/bench_kernels.py [--n 60] [--grid 512] [--steps 20000]
"""

import argparse
import timeit

import numpy as np

from hatano.kernels import _pure

try:
    from hatano.kernels import _ext
except ImportError:
    _ext = None


def bench(label, fn, number):
    t = timeit.timeit(fn, number=number) / number
    print(f"  {label:<10} {t * 1e6:10.1f} us/call")
    return t


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--grid", type=int, default=512)
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--number", type=int, default=50)
    args = ap.parse_args()

    rng = np.random.Generator(np.random.Philox(12345))
    v = rng.random(args.n)
    E = np.linspace(-3.0, 3.0, args.grid)
    backends = [("pure", _pure)] + ([("ext", _ext)] if _ext else [])
    if _ext is None:
        print("extension not built; benchmarking pure backend only")

    times = {}
    print(f"disc_trace_grid: n={args.n}, {args.grid} energies")
    for name, mod in backends:
        times[name, "disc"] = bench(
            name, lambda m=mod: m.disc_trace_grid(v, E), args.number)

    print(f"disc_trace_deriv_grid: n={args.n}, {args.grid} energies")
    for name, mod in backends:
        times[name, "deriv"] = bench(
            name, lambda m=mod: m.disc_trace_deriv_grid(v, E), args.number)

    print(f"transfer_product_scaled: n={args.n}")
    for name, mod in backends:
        times[name, "prod"] = bench(
            name, lambda m=mod: m.transfer_product_scaled(v, 1.0),
            args.number * 10)

    print(f"advance_products: {args.steps} steps, 8 replicas, 64 energies")
    vv = np.ascontiguousarray(rng.random((8, args.steps)))
    EE = np.linspace(-3.0, 3.0, 64)

    def run(mod):
        M = np.zeros((64, 8, 2, 2))
        M[:, :, 0, 0] = M[:, :, 1, 1] = 1.0
        logsum = np.zeros((64, 8))
        mod.advance_products(vv, EE, M, logsum)

    for name, mod in backends:
        times[name, "mc"] = bench(name, lambda m=mod: run(m), 3)

    if _ext is not None:
        print("speedup ext vs pure:")
        for key in ("disc", "deriv", "prod", "mc"):
            print(f"  {key:<6} {times['pure', key] / times['ext', key]:6.1f}x")


if __name__ == "__main__":
    main()
