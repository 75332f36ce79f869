"""Benchmark the compiled network kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the three hot operations of the training loops (single-sample
forward, backprop, and whole-dataset fitness evaluation) plus one full
evolution-strategy run, on both backends.
"""

import argparse
import time

import numpy as np

from hybridode.neuralnet import _py_kernels, init_weights
from hybridode.problems import linear_decay_forced
from hybridode.solvers import StepConfig, integrate
from hybridode.training import EsConfig, make_dataset, train_es

try:
    from hybridode.neuralnet import _kernels

    BACKENDS = {"cython": _kernels, "python": _py_kernels}
except ImportError:
    print("compiled extension not available; benchmarking the fallback only")
    BACKENDS = {"python": _py_kernels}


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    p = linear_decay_forced()
    traj = integrate(p, StepConfig(dt=0.05, method="euler"))
    ds = make_dataset(traj, inputs=p.input)
    net = init_weights((2, 10, 1), 0)
    x = ds.inputs[0]
    y = ds.targets[0]

    calls = 10_000
    rows = []
    for name, k in BACKENDS.items():
        t_fwd = timeit(lambda: [k.forward(net.weights, x) for _ in range(calls)],
                       args.repeats)
        t_bp = timeit(lambda: [k.backprop(net.weights, x, y) for _ in range(calls)],
                      args.repeats)
        t_sse = timeit(
            lambda: [k.dataset_sse(net.weights, ds.inputs, ds.targets)
                     for _ in range(calls)],
            args.repeats,
        )
        rows.append((name, t_fwd, t_bp, t_sse))

    print(f"{'backend':<8} {'forward':>12} {'backprop':>12} {'dataset_sse':>12}"
          f"   (us per call, best of {args.repeats})")
    for name, t_fwd, t_bp, t_sse in rows:
        print(f"{name:<8} {1e6 * t_fwd / calls:>12.2f} {1e6 * t_bp / calls:>12.2f} "
              f"{1e6 * t_sse / calls:>12.2f}")

    cfg = EsConfig(population=250, iterations=100, seed=42)
    print("\nfull ES run (N=250, M=100) on the decay dataset:")
    import hybridode.training as training_mod

    for name, k in BACKENDS.items():
        # swap the backend the trainer's fitness evaluation sees
        saved = training_mod.kernels
        training_mod.kernels = k
        try:
            start = time.perf_counter()
            _, hist = train_es(ds, (2, 10, 1), cfg)
            elapsed = time.perf_counter() - start
            print(f"{name:<8} {elapsed:>8.2f} s   final MSE {hist[-1]:.3e}")
        finally:
            training_mod.kernels = saved


if __name__ == "__main__":
    main()
