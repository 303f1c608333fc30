"""Timing comparison of the compiled kernels against the pure-numpy fallback.

Runs the three hot loops (plain RK4, state+tangent RK4, Benettin accumulation)
through both backends on identical inputs and prints wall time, speedup, and
the worst numerical deviation between the two.

Usage:
    python benchmarks/bench_backends.py [--steps 200000] [--repeats 3]
"""

import argparse
import time

import numpy as np

from lyapdim import _kernels_py

try:
    from lyapdim import _kernels
except ImportError:
    _kernels = None

SIGMA, R, B = 10.0, 28.0, 8.0 / 3.0
H = 1e-3


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_state(mod, steps, repeats):
    def run():
        s = np.array([1.0, 1.0, 1.0])
        assert mod.rk4_state(SIGMA, R, B, s, H, steps) == 0
        return s

    t = _time(run, repeats)
    return t, run()


def bench_aug(mod, steps, repeats):
    def run():
        s = np.array([1.0, 1.0, 1.0])
        f = np.eye(3)
        assert mod.rk4_aug(SIGMA, R, B, s, f, H, steps) == 0
        return f

    t = _time(run, repeats)
    return t, run()


def bench_benettin(mod, steps, repeats):
    chunks = max(1, steps // 500)

    def run():
        s = np.array([1.0, 1.0, 1.0])
        f = np.eye(3)
        logs = np.zeros(3)
        assert mod.benettin(SIGMA, R, B, s, f, H, 500, chunks, logs) == 0
        return logs

    t = _time(run, repeats)
    return t, run()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=200_000,
                    help="RK4 steps per kernel invocation")
    ap.add_argument("--repeats", type=int, default=3,
                    help="repeats per timing (best is reported)")
    args = ap.parse_args()

    if _kernels is None:
        raise SystemExit("compiled extension not available; nothing to compare")

    print(f"steps={args.steps}  h={H}  classical parameters "
          f"(sigma={SIGMA}, r={R}, b={B})")
    print(f"{'kernel':<12} {'compiled':>10} {'python':>10} {'speedup':>8} "
          f"{'max |diff|':>12}")
    for name, bench in (
        ("rk4_state", bench_state),
        ("rk4_aug", bench_aug),
        ("benettin", bench_benettin),
    ):
        # the python loops are slow; scale their workload down and normalize
        steps_py = max(1000, args.steps // 20)
        tc, _ = bench(_kernels, args.steps, args.repeats)
        tp, out_p = bench(_kernels_py, steps_py, 1)
        tp_scaled = tp * args.steps / steps_py
        _, out_c = bench(_kernels, steps_py, 1)
        diff = float(np.max(np.abs(np.asarray(out_c) - np.asarray(out_p))))
        print(f"{name:<12} {tc:>9.4f}s {tp_scaled:>9.4f}s {tp_scaled / tc:>7.1f}x "
              f"{diff:>12.3e}")


if __name__ == "__main__":
    main()
