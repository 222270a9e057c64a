"""Time the pure-Python and compiled integrator kernels on a few shooting runs.

    python3 benchmarks/bench_kernels.py --repeat 5
"""
import argparse
import time

from polyharmonic import _kernel
from polyharmonic.core import ProblemSpec
from polyharmonic.shooting import ShootOptions, solve_ivp

CASES = [
    ("sinc", ProblemSpec(3, 1, 1, -1), [1.0], 10.0),
    ("lane-emden a=5", ProblemSpec(3, 1, 5, -1), [1.0], 200.0),
    ("blow-up a=2", ProblemSpec(3, 1, 2, 1), [0.1], 100.0),
    ("biharmonic a=9", ProblemSpec(5, 2, 9, 1), [1.0, -0.488], 40.0),
    ("triharmonic a=-3", ProblemSpec(7, 3, -3, -1), [1.0, 0.5, 0.2], 200.0),
]


def best_time(spec, init, r_max, backend, tol, repeat):
    opts = ShootOptions(tol=tol, backend=backend)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        profile, _ = solve_ivp(spec, init, r_max, options=opts)
        best = min(best, time.perf_counter() - t0)
    return best, profile.meta["n_accept"]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--tol", type=float, default=1e-10)
    args = parser.parse_args(argv)

    backends = sorted(_kernel.BACKENDS)
    if "compiled" not in backends:
        print("compiled kernel not built; only timing the python kernel")
    print(f"{'case':20s} {'steps':>7s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, spec, init, r_max in CASES:
        times = {}
        for b in backends:
            times[b], steps = best_time(spec, init, r_max, b, args.tol, args.repeat)
        cols = " ".join(f"{times[b] * 1e3:8.2f}ms" for b in backends)
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{name:20s} {steps:7d} {cols}   {speed:6.1f}x")


if __name__ == "__main__":
    main()
