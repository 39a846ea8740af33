"""Timing comparison of the compiled and pure-numpy kernel backends.

Run as:  python3 -m kgspectral.benchmark [--mesh 256,1024,4096] [--steps 400]

The per-step work is FFT-dominated for large grids, so the compiled
kernels matter most at small and moderate N where the pointwise stage is
a visible fraction of the step.
"""

from __future__ import annotations

import argparse
import sys
import time

from .backend import compiled_available, select_kernels
from .coefficients import build_coefficient_table
from .grid import make_grid
from .initial_data import benchmark_state
from .stepper import step


def _time_backend(kernels, grid, eps: float, tau: float, n_steps: int) -> float:
    state = benchmark_state(grid, eps)
    table = build_coefficient_table(grid, eps, tau)
    # warm-up step covers FFT plan setup and lazy allocations
    step(state, table, kernels=kernels)
    start = time.perf_counter()
    current = state
    for _ in range(n_steps):
        current = step(current, table, kernels=kernels)
    return (time.perf_counter() - start) / n_steps


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python3 -m kgspectral.benchmark",
        description="compare kernel backends step-for-step",
    )
    parser.add_argument(
        "--mesh",
        default="256,1024,4096",
        help="comma-separated grid sizes (default 256,1024,4096)",
    )
    parser.add_argument("--steps", type=int, default=400, help="steps per timing")
    parser.add_argument("--eps", type=float, default=0.25)
    parser.add_argument("--tau", type=float, default=1e-3)
    args = parser.parse_args(argv)

    names = ["python"]
    if compiled_available():
        names.append("compiled")
    else:
        print("compiled backend not built; timing pure python only")

    meshes = [int(part) for part in args.mesh.split(",")]
    print(f"{'N':>8} " + " ".join(f"{name:>14}" for name in names) + "   speedup")
    for n in meshes:
        grid = make_grid(-32.0, 32.0, n)
        per_step = [
            _time_backend(select_kernels(name), grid, args.eps, args.tau, args.steps)
            for name in names
        ]
        cells = " ".join(f"{t * 1e6:>12.1f}us" for t in per_step)
        speedup = f"{per_step[0] / per_step[-1]:.2f}x" if len(per_step) > 1 else "-"
        print(f"{n:>8} {cells}   {speedup}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
