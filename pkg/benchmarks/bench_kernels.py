#!/usr/bin/env python3
"""Throughput comparison of the stepping-kernel backends.

Runs identical fixed-workload advances through the compiled extension and
the numpy fallback and reports steps/second.  The closed-loop acceptance run
takes a few million steps, which is why the compiled path is the default.

    python benchmarks/bench_kernels.py [--steps 40000] [--n 200]
"""

import argparse
import time

import numpy as np

from stefanctl import kernels
from stefanctl.config import DEFAULT_MATERIAL
from stefanctl.core import MaterialParams


def bench_one_phase(impl, N: int, steps: int) -> float:
    p = MaterialParams(**DEFAULT_MATERIAL)
    xi = np.linspace(0.0, 1.0, N + 1)
    u = 1.0 * (1.0 - xi)
    work = tuple(np.empty(N + 1) for _ in range(5))
    cfl = 2.0 * 0.5 * (1.0 / N) ** 2 / p.alpha
    t0 = time.perf_counter()
    out = impl.advance_one_phase(u, 0.001, 0.0, 1e12, 800.0,
                                 p.alpha, p.beta, p.k,
                                 cfl, 30.0, 0.0, 0.0, 0.1, steps, *work)
    wall = time.perf_counter() - t0
    assert out[0] == kernels.STATUS_MAXSTEPS and out[4] == steps
    return steps / wall


def bench_two_phase(impl, N: int, steps: int) -> float:
    pl = MaterialParams(**DEFAULT_MATERIAL)
    ps = MaterialParams(rho=910.0, cp=2100.0, k=0.25,
                        latent_heat=210000.0, Tm=37.0)
    xi = np.linspace(0.0, 1.0, N + 1)
    u = 10.0 * (1.0 - xi)
    v = -10.0 * xi
    work = tuple(np.empty(N + 1) for _ in range(6))
    cfl_l = 2.0 * 0.5 * (1.0 / N) ** 2 / pl.alpha
    cfl_s = 2.0 * 0.5 * (1.0 / N) ** 2 / ps.alpha
    t0 = time.perf_counter()
    out = impl.advance_two_phase(u, v, 0.006, 0.0, 1e12, 100.0,
                                 pl.alpha, pl.beta, pl.k, ps.alpha, ps.k,
                                 pl.rho * pl.latent_heat, 0.02,
                                 cfl_l, cfl_s, 30.0, 0.0, 1e-6, 0.0199,
                                 steps, *work)
    wall = time.perf_counter() - t0
    assert out[0] == kernels.STATUS_MAXSTEPS and out[4] == steps
    return steps / wall


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=40000)
    ap.add_argument("--n", type=int, default=200)
    args = ap.parse_args()

    backends = {}
    for name in ("compiled", "python"):
        try:
            backends[name] = kernels.get_backend(name)
        except (ImportError, ValueError):
            print(f"backend {name}: unavailable")
    rates = {}
    print(f"workload: N={args.n}, {args.steps} steps per case\n")
    print(f"{'backend':<10} {'one-phase steps/s':>18} {'two-phase steps/s':>18}")
    for name, impl in backends.items():
        one = bench_one_phase(impl, args.n, args.steps)
        two = bench_two_phase(impl, args.n, max(args.steps // 4, 1000))
        rates[name] = (one, two)
        print(f"{name:<10} {one:>18.0f} {two:>18.0f}")
    if len(rates) == 2:
        r1 = rates["compiled"][0] / rates["python"][0]
        r2 = rates["compiled"][1] / rates["python"][1]
        print(f"\nspeedup (compiled/python): one-phase {r1:.1f}x, two-phase {r2:.1f}x")


if __name__ == "__main__":
    main()
