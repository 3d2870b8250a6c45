"""Time the multistart LM kernel on the compiled and pure-Python backends.

    python3 benchmarks/bench_lm.py [--restarts K] [--repeat N]
"""
import argparse
import time

from grasscurv import kernels
from grasscurv.search import (
    build_ansatz,
    constraints_from_ansatz,
    enumerate_exponents,
    g26_r7_pattern,
    solve_multistart,
)


def cases():
    yield "G(2,4) r=5 (floor)", constraints_from_ansatz(build_ansatz(4, (1, 3), 2), 5)
    yield "G(2,5) r=7 r=(1,2,4) s1=2", constraints_from_ansatz(build_ansatz(5, (1, 2, 4), 2), 7)
    yield "G(2,5) r=8 all branches", [constraints_from_ansatz(a, 8) for a in enumerate_exponents(5, 8)]
    yield "G(2,6) r=7 preset", constraints_from_ansatz(g26_r7_pattern(), 7)


def bench(systems, backend, restarts, repeat):
    if not isinstance(systems, list):
        systems = [systems]
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        floors = [solve_multistart(s, restarts, 42, stop_on_solve=False, backend=backend).residual
                  for s in systems]
        best = min(best, time.perf_counter() - t0)
    return best, min(floors)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--restarts", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"]
    try:
        kernels.get_backend("cython")
        backends.insert(0, "cython")
    except ImportError:
        print("compiled core not built; timing the fallback only")
    print(f"{'case':32s} " + " ".join(f"{b + ' [s]':>12s}" for b in backends) + f" {'speedup':>8s} {'floor':>10s}")
    for name, systems in cases():
        times, floor = [], None
        for b in backends:
            t, floor = bench(systems, b, args.restarts, args.repeat)
            times.append(t)
        speed = times[-1] / times[0] if len(times) == 2 else float("nan")
        print(f"{name:32s} " + " ".join(f"{t:12.4f}" for t in times) + f" {speed:8.1f} {floor:10.3g}")


if __name__ == "__main__":
    main()
