"""Time the compiled and pure-Python table kernels against each other.

    python benchmarks/bench_kernel.py --limits 100000 1000000 3000000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from intcomplexity import kernel
from intcomplexity.complexity import build_table


def time_build(limit: int, backend: str, repeat: int) -> tuple[float, np.ndarray]:
    best = float("inf")
    values = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        values = build_table(limit, backend=backend).values
        best = min(best, time.perf_counter() - t0)
    return best, values


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limits", type=int, nargs="+", default=[10**5, 10**6])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--python-max", type=int, default=3 * 10**6, help="skip the slow backend above this")
    args = ap.parse_args(argv)

    backends = [b for b in ("cython", "python") if b in kernel.BACKENDS]
    print(f"default backend: {kernel.BACKEND}")
    print(f"{'limit':>10} {'backend':>8} {'seconds':>9} {'speedup':>8}")
    for limit in args.limits:
        results = {}
        for b in backends:
            if b == "python" and limit > args.python_max:
                continue
            results[b] = time_build(limit, b, args.repeat if b == "cython" else 1)
        if len(results) == 2:
            assert np.array_equal(results["cython"][1], results["python"][1]), "backends disagree"
        base = results.get("python", (None,))[0]
        for b, (t, _) in results.items():
            speed = f"{base / t:7.1f}x" if base else "      -"
            print(f"{limit:>10} {b:>8} {t:9.3f} {speed:>8}")


if __name__ == "__main__":
    main()
