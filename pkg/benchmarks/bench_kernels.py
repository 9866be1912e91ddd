"""Time the compiled kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import time

import numpy as np

from specpriv import _kernels
from specpriv import graph as gr


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    for n in (50, 100):
        a = gr.laplacian(gr.generate("erdos_renyi", n, p=0.3, seed=1))
        yield f"jacobi n={n}", lambda k, a=a: k["jacobi"](a.copy(), 1e-12, 100)
    lam = rng.uniform(0, 50, 1_000_000)
    u = rng.random(lam.size)
    yield "icdf 1e6 draws", lambda k: k["icdf"](lam, u, 10.57, 50.0)
    g = gr.generate("erdos_renyi", 400, p=0.02, seed=2)
    indptr, indices = g.csr()
    yield "bfs n=400", lambda k: k["bfs"](g.n, indptr, indices)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args(argv)
    py = {"jacobi": _kernels._jacobi_eigvalsh_py, "icdf": _kernels._bl_icdf_py, "bfs": _kernels._bfs_distances_py}
    impls = {"numpy": py}
    if _kernels.HAVE_NUMBA:
        impls["numba"] = {"jacobi": _kernels._jacobi_eigvalsh_nb, "icdf": _kernels._bl_icdf_nb,
                          "bfs": _kernels._bfs_distances_nb}
    rows = []
    print(f"{'kernel':<16}" + "".join(f"{k:>12}" for k in impls) + f"{'speedup':>10}")
    for name, run in cases():
        row = {"kernel": name}
        for label, k in impls.items():
            run(k)  # warm-up, includes JIT compilation
            row[label] = best_of(lambda: run(k), args.repeat)
        speed = row["numpy"] / row["numba"] if "numba" in row else float("nan")
        row["speedup"] = speed
        rows.append(row)
        print(f"{name:<16}" + "".join(f"{row[k] * 1e3:>10.2f}ms" for k in impls) + f"{speed:>9.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
