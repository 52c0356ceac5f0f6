"""Compiled kernels against their NumPy twins.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so one run times both and also checks
that they agree. The last column is fallback time over compiled time.
"""
import argparse
import math
import timeit

import numpy as np

from seminorm_lab._backend import compiled, fallback


def cases(rng):
    dim, nts = 64, 4096
    w0, w1 = np.exp(rng.uniform(-3, 3, (2, dim)))
    ax = np.abs(rng.normal(size=dim))
    ts = np.geomspace(1e-4, 1e4, nts)
    yield f"k_diag_l1 dim={dim} scales={nts}", "k_diag_l1", (w0, w1, ax, ts)

    for p0, p1 in ((1.0, 1.0), (2.0, 3.0), (1.0, math.inf)):
        d = 6
        v0, v1 = np.exp(rng.uniform(-2, 2, (2, d)))
        x = rng.normal(size=d)
        yield (f"lattice_pair_descent dim={d} p=({p0:g},{p1:g})", "lattice_pair_descent",
               (v0, p0, v1, p1, x, 0.7, 1e-9, 100_000))

    for n in (128, 512):
        f = rng.normal(size=(n, n, 1))
        shifts = np.array([(i, j, 0) for i in range(-4, 5) for j in range(0, 5)], dtype=np.int64)
        for p in (1.0, 1.5, 3.0):
            yield (f"shift_diff_norms {n}x{n} shifts={len(shifts)} p={p:g}", "shift_diff_norms",
                   (f, shifts, p))


def _agree(a, b):
    if isinstance(a, tuple):
        return abs(a[1] - b[1]) <= 1e-9 * max(1.0, abs(a[1]))
    return np.allclose(np.asarray(a), np.asarray(b), rtol=1e-10, atol=0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    rng = np.random.default_rng(0)
    print(f"{'case':<48} {'compiled':>12} {'numpy':>12} {'speedup':>9}  agree")
    for label, name, arg in cases(rng):
        fast, slow = getattr(compiled, name), getattr(fallback, name)
        t_fast = min(timeit.repeat(lambda: fast(*arg), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*arg), number=1, repeat=args.repeat))
        ok = _agree(fast(*arg), slow(*arg))
        print(f"{label:<48} {t_fast * 1e3:>10.3f}ms {t_slow * 1e3:>10.3f}ms "
              f"{t_slow / t_fast:>8.1f}x  {'yes' if ok else 'NO'}")


if __name__ == "__main__":
    main()
