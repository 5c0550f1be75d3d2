"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--size 12] [--repeat 5]

Kernel timings call both implementations in-process; the end-to-end census
timing runs a subprocess with and without KACBPS_PURE=1.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from kacbps import _kernels_py

try:
    from kacbps import _kernels
except ImportError:
    _kernels = None

CENSUS = "from kacbps.kac.brute import census; from kacbps.resources import corpus_quiver; " \
         "census(corpus_quiver('two_loop'), (2,), 5)"


def inputs(p, length, seed):
    rng = np.random.default_rng(seed)
    n = p ** length
    mats = [rng.integers(0, p, size=(length, length)) for _ in range(4)]
    return n, mats


def bench(impl, n, mats, p, repeat):
    idx = np.arange(n, dtype=np.int64)

    def images():
        for m in mats:
            impl.linear_images(idx, m, p)

    perms = [_kernels_py.linear_images(idx, m, p) for m in mats]

    def orbits():
        impl.orbit_labels(n, perms)

    return (min(timeit.repeat(images, number=1, repeat=repeat)),
            min(timeit.repeat(orbits, number=1, repeat=repeat)))


def census_time(pure):
    env = dict(os.environ)
    env.pop("KACBPS_PURE", None)
    if pure:
        env["KACBPS_PURE"] = "1"
    code = f"import time; t = time.perf_counter(); {CENSUS}; print(time.perf_counter() - t)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=12, help="vector length over F_3")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n, mats = inputs(3, args.size, args.seed)
    print(f"points: {n}, matrices: {len(mats)}")
    rows = [("python", _kernels_py)]
    if _kernels is not None:
        rows.append(("cython", _kernels))
    else:
        print("compiled kernels not built; showing the fallback only")
    base = None
    for label, impl in rows:
        t_img, t_orb = bench(impl, n, mats, 3, args.repeat)
        base = base or (t_img, t_orb)
        print(f"{label:8s} linear_images {t_img * 1e3:9.1f} ms ({base[0] / t_img:5.2f}x)"
              f"   orbit_labels {t_orb * 1e3:9.1f} ms ({base[1] / t_orb:5.2f}x)")
    print(f"census two_loop (2) p=5: pure {census_time(True):.2f}s, default {census_time(False):.2f}s")


if __name__ == "__main__":
    main()
