"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-``repeat`` time of each backend,
the speed-up and the max difference between their outputs.
"""

import argparse
import math
import timeit

import numpy as np

from bergman_bloch import _pykernels

try:
    from bergman_bloch import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    n, k = 3, 200_000
    W = rng.normal(size=(k, n)) + 1j * rng.normal(size=(k, n))
    W = np.ascontiguousarray(W / (1.1 * np.linalg.norm(W, axis=1).max()))
    z = np.ascontiguousarray(W[0] * 0.9)
    m = np.array([2, 1, 0])
    a = np.ascontiguousarray(W[1])
    xs = np.linspace(0.05, 150.0, 20_000)

    def lgamma_all(mod):
        return np.array([mod.lgamma(x) for x in xs])

    return {
        "lgamma x20000": lgamma_all,
        "hyp2f1 x=1-1e-4": lambda mod: np.array(
            mod.hyp2f1_sum(1.25, 1.25, 3.5, 1 - 1e-4, 1e-12, 10.0, 1 - 5e-5, 10**7)[:1]
        ),
        "deriv_integrand 2e5x3": lambda mod: mod.deriv_integrand(W, z, m, 6.5),
        "involution 2e5x3": lambda mod: mod.involution(a, W),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':<24}{'python s':>11}{'cython s':>11}{'speed-up':>10}{'max diff':>11}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:<24}{t_py:>11.4f}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        diff = np.max(np.abs(fn(_pykernels) - fn(_ckernels)))
        speed = t_py / t_c if t_c > 0 else math.inf
        print(f"{name:<24}{t_py:>11.4f}{t_c:>11.4f}{speed:>9.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
