"""Benchmark the compiled kernel backend against the NumPy fallback.

Run as ``python -m driftbeam.kernels.bench``.  Times each kernel at sizes
representative of the solvers (the 1D problems at M=120 and the 2D lift at
M=15, L=4) and prints the per-call speedup of the compiled core.
"""

import timeit

import numpy as np

from . import _numpy

try:
    from . import _core
except ImportError:
    _core = None


def _cases(rng):
    m, l, n = 120, 7, 4
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    u = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    h = rng.standard_normal((n, m, m)) + 1j * rng.standard_normal((n, m, m))
    m2, l2 = 15, 4
    b = rng.standard_normal((m2 * l2, m2 * l2)) + 1j * rng.standard_normal((m2 * l2, m2 * l2))
    t = rng.standard_normal((2 * m2 - 1, 2 * l2 - 1)) + 1j * rng.standard_normal((2 * m2 - 1, 2 * l2 - 1))
    return [
        ("herm_toeplitz_means (M=120)", "herm_toeplitz_means", (a,)),
        ("toeplitz_build (M=120)", "toeplitz_build", (u,)),
        ("htilde_project (N=4, M=120)", "htilde_project", (h,)),
        ("bt_generator_means (M=15, L=4)", "bt_generator_means", (b, m2, l2)),
        ("bt_build (M=15, L=4)", "bt_build", (t, m2, l2)),
    ]


def run(repeat: int = 200) -> None:
    rng = np.random.default_rng(0)
    cases = _cases(rng)
    print(f"{'kernel':34s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, fname, args in cases:
        t_np = min(timeit.repeat(lambda: getattr(_numpy, fname)(*args), number=repeat, repeat=3)) / repeat
        if _core is None:
            print(f"{label:34s} {t_np * 1e6:9.1f}us  (extension not built)")
            continue
        t_cy = min(timeit.repeat(lambda: getattr(_core, fname)(*args), number=repeat, repeat=3)) / repeat
        print(f"{label:34s} {t_np * 1e6:9.1f}us {t_cy * 1e6:9.1f}us {t_np / t_cy:7.1f}x")


if __name__ == "__main__":
    run()
