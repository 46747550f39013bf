"""Benchmark: compiled Whitney mass kernel vs the numpy fallback.

The per-simplex local-matrix assembly is the only Python-level hot loop in
the build; this script times both backends on the same meshes and checks
they agree bitwise-closely. Run:

    python benchmarks/bench_whitney.py
"""
import os
import time

import numpy as np

from conelab import _whitney, generators


def time_backend(coords, p, pure: bool, repeats: int = 3) -> float:
    if pure:
        os.environ["CONELAB_PURE"] = "1"
    else:
        os.environ.pop("CONELAB_PURE", None)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        _whitney.local_mass(coords, p)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    if not _whitney.HAVE_COMPILED:
        print("compiled kernel not built; only the numpy fallback is available")
        return
    meshes = [
        ("torus3 n=8", generators.freudenthal_torus(3, 8)),
        ("torus3 n=16", generators.freudenthal_torus(3, 16)),
        ("icosphere sub=4", generators.icosphere(4)),
    ]
    print(f"{'mesh':<18} {'p':>2} {'simplices':>10} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for name, cx in meshes:
        coords = cx.top_coords()
        for p in range(cx.dim + 1):
            t_pure = time_backend(coords, p, pure=True)
            t_fast = time_backend(coords, p, pure=False)
            fast, _ = _whitney.local_mass(coords, p)
            os.environ["CONELAB_PURE"] = "1"
            pure, _ = _whitney.local_mass(coords, p)
            os.environ.pop("CONELAB_PURE", None)
            agree = np.abs(fast - pure).max() / max(np.abs(pure).max(), 1e-300)
            assert agree < 1e-10, f"backend mismatch {agree}"
            print(f"{name:<18} {p:>2} {coords.shape[0]:>10} "
                  f"{t_pure * 1e3:>8.1f}ms {t_fast * 1e3:>8.1f}ms "
                  f"{t_pure / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
