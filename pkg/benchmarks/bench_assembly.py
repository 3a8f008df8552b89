"""Timing comparison of the element-matrix kernels (Cython vs pure numpy).

Run with:  python3 benchmarks/bench_assembly.py [--h-factor 40]
"""

import argparse
import math
import time

import numpy as np

from wgscat import _assembly_py, assembly
from wgscat.geometry import build_omega, truncate
from wgscat.mesh import generate

try:
    from wgscat import _assembly_cy
except ImportError:
    _assembly_cy = None


def time_kernel(fn, tri_pts, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(tri_pts)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--h-factor", type=float, default=40.0,
                        help="mesh size h = ell / h_factor")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    k = 0.8 * math.pi
    ell = math.pi / k
    mesh = generate(truncate(build_omega(k, 3.0)), ell / args.h_factor)
    tri_pts = np.ascontiguousarray(mesh.vertices[mesh.triangles],
                                   dtype=np.float64)
    print(f"mesh: {mesh.triangles.shape[0]} triangles, "
          f"{mesh.n_nodes} P2 nodes (h = ell/{args.h_factor:g})")
    print(f"active backend: {assembly.backend_name()}")

    t_py = time_kernel(_assembly_py.element_matrices, tri_pts, args.repeats)
    print(f"pure numpy kernel: {1e3 * t_py:8.2f} ms")
    if _assembly_cy is not None:
        t_cy = time_kernel(_assembly_cy.element_matrices, tri_pts,
                           args.repeats)
        print(f"cython kernel:     {1e3 * t_cy:8.2f} ms  "
              f"({t_py / t_cy:.1f}x speedup)")
        K_py, M_py = _assembly_py.element_matrices(tri_pts)
        K_cy, M_cy = _assembly_cy.element_matrices(tri_pts)
        err = max(np.abs(K_py - K_cy).max(), np.abs(M_py - M_cy).max())
        print(f"max |python - cython| = {err:.2e}")
    else:
        print("cython kernel not built; skipping comparison")


if __name__ == "__main__":
    main()
