"""Element-kernel dispatch: compiled Cython core with a numpy fallback.

The per-triangle quadratic stiffness/mass computation is the hot loop of
every sweep, so it is also provided as a compiled extension.  Import order:
the Cython module if it was built, otherwise the vectorized numpy kernel.
``benchmarks/bench_assembly.py`` compares the two.
"""

import numpy as np

try:  # pragma: no cover - depends on the build environment
    from . import _assembly_cy as _kernel

    BACKEND = "cython"
except ImportError:  # pragma: no cover
    from . import _assembly_py as _kernel

    BACKEND = "python"


def element_matrices(tri_pts):
    """(nt, 6, 6) stiffness and mass matrices for quadratic triangles."""
    tri_pts = np.ascontiguousarray(tri_pts, dtype=np.float64)
    return _kernel.element_matrices(tri_pts)


def backend_name() -> str:
    return BACKEND
