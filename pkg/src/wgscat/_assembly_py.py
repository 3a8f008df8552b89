"""Pure-numpy element kernel: per-triangle quadratic stiffness/mass matrices.

This is the fallback for the compiled kernel in ``_assembly_cy``; both expose
``element_matrices(tri_pts) -> (K, M)`` with ``tri_pts`` of shape (nt, 3, 2).
"""

import numpy as np

from ._p2ref import DN_AT_QP, M_REF, QW

BACKEND = "python"


def element_matrices(tri_pts):
    tri_pts = np.asarray(tri_pts, dtype=np.float64)
    nt = tri_pts.shape[0]
    # affine map x = p0 + J (xi, eta)
    J = np.empty((nt, 2, 2))
    J[:, :, 0] = tri_pts[:, 1] - tri_pts[:, 0]
    J[:, :, 1] = tri_pts[:, 2] - tri_pts[:, 0]
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    inv = np.empty_like(J)
    inv[:, 0, 0] = J[:, 1, 1]
    inv[:, 0, 1] = -J[:, 0, 1]
    inv[:, 1, 0] = -J[:, 1, 0]
    inv[:, 1, 1] = J[:, 0, 0]
    inv /= det[:, None, None]

    adet = np.abs(det)
    K = np.zeros((nt, 6, 6))
    for q in range(len(QW)):
        g = np.einsum("ia,nab->nib", DN_AT_QP[q], inv)  # physical gradients
        K += QW[q] * adet[:, None, None] * np.einsum("nia,nja->nij", g, g)
    M = adet[:, None, None] * M_REF[None, :, :]
    return K, M
