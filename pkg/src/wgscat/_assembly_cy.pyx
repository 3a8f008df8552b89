# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled element kernel: quadratic stiffness/mass matrices per triangle."""

import numpy as np

cimport numpy as cnp

from ._p2ref import DN_AT_QP, M_REF, QW

cnp.import_array()

BACKEND = "cython"

_DN = np.ascontiguousarray(DN_AT_QP, dtype=np.float64)
_MREF = np.ascontiguousarray(M_REF, dtype=np.float64)
_QW = np.ascontiguousarray(QW, dtype=np.float64)


def element_matrices(cnp.ndarray[cnp.float64_t, ndim=3] tri_pts):
    cdef Py_ssize_t nt = tri_pts.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] K = np.zeros((nt, 6, 6))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] M = np.empty((nt, 6, 6))
    cdef double[:, :, ::1] dn = _DN
    cdef double[:, ::1] mref = _MREF
    cdef double[::1] qw = _QW
    cdef double[:, :, ::1] pts = tri_pts
    cdef double[:, :, ::1] Kv = K
    cdef double[:, :, ::1] Mv = M
    cdef Py_ssize_t n, q, i, j
    cdef double j00, j01, j10, j11, det, adet
    cdef double i00, i01, i10, i11, w
    cdef double gx[6]
    cdef double gy[6]
    with nogil:
        for n in range(nt):
            j00 = pts[n, 1, 0] - pts[n, 0, 0]
            j10 = pts[n, 1, 1] - pts[n, 0, 1]
            j01 = pts[n, 2, 0] - pts[n, 0, 0]
            j11 = pts[n, 2, 1] - pts[n, 0, 1]
            det = j00 * j11 - j01 * j10
            adet = det if det >= 0 else -det
            i00 = j11 / det
            i01 = -j01 / det
            i10 = -j10 / det
            i11 = j00 / det
            for q in range(6):
                w = qw[q] * adet
                for i in range(6):
                    gx[i] = dn[q, i, 0] * i00 + dn[q, i, 1] * i10
                    gy[i] = dn[q, i, 0] * i01 + dn[q, i, 1] * i11
                for i in range(6):
                    for j in range(6):
                        Kv[n, i, j] += w * (gx[i] * gx[j] + gy[i] * gy[j])
            for i in range(6):
                for j in range(6):
                    Mv[n, i, j] = adet * mref[i, j]
    return K, M
