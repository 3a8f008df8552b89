"""Reference-element tables for 6-node quadratic triangles.

Quadrature is the 6-point degree-4 rule, exact for the quadratic x quadratic
mass integrands, with weights scaled to the unit reference triangle (area 1/2).
Local node order: vertices 0,1,2 then midpoints opposite each vertex
(3 = mid(1,2), 4 = mid(0,2), 5 = mid(0,1)).
"""

import numpy as np

_A1, _W1 = 0.445948490915965, 0.223381589678011
_A2, _W2 = 0.091576213509771, 0.109951743655322

# (xi, eta) with lambda = (1 - xi - eta, xi, eta)
QP = np.array(
    [
        [_A1, _A1],
        [1.0 - 2.0 * _A1, _A1],
        [_A1, 1.0 - 2.0 * _A1],
        [_A2, _A2],
        [1.0 - 2.0 * _A2, _A2],
        [_A2, 1.0 - 2.0 * _A2],
    ]
)
QW = 0.5 * np.array([_W1, _W1, _W1, _W2, _W2, _W2])


def shape(xi, eta):
    """Values of the 6 quadratic basis functions at (xi, eta)."""
    l0 = 1.0 - xi - eta
    l1, l2 = xi, eta
    return np.array(
        [
            l0 * (2.0 * l0 - 1.0),
            l1 * (2.0 * l1 - 1.0),
            l2 * (2.0 * l2 - 1.0),
            4.0 * l1 * l2,
            4.0 * l0 * l2,
            4.0 * l0 * l1,
        ]
    )


def shape_grad(xi, eta):
    """(6, 2) reference gradients at (xi, eta)."""
    l0 = 1.0 - xi - eta
    l1, l2 = xi, eta
    return np.array(
        [
            [1.0 - 4.0 * l0, 1.0 - 4.0 * l0],
            [4.0 * l1 - 1.0, 0.0],
            [0.0, 4.0 * l2 - 1.0],
            [4.0 * l2, 4.0 * l1],
            [-4.0 * l2, 4.0 * (l0 - l2)],
            [4.0 * (l0 - l1), -4.0 * l1],
        ]
    )


N_AT_QP = np.array([shape(x, e) for x, e in QP])  # (6 qp, 6 basis)
DN_AT_QP = np.array([shape_grad(x, e) for x, e in QP])  # (6 qp, 6, 2)

# reference mass matrix (exact under this rule)
M_REF = np.einsum("q,qi,qj->ij", QW, N_AT_QP, N_AT_QP)

# 1D quadratic shape functions on [0, 1]: endpoints then midpoint
def shape1d(s):
    s = np.asarray(s)
    return np.stack(
        [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)]
    )
