"""Complex Helmholtz solves: assembly, sparse direct factorization, fields.

The variational problem is, for trial u and test psi,

    int grad(u).grad(psi) - k^2 int u psi
        - sum_ports sum_n Lambda_n <u, c_n> <c_n, psi> / ||c_n||^2
    = (incident forcing projected on its channel),

with an unconjugated (bilinear) pairing so the assembled matrix is complex
symmetric.  Dirichlet lines (the symmetry segment of the mixed problems) are
removed by row/column elimination, which keeps the symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import assembly
from ._p2ref import shape
from .mesh import Mesh
from .modal import PortBasis, PortQuadrature


class SolverError(RuntimeError):
    pass


@dataclass
class HelmholtzSystem:
    A: sp.csr_matrix  # complex symmetric
    b: np.ndarray
    mesh: Mesh
    k: float
    free: np.ndarray  # boolean mask of unconstrained nodes
    quads: Dict[str, PortQuadrature]
    bases: Dict[str, PortBasis]

    @property
    def ndof(self) -> int:
        return self.A.shape[0]


@dataclass
class ComplexField:
    values: np.ndarray  # complex nodal vector
    mesh: Mesh
    k: float
    metadata: dict = dfield(default_factory=dict)


def stiffness_mass(mesh: Mesh) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    tri_pts = mesh.vertices[mesh.triangles]
    Ke, Me = assembly.element_matrices(tri_pts)
    tn = mesh.tri_nodes()
    rows = np.repeat(tn, 6, axis=1).ravel()
    cols = np.tile(tn, (1, 6)).ravel()
    n = mesh.n_nodes
    K = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((Me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return K, M


def assemble(
    mesh: Mesh,
    k: float,
    bases: Dict[str, PortBasis],
    incident: Optional[Tuple[str, int]] = None,
    dirichlet_tag: Optional[str] = None,
) -> HelmholtzSystem:
    tagged_ports = {p.id for p in mesh.domain.ports}
    if tagged_ports - set(bases):
        raise SolverError(f"missing port bases for {tagged_ports - set(bases)}")
    if incident is not None:
        pid, m = incident
        if pid not in bases:
            raise SolverError(f"incident port {pid!r} has no basis")
        if m >= bases[pid].N:
            raise SolverError(f"incident mode index {m} >= N={bases[pid].N}")

    K, M = stiffness_mass(mesh)
    n = mesh.n_nodes
    A = (K - (k * k) * M).astype(np.complex128)

    b = np.zeros(n, dtype=np.complex128)
    quads: Dict[str, PortQuadrature] = {}
    port_rows, port_cols, port_data = [], [], []
    for pid, basis in bases.items():
        quad = PortQuadrature.from_mesh(mesh, basis.port)
        quads[pid] = quad
        pos = basis.port.position
        pnodes = np.unique(quad.node_ids.ravel())
        loc = {g: i for i, g in enumerate(pnodes)}
        for mode in basis.modes:
            qv = quad.node_vector(n, mode.profile)
            qloc = qv[pnodes]
            lam = mode.robin(pos)
            coef = lam / mode.norm2
            outer = coef * np.outer(qloc, qloc)
            port_rows.append(np.repeat(pnodes, len(pnodes)))
            port_cols.append(np.tile(pnodes, len(pnodes)))
            port_data.append(outer.ravel())
            if incident is not None and pid == incident[0] and mode.n == incident[1]:
                b += mode.incident_forcing(pos) * qv
    if port_data:
        P = sp.coo_matrix(
            (np.concatenate(port_data),
             (np.concatenate(port_rows), np.concatenate(port_cols))),
            shape=(n, n),
        ).tocsr()
        A = A - P

    free = np.ones(n, dtype=bool)
    if dirichlet_tag is not None:
        fixed = mesh.nodes_on_tag(dirichlet_tag)
        if len(fixed) == 0:
            raise SolverError(f"no boundary nodes carry tag {dirichlet_tag!r}")
        free[fixed] = False

    return HelmholtzSystem(A=A, b=b, mesh=mesh, k=k, free=free, quads=quads,
                           bases=bases)


def factor_solve(system: HelmholtzSystem, rcond_estimate: bool = False) -> ComplexField:
    free = system.free
    A = system.A[free][:, free].tocsc()
    b = system.b[free]
    try:
        lu = spla.splu(A, permc_spec="COLAMD")
        x = lu.solve(b)
    except RuntimeError as exc:
        raise SolverError(
            f"sparse factorization failed ({exc}); the truncated problem may be "
            "resonant for this geometry - try different truncation margins"
        ) from exc
    if not np.all(np.isfinite(x)):
        raise SolverError("non-finite solution: singular or near-singular system")
    nb = np.linalg.norm(b)
    residual = np.linalg.norm(A @ x - b) / nb if nb > 0 else np.linalg.norm(A @ x)
    meta = {"residual": float(residual)}
    if residual > 1e-10 and nb > 0:
        meta["residual_warning"] = True
    if rcond_estimate:
        try:
            inv_norm = spla.onenormest(
                spla.LinearOperator(A.shape, matvec=lu.solve,
                                    rmatvec=lambda v: lu.solve(v, trans="T"),
                                    dtype=A.dtype))
            rcond = 1.0 / (spla.onenormest(A) * inv_norm)
            meta["rcond"] = float(rcond)
            if rcond < 1e-12:
                meta["conditioning_warning"] = True
        except Exception:  # pragma: no cover - estimator is best-effort
            pass
    values = np.zeros(system.mesh.n_nodes, dtype=np.complex128)
    values[free] = x
    return ComplexField(values=values, mesh=system.mesh, k=system.k, metadata=meta)


def field_norms(field: ComplexField, region=None) -> Dict[str, float]:
    """L2 and H1 norms, optionally restricted by a centroid predicate."""
    mesh = field.mesh
    tri_pts = mesh.vertices[mesh.triangles]
    if region is not None:
        cent = tri_pts.mean(axis=1)
        keep = np.array([bool(region(c[0], c[1])) for c in cent])
        if not keep.any():
            return {"l2": 0.0, "h1": 0.0}
        tri_pts = tri_pts[keep]
        tn = mesh.tri_nodes()[keep]
    else:
        tn = mesh.tri_nodes()
    Ke, Me = assembly.element_matrices(tri_pts)
    u = field.values[tn]
    l2sq = np.einsum("ni,nij,nj->", np.conj(u), Me, u).real
    semi = np.einsum("ni,nij,nj->", np.conj(u), Ke, u).real
    return {"l2": float(np.sqrt(max(l2sq, 0.0))),
            "h1": float(np.sqrt(max(l2sq + semi, 0.0)))}


def eval_on_grid(field: ComplexField, xs, ys) -> np.ndarray:
    """Sample the quadratic interpolant on a tensor grid; NaN outside."""
    mesh = field.mesh
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    xl, yl = mesh.x_lines, mesh.y_lines
    out = np.full((len(xs), len(ys)), np.nan + 0j, dtype=np.complex128)
    tn = mesh.tri_nodes()
    vals = field.values
    eps = 1e-12
    for a, x in enumerate(xs):
        if x < xl[0] - eps or x > xl[-1] + eps:
            continue
        i = min(max(int(np.searchsorted(xl, x + eps) - 1), 0), len(xl) - 2)
        for bidx, y in enumerate(ys):
            if y < yl[0] - eps:
                continue
            j = min(max(int(np.searchsorted(yl, y + eps) - 1), 0), len(yl) - 2)
            ii, jj = i, j
            t0 = mesh.cell_tri[ii, jj]
            if t0 < 0:
                # a point exactly on the edge of an empty cell belongs to the
                # filled neighbor below / to the left
                if jj > 0 and abs(y - yl[jj]) < 1e-9:
                    jj -= 1
                    t0 = mesh.cell_tri[ii, jj]
                if t0 < 0 and ii > 0 and abs(x - xl[ii]) < 1e-9:
                    jj = j
                    ii -= 1
                    t0 = mesh.cell_tri[ii, jj]
                    if t0 < 0 and jj > 0 and abs(y - yl[jj]) < 1e-9:
                        jj -= 1
                        t0 = mesh.cell_tri[ii, jj]
                if t0 < 0:
                    continue
            fx = (x - xl[ii]) / (xl[ii + 1] - xl[ii])
            fy = (y - yl[jj]) / (yl[jj + 1] - yl[jj])
            if fy > 1.0 + eps:
                continue
            tri = t0 if fy <= fx + eps else t0 + 1
            p = mesh.vertices[mesh.triangles[tri]]
            T = np.array([p[1] - p[0], p[2] - p[0]]).T
            xi, eta = np.linalg.solve(T, np.array([x, y]) - p[0])
            out[a, bidx] = shape(xi, eta) @ vals[tn[tri]]
    return out
