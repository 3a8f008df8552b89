"""Structured conforming triangulations with 6-node quadratic elements.

Domains are unions of axis-aligned columns, so meshing reduces to choosing
global x/y grid lines (snapped to every geometry line), keeping the grid
points under the local roof height, and splitting each rectangle into two
triangles along the SW-NE diagonal.  Nodes are vertices plus one midpoint per
unique edge; ordering is lexicographic by (y, x) so assembly is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .geometry import PortSpec, TruncatedDomain

WALL = "wall"
SYMMETRY = "symmetry"


def port_tag(port_id: str) -> str:
    return f"port:{port_id}"


class MeshError(ValueError):
    pass


@dataclass
class Mesh:
    vertices: np.ndarray  # (nv, 2)
    triangles: np.ndarray  # (nt, 3) vertex indices, counterclockwise
    edges: np.ndarray  # (ne, 2) sorted vertex pairs
    tri_edges: np.ndarray  # (nt, 3), edge i opposite local vertex i
    boundary_tags: Dict[int, str]  # edge index -> tag
    h: float
    domain: TruncatedDomain
    x_lines: np.ndarray
    y_lines: np.ndarray
    cell_tri: np.ndarray  # (nx-1, ny-1) index of the lower triangle, -1 outside

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_nodes(self) -> int:
        return len(self.vertices) + len(self.edges)

    def node_coords(self) -> np.ndarray:
        mid = 0.5 * (self.vertices[self.edges[:, 0]] + self.vertices[self.edges[:, 1]])
        return np.vstack([self.vertices, mid])

    def tri_nodes(self) -> np.ndarray:
        """(nt, 6) global node ids: 3 vertices then 3 opposite-edge midpoints."""
        return np.hstack([self.triangles, self.n_vertices + self.tri_edges])

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )

    def boundary_edges_with_tag(self, tag: str) -> List[int]:
        return [e for e, t in self.boundary_tags.items() if t == tag]

    def nodes_on_tag(self, tag: str) -> np.ndarray:
        ids = set()
        for e in self.boundary_edges_with_tag(tag):
            a, b = self.edges[e]
            ids.update((int(a), int(b), self.n_vertices + e))
        return np.array(sorted(ids), dtype=np.int64)

    def dump(self, path) -> None:
        """Plain text: one 'v i x y' line per node, one 't i a b c d e f' per element."""
        coords = self.node_coords()
        with open(path, "w") as f:
            for i, (x, y) in enumerate(coords):
                f.write(f"v {i} {x:.12g} {y:.12g}\n")
            for i, nodes in enumerate(self.tri_nodes()):
                f.write("t " + str(i) + " " + " ".join(str(n) for n in nodes) + "\n")


def _fill_lines(breaks: List[float], h: float) -> np.ndarray:
    breaks = sorted(set(float(b) for b in breaks))
    out = []
    for a, b in zip(breaks, breaks[1:]):
        n = max(1, int(math.ceil((b - a) / h - 1e-12)))
        out.extend(a + (b - a) * i / n for i in range(n))
    out.append(breaks[-1])
    return np.array(out)


def generate(domain: TruncatedDomain, h: float) -> Mesh:
    if h <= 0:
        raise MeshError("element size h must be positive")
    for x0, x1, ht in domain.columns:
        if x1 <= x0 or ht <= 0:
            raise MeshError(f"degenerate column {(x0, x1, ht)}")
    xb = [c[0] for c in domain.columns] + [domain.columns[-1][1]]
    yb = {0.0}
    for _, _, ht in domain.columns:
        yb.add(ht)
    yb.update(h2 for h2 in (1.0,) if h2 < max(c[2] for c in domain.columns))
    x_lines = _fill_lines(xb, h)
    y_lines = _fill_lines(sorted(yb), h)
    return _mesh_from_lines(domain, x_lines, y_lines, h)


def refine(mesh: Mesh) -> Mesh:
    """Uniform red refinement; for these structured grids it equals halving h."""
    x = mesh.x_lines
    y = mesh.y_lines
    xr = np.sort(np.concatenate([x, 0.5 * (x[:-1] + x[1:])]))
    yr = np.sort(np.concatenate([y, 0.5 * (y[:-1] + y[1:])]))
    return _mesh_from_lines(mesh.domain, xr, yr, mesh.h / 2.0)


def _mesh_from_lines(
    domain: TruncatedDomain, x_lines: np.ndarray, y_lines: np.ndarray, h: float
) -> Mesh:
    nx, ny = len(x_lines), len(y_lines)
    tol = 1e-10

    # roof height per x-interval
    col_h = np.empty(nx - 1)
    for i in range(nx - 1):
        xm = 0.5 * (x_lines[i] + x_lines[i + 1])
        col_h[i] = domain.height_at(xm)

    # vertex exists where some adjacent column reaches it
    vert_h = np.empty(nx)
    for i in range(nx):
        hs = []
        if i > 0:
            hs.append(col_h[i - 1])
        if i < nx - 1:
            hs.append(col_h[i])
        vert_h[i] = max(hs)

    index = -np.ones((nx, ny), dtype=np.int64)
    pts = []
    order = []
    for j in range(ny):
        for i in range(nx):
            if y_lines[j] <= vert_h[i] + tol:
                index[i, j] = len(pts)
                pts.append((x_lines[i], y_lines[j]))
                order.append((j, i))
    vertices = np.array(pts)

    tris = []
    cell_tri = -np.ones((nx - 1, ny - 1), dtype=np.int64)
    for i in range(nx - 1):
        for j in range(ny - 1):
            if y_lines[j + 1] > col_h[i] + tol:
                break
            a = index[i, j]
            b = index[i + 1, j]
            c = index[i + 1, j + 1]
            d = index[i, j + 1]
            cell_tri[i, j] = len(tris)
            tris.append((a, b, c))
            tris.append((a, c, d))
    triangles = np.array(tris, dtype=np.int64)
    if len(triangles) == 0:
        raise MeshError("empty mesh: h too large or degenerate domain")

    # unique edges, sorted by (y_mid, x_mid) for deterministic node numbering
    e0 = np.sort(triangles[:, [1, 2]], axis=1)
    e1 = np.sort(triangles[:, [0, 2]], axis=1)
    e2 = np.sort(triangles[:, [0, 1]], axis=1)
    all_edges = np.vstack([e0, e1, e2])
    uniq, inv = np.unique(all_edges, axis=0, return_inverse=True)
    mids = 0.5 * (vertices[uniq[:, 0]] + vertices[uniq[:, 1]])
    perm = np.lexsort((mids[:, 0], mids[:, 1]))
    rank = np.empty_like(perm)
    rank[perm] = np.arange(len(perm))
    edges = uniq[perm]
    inv = rank[inv]
    nt = len(triangles)
    tri_edges = np.column_stack([inv[:nt], inv[nt : 2 * nt], inv[2 * nt :]])

    # boundary edges: referenced by exactly one triangle
    counts = np.zeros(len(edges), dtype=np.int64)
    np.add.at(counts, tri_edges.ravel(), 1)
    boundary = np.nonzero(counts == 1)[0]

    tags: Dict[int, str] = {}
    for e in boundary:
        a, b = edges[e]
        pa, pb = vertices[a], vertices[b]
        tags[int(e)] = _classify_boundary_edge(domain, pa, pb, tol)

    return Mesh(
        vertices=vertices,
        triangles=triangles,
        edges=edges,
        tri_edges=tri_edges,
        boundary_tags=tags,
        h=h,
        domain=domain,
        x_lines=x_lines,
        y_lines=y_lines,
        cell_tri=cell_tri,
    )


def _classify_boundary_edge(domain, pa, pb, tol) -> str:
    xm, ym = 0.5 * (pa + pb)
    for p in domain.ports:
        if p.orientation in ("left", "right"):
            if abs(xm - p.position) < tol and p.span[0] - tol < ym < p.span[1] + tol:
                return port_tag(p.id)
        else:
            if abs(ym - p.position) < tol and p.span[0] - tol < xm < p.span[1] + tol:
                return port_tag(p.id)
    if domain.symmetry_x is not None and abs(xm - domain.symmetry_x) < tol:
        return SYMMETRY
    return WALL
