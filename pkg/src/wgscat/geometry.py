"""Parametric symmetric staircase waveguides and truncated computational domains.

A geometry is a wavenumber k in (0, pi) together with an even, piecewise
constant height profile g(x) whose breakpoints sit at integer multiples of
ell = pi/k.  The basic single-branch guide has profile L on (-ell, ell) and 1
beyond; staircase variants carry a nonincreasing tail of heights.  The key
structural constraint (vertical walls only at multiples of ell) makes
sqrt(2/k)*cos(k x) an exact Neumann solution in every guide built here, which
is what pins the symmetric half-guide reflection coefficient to 1.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence


class GeometryError(ValueError):
    pass


class SymmetryBC(enum.Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class WaveguideGeometry:
    """Even staircase guide: height heights[j] on [j*ell, (j+1)*ell), 1 beyond."""

    k: float
    heights: tuple  # ((step_index, height), ...), last height == 1

    def __post_init__(self):
        if not 0.0 < self.k < math.pi:
            raise GeometryError(f"k={self.k} outside the single-mode band (0, pi)")
        if not self.heights:
            raise GeometryError("empty height list")
        idx = [j for j, _ in self.heights]
        if idx != list(range(len(self.heights))):
            raise GeometryError(f"step indices must be 0,1,...: got {idx}")
        hs = [h for _, h in self.heights]
        if any(h < 1.0 for h in hs):
            raise GeometryError(f"heights must be >= 1: got {hs}")
        if hs[-1] != 1.0:
            raise GeometryError("height profile must end at 1")

    @property
    def ell(self) -> float:
        # Stored implicitly: breakpoints are always derived from pi/k so the
        # cos-compatibility of vertical walls cannot drift.
        return math.pi / self.k

    @property
    def L(self) -> float:
        return self.heights[0][1]

    @property
    def tail_heights(self) -> tuple:
        return tuple(h for _, h in self.heights[1:])

    @property
    def breakpoints(self) -> tuple:
        """Positive x where the profile may jump (multiples of ell)."""
        return tuple((j + 1) * self.ell for j, _ in self.heights[:-1])

    @property
    def last_step(self) -> float:
        """x beyond which the guide is the uniform height-1 strip."""
        return len(self.heights[:-1]) * self.ell if len(self.heights) > 1 else 0.0

    def height(self, x: float) -> float:
        j = int(math.floor(abs(x) / self.ell))
        if j >= len(self.heights):
            return 1.0
        return self.heights[j][1]

    def to_json(self) -> str:
        return json.dumps(
            {"k": self.k, "L": self.L, "tail_heights": list(self.tail_heights)}
        )

    @staticmethod
    def from_json(text: str) -> "WaveguideGeometry":
        d = json.loads(text)
        tail = list(d["tail_heights"])
        heights = [(0, d["L"])] + [(j + 1, h) for j, h in enumerate(tail)]
        return WaveguideGeometry(k=d["k"], heights=tuple(heights))

    def check_cos_compatibility(self, tol: float = 1e-12) -> None:
        """Every vertical wall must sit where sin(kx) vanishes."""
        for x in self.breakpoints:
            s = abs(math.sin(self.k * x))
            if s > tol * max(1.0, self.k * x):
                raise GeometryError(f"vertical wall at x={x} has sin(kx)={s}")


@dataclass(frozen=True)
class HalfGuideProblem:
    """Restriction of a symmetric guide to x < 0 with a condition on Sigma."""

    geometry: WaveguideGeometry
    symmetry_bc: SymmetryBC

    @property
    def sigma_height(self) -> float:
        return self.geometry.heights[0][1]


@dataclass(frozen=True)
class LimitGeometry:
    """Half-guide with the branch extended to infinity (channel + vertical arm)."""

    geometry: WaveguideGeometry

    @property
    def k(self) -> float:
        return self.geometry.k

    @property
    def ell(self) -> float:
        return self.geometry.ell


@dataclass(frozen=True)
class PortSpec:
    """A straight truncation segment carrying a modal radiation condition."""

    id: str
    orientation: str  # 'left' (outward -x), 'right' (+x), 'top' (+y)
    position: float  # x for left/right, y for top
    span: tuple  # cross-section interval (lo, hi)


@dataclass(frozen=True)
class TruncatedDomain:
    """Union of axis-aligned columns (x0, x1, height above y=0), with ports."""

    columns: tuple  # ((x0, x1, height), ...)
    ports: tuple  # (PortSpec, ...)
    symmetry_bc: Optional[SymmetryBC] = None
    symmetry_x: Optional[float] = None  # x of the symmetry segment if present

    @property
    def area(self) -> float:
        return sum((x1 - x0) * h for x0, x1, h in self.columns)

    def height_at(self, x: float) -> float:
        for x0, x1, h in self.columns:
            if x0 <= x <= x1:
                return h
        raise GeometryError(f"x={x} outside domain")

    def polygon(self):
        """Closed counterclockwise vertex loop of the domain boundary."""
        cols = self.columns
        pts = [(cols[0][0], 0.0), (cols[-1][1], 0.0)]
        # up the right side, then walk the roof right-to-left
        pts.append((cols[-1][1], cols[-1][2]))
        for i in range(len(cols) - 1, 0, -1):
            x0, _, h = cols[i]
            pts.append((x0, h))
            if cols[i - 1][2] != h:
                pts.append((x0, cols[i - 1][2]))
        pts.append((cols[0][0], cols[0][2]))
        return pts


def build_omega(k: float, L: float) -> WaveguideGeometry:
    """Single vertical branch of height L and width 2*ell over a height-1 strip."""
    if not 0.0 < k < math.pi:
        raise GeometryError(f"k={k} must lie in (0, pi)")
    if L <= 1.0:
        raise GeometryError(f"branch height L={L} must exceed the strip height 1")
    return WaveguideGeometry(k=k, heights=((0, L), (1, 1.0)))


def build_staircase(
    k: float,
    L: float,
    tail_heights: Sequence[float],
    allow_nonmonotone: bool = False,
) -> WaveguideGeometry:
    """Branch of height L followed by the given tail, one ell-wide step each."""
    if not 0.0 < k < math.pi:
        raise GeometryError(f"k={k} must lie in (0, pi)")
    if L <= 1.0:
        raise GeometryError(f"branch height L={L} must exceed 1")
    tail = [float(h) for h in tail_heights]
    if not tail or tail[-1] != 1.0:
        raise GeometryError("tail heights must end at 1")
    if any(h < 1.0 for h in tail):
        raise GeometryError(f"tail heights must be >= 1: {tail}")
    if not allow_nonmonotone:
        if any(b > a for a, b in zip(tail, tail[1:])):
            raise GeometryError(
                f"tail heights must be nonincreasing: {tail} "
                "(pass allow_nonmonotone=True to override; only evenness and "
                "breakpoints at multiples of ell are structurally required)"
            )
    heights = [(0, float(L))] + [(j + 1, h) for j, h in enumerate(tail)]
    return WaveguideGeometry(k=k, heights=tuple(heights))


def half_guide(geom: WaveguideGeometry, bc: SymmetryBC) -> HalfGuideProblem:
    return HalfGuideProblem(geometry=geom, symmetry_bc=bc)


def limit_geometry(geom: WaveguideGeometry) -> LimitGeometry:
    return LimitGeometry(geometry=geom)


@dataclass(frozen=True)
class Margins:
    left: float  # distance from the last step to the left port
    top: float = 0.0  # distance from y=1 to the top port (limit guide only)


def default_margins(geom: WaveguideGeometry) -> Margins:
    # Ports land at last_step + ell, i.e. 2*ell from the origin for the basic
    # guide; the limit-guide top port sits at y = 1 + 2*ell.
    return Margins(left=geom.ell, top=2.0 * geom.ell)


def _columns_half(geom: WaveguideGeometry, x_left: float):
    cols = []
    xs = [-b for b in reversed(geom.breakpoints)]
    edges = [x_left] + [x for x in xs if x > x_left] + [0.0]
    for x0, x1 in zip(edges, edges[1:]):
        xm = 0.5 * (x0 + x1)
        cols.append((x0, x1, geom.height(xm)))
    return tuple(cols)


def truncate(problem, margins: Optional[Margins] = None) -> TruncatedDomain:
    """Bounded computational domain with tagged ports.

    Accepts a full WaveguideGeometry (two horizontal ports), a
    HalfGuideProblem (left port + symmetry segment at x=0) or a LimitGeometry
    (left + top ports, symmetry segment at x=0).
    """
    if isinstance(problem, WaveguideGeometry):
        geom = problem
        margins = margins or default_margins(geom)
        if margins.left <= 0:
            raise GeometryError("left margin must clear the last step")
        X = geom.last_step + margins.left
        half = _columns_half(geom, -X)
        mirrored = tuple((-x1, -x0, h) for x0, x1, h in reversed(half))
        cols = half + mirrored
        ports = (
            PortSpec("left", "left", -X, (0.0, 1.0)),
            PortSpec("right", "right", X, (0.0, 1.0)),
        )
        return TruncatedDomain(columns=cols, ports=ports)

    if isinstance(problem, HalfGuideProblem):
        geom = problem.geometry
        margins = margins or default_margins(geom)
        if margins.left <= 0:
            raise GeometryError("left margin must clear the last step")
        X = geom.last_step + margins.left
        cols = _columns_half(geom, -X)
        ports = (PortSpec("left", "left", -X, (0.0, 1.0)),)
        return TruncatedDomain(
            columns=cols,
            ports=ports,
            symmetry_bc=problem.symmetry_bc,
            symmetry_x=0.0,
        )

    if isinstance(problem, LimitGeometry):
        geom = problem.geometry
        margins = margins or default_margins(geom)
        if margins.left <= 0 or margins.top <= 0:
            raise GeometryError("limit-guide margins must be positive")
        ell = geom.ell
        X = geom.last_step + margins.left if geom.last_step > ell else ell + margins.left
        Y = 1.0 + margins.top
        # vertical arm column plus the strip continuation toward the port
        tail = _columns_half(geom, -X)
        cols = []
        for x0, x1, h in tail:
            if x1 <= -ell:
                cols.append((x0, x1, h))
            else:
                cols.append((x0, x1, Y))
        ports = (
            PortSpec("left", "left", -X, (0.0, 1.0)),
            PortSpec("top", "top", Y, (-ell, 0.0)),
        )
        return TruncatedDomain(
            columns=tuple(cols),
            ports=ports,
            symmetry_bc=SymmetryBC.NEUMANN,  # overridden per limit problem
            symmetry_x=0.0,
        )

    raise TypeError(f"cannot truncate object of type {type(problem)!r}")


def truncate_limit(
    problem: LimitGeometry, bc: SymmetryBC, margins: Optional[Margins] = None
) -> TruncatedDomain:
    dom = truncate(problem, margins)
    return TruncatedDomain(
        columns=dom.columns,
        ports=dom.ports,
        symmetry_bc=bc,
        symmetry_x=dom.symmetry_x,
    )
