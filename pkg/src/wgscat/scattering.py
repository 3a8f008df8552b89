"""Extraction of every scattering object: (R, T), half-guide coefficients,
the augmented 2x2 matrix, the two limit matrices, trapped-mode candidates and
unfolded fields.

Coefficients are extracted at the ports but expressed in the global
(x=0 / y=0 anchored) mode conventions, so no phase unwinding is needed:
amplitude = (projection - incident factor) / outgoing factor at the port.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field as dfield
from typing import Dict, Optional, Tuple

import numpy as np

from . import solver
from .geometry import (
    HalfGuideProblem,
    LimitGeometry,
    Margins,
    SymmetryBC,
    WaveguideGeometry,
    default_margins,
    half_guide,
    limit_geometry,
    truncate,
    truncate_limit,
)
from .mesh import Mesh, SYMMETRY, generate
from .modal import (
    DEFAULT_DTN_TERMS,
    PortBasis,
    PortQuadrature,
    beta_strip,
    branch_modes,
    branch_modes_mixed,
    project_trace,
    strip_modes,
)
from .solver import ComplexField

DEFAULT_H_FACTOR = 20  # h = ell / 20


class ExceptionalCaseWarning(UserWarning):
    pass


@dataclass
class SolveOptions:
    h: Optional[float] = None
    dtn_terms: int = DEFAULT_DTN_TERMS
    margins: Optional[Margins] = None

    def resolve_h(self, geom: WaveguideGeometry) -> float:
        return self.h if self.h is not None else geom.ell / DEFAULT_H_FACTOR


@dataclass
class ScatteringPair:
    R: complex
    T: complex
    k: float
    L: float
    provenance: str  # 'direct_full_guide' | 'combined_half_guides'

    @property
    def energy_residual(self) -> float:
        return abs(abs(self.R) ** 2 + abs(self.T) ** 2 - 1.0)

    def to_record(self) -> dict:
        return {
            "k": self.k,
            "L": self.L,
            "R": [self.R.real, self.R.imag],
            "T": [self.T.real, self.T.imag],
            "energy_residual": self.energy_residual,
            "provenance": self.provenance,
        }


@dataclass
class HalfCoefficients:
    r: complex
    Rh: complex

    @property
    def r_modulus_residual(self) -> float:
        return abs(abs(self.r) - 1.0)

    @property
    def Rh_modulus_residual(self) -> float:
        return abs(abs(self.Rh) - 1.0)


def _matrix_residuals(S: np.ndarray) -> Tuple[float, float]:
    uni = float(np.max(np.abs(S @ np.conj(S.T) - np.eye(len(S)))))
    sym = float(np.max(np.abs(S - S.T)))
    return uni, sym


@dataclass
class AugmentedMatrix:
    S: np.ndarray  # 2x2: [[s11, s12], [s21, s22]]
    k: float
    L: float

    @property
    def s11(self):
        return self.S[0, 0]

    @property
    def s12(self):
        return self.S[0, 1]

    @property
    def s21(self):
        return self.S[1, 0]

    @property
    def s22(self):
        return self.S[1, 1]

    @property
    def unitarity_residual(self) -> float:
        return _matrix_residuals(self.S)[0]

    @property
    def symmetry_residual(self) -> float:
        return _matrix_residuals(self.S)[1]


@dataclass
class LimitMatrix:
    S: np.ndarray  # 2x2 (mixed) or 4x4 (Neumann)
    k: float

    @property
    def unitarity_residual(self) -> float:
        return _matrix_residuals(self.S)[0]

    @property
    def symmetry_residual(self) -> float:
        return _matrix_residuals(self.S)[1]


def _mesh_and_bases(domain, k, options: SolveOptions, h: float,
                    packet: bool = False, top_family: Optional[str] = None):
    mesh = generate(domain, h)
    bases: Dict[str, PortBasis] = {}
    for port in domain.ports:
        if port.orientation in ("left", "right"):
            bases[port.id] = strip_modes(k, port, options.dtn_terms,
                                         packet=packet and port.id == "left")
        elif top_family == "mixed":
            bases[port.id] = branch_modes_mixed(k, port, options.dtn_terms)
        else:
            bases[port.id] = branch_modes(k, port, options.dtn_terms)
    return mesh, bases


def _extract(field: ComplexField, system, pid: str, n: int,
             incident: Optional[Tuple[str, int]]) -> complex:
    basis = system.bases[pid]
    quad = system.quads[pid]
    mode = basis.modes[n]
    pos = basis.port.position
    p = project_trace(field.values, basis, n, quad)
    if incident is not None and incident == (pid, n):
        p = p - mode.in_value(pos)
    return complex(p / mode.out_value(pos))


def solve_full(geom: WaveguideGeometry,
               options: Optional[SolveOptions] = None,
               return_field: bool = False):
    """Direct (R, T) of the full guide for the incident piston from the left."""
    options = options or SolveOptions()
    domain = truncate(geom, options.margins)
    h = options.resolve_h(geom)
    mesh, bases = _mesh_and_bases(domain, geom.k, options, h)
    system = solver.assemble(mesh, geom.k, bases, incident=("left", 0))
    field = solver.factor_solve(system)
    R = _extract(field, system, "left", 0, ("left", 0))
    T = _extract(field, system, "right", 0, ("left", 0))
    pair = ScatteringPair(R=R, T=T, k=geom.k, L=geom.L,
                          provenance="direct_full_guide")
    if return_field:
        return pair, field
    return pair


def solve_half(geom: WaveguideGeometry, bc: SymmetryBC,
               options: Optional[SolveOptions] = None,
               return_field: bool = False):
    """Half-guide reflection coefficient (r for Neumann, R for Dirichlet)."""
    options = options or SolveOptions()
    problem = half_guide(geom, bc)
    domain = truncate(problem, options.margins)
    h = options.resolve_h(geom)
    mesh, bases = _mesh_and_bases(domain, geom.k, options, h)
    dirichlet = SYMMETRY if bc is SymmetryBC.DIRICHLET else None
    system = solver.assemble(mesh, geom.k, bases, incident=("left", 0),
                             dirichlet_tag=dirichlet)
    field = solver.factor_solve(system)
    coeff = _extract(field, system, "left", 0, ("left", 0))
    if return_field:
        return coeff, field
    return coeff


def half_coefficients(geom: WaveguideGeometry,
                      options: Optional[SolveOptions] = None) -> HalfCoefficients:
    r = solve_half(geom, SymmetryBC.NEUMANN, options)
    Rh = solve_half(geom, SymmetryBC.DIRICHLET, options)
    return HalfCoefficients(r=r, Rh=Rh)


def combine(r: complex, Rh: complex, k: float = float("nan"),
            L: float = float("nan")) -> ScatteringPair:
    """Full-guide pair from the symmetric/antisymmetric half coefficients."""
    return ScatteringPair(R=(r + Rh) / 2.0, T=(r - Rh) / 2.0, k=k, L=L,
                          provenance="combined_half_guides")


def augmented(geom: WaveguideGeometry,
              options: Optional[SolveOptions] = None,
              return_fields: bool = False):
    """Augmented 2x2 matrix of the Neumann half-guide (piston + wave packet)."""
    options = options or SolveOptions()
    problem = half_guide(geom, SymmetryBC.NEUMANN)
    domain = truncate(problem, options.margins)
    h = options.resolve_h(geom)
    mesh, bases = _mesh_and_bases(domain, geom.k, options, h, packet=True)
    S = np.zeros((2, 2), dtype=np.complex128)
    fields = []
    for i, inc in enumerate([("left", 0), ("left", 1)]):
        system = solver.assemble(mesh, geom.k, bases, incident=inc)
        field = solver.factor_solve(system)
        fields.append(field)
        S[i, 0] = _extract(field, system, "left", 0, inc)
        S[i, 1] = _extract(field, system, "left", 1, inc)
    mat = AugmentedMatrix(S=S, k=geom.k, L=geom.L)
    if mat.unitarity_residual > 1e-2:
        warnings.warn(
            f"augmented matrix unitarity residual {mat.unitarity_residual:.2e} "
            "is large; refine the mesh or enlarge the margins",
            ExceptionalCaseWarning,
        )
    if return_fields:
        return mat, fields
    return mat


def limit_mixed(k: float, options: Optional[SolveOptions] = None) -> LimitMatrix:
    """2x2 scattering matrix of the limit guide with Dirichlet symmetry line."""
    options = options or SolveOptions()
    geom = _limit_base_geometry(k)
    lim = limit_geometry(geom)
    domain = truncate_limit(lim, SymmetryBC.DIRICHLET, options.margins)
    h = options.resolve_h(geom)
    mesh, bases = _mesh_and_bases(domain, k, options, h, top_family="mixed")
    S = np.zeros((2, 2), dtype=np.complex128)
    for i, inc in enumerate([("left", 0), ("top", 0)]):
        system = solver.assemble(mesh, k, bases, incident=inc,
                                 dirichlet_tag=SYMMETRY)
        field = solver.factor_solve(system)
        S[i, 0] = _extract(field, system, "left", 0, inc)
        S[i, 1] = _extract(field, system, "top", 0, inc)
    return LimitMatrix(S=S, k=k)


def limit_neumann(k: float, options: Optional[SolveOptions] = None) -> LimitMatrix:
    """4x4 augmented matrix of the Neumann limit guide.

    Channels: strip piston, strip wave packet, branch piston, branch threshold.
    """
    options = options or SolveOptions()
    geom = _limit_base_geometry(k)
    lim = limit_geometry(geom)
    domain = truncate_limit(lim, SymmetryBC.NEUMANN, options.margins)
    h = options.resolve_h(geom)
    mesh, bases = _mesh_and_bases(domain, k, options, h, packet=True)
    channels = [("left", 0), ("left", 1), ("top", 0), ("top", 1)]
    S = np.zeros((4, 4), dtype=np.complex128)
    for i, inc in enumerate(channels):
        system = solver.assemble(mesh, k, bases, incident=inc)
        field = solver.factor_solve(system)
        for j, (pid, n) in enumerate(channels):
            S[i, j] = _extract(field, system, pid, n, inc)
    mat = LimitMatrix(S=S, k=k)
    if abs(abs(S[3, 3]) + 1.0) < 1e-3 or abs(S[3, 3] + 1.0) < 1e-3:
        warnings.warn("s44 is close to -1: exceptional decoupled case",
                      ExceptionalCaseWarning)
    if abs(S[0, 3]) < 1e-3:
        warnings.warn("s14 is close to 0: the asymptotic construction degenerates",
                      ExceptionalCaseWarning)
    return mat


def _limit_base_geometry(k: float) -> WaveguideGeometry:
    # any branch height works: the limit domain replaces it by the top margin
    from .geometry import build_omega

    return build_omega(k, 2.0)


@dataclass
class TrappedCandidate:
    field: ComplexField
    outgoing_piston_amplitude: complex
    tail_decay_rate: float
    expected_rate: float
    s22: complex


def trapped_candidate(geom: WaveguideGeometry,
                      options: Optional[SolveOptions] = None) -> TrappedCandidate:
    """Solve the wave-packet-incident problem and check trapped-mode structure.

    Meaningful when |s22 + 1| is small: then the outgoing piston amplitude
    (= s21) vanishes and the field decays like e^{beta x} toward the port.
    The decay fit needs a longer duct than the default truncation, so the
    left margin is widened to 4*ell unless margins are given explicitly.
    """
    options = options or SolveOptions()
    if options.margins is None:
        base = default_margins(geom)
        options = SolveOptions(h=options.h, dtn_terms=options.dtn_terms,
                               margins=Margins(left=4.0 * geom.ell, top=base.top))
    problem = half_guide(geom, SymmetryBC.NEUMANN)
    domain = truncate(problem, options.margins)
    h = options.resolve_h(geom)
    mesh, bases = _mesh_and_bases(domain, geom.k, options, h, packet=True)
    inc = ("left", 1)
    system = solver.assemble(mesh, geom.k, bases, incident=inc)
    field = solver.factor_solve(system)
    s21 = _extract(field, system, "left", 0, inc)
    s22 = _extract(field, system, "left", 1, inc)
    rate = _fit_tail_decay(field, domain, geom, s22)
    return TrappedCandidate(field=field, outgoing_piston_amplitude=s21,
                            tail_decay_rate=rate,
                            expected_rate=beta_strip(geom.k), s22=s22)


def _fit_tail_decay(field: ComplexField, domain, geom: WaveguideGeometry,
                    s22: complex, exclusion: Optional[float] = None) -> float:
    """Decay rate of the trapped part of the field along the duct.

    Projects each cross-section onto cos(pi y) (which removes the piston
    channel), subtracts the analytically known residual (1 + s22) W2+
    component -- near but not exactly at a trapped point it grows toward the
    port and would otherwise dominate the tail -- and returns the
    least-squares slope of the log amplitude.
    """
    ell = geom.ell
    beta = beta_strip(geom.k)
    amp = 1.0 / math.sqrt(2.0 * beta)
    x_port = domain.ports[0].position
    # fit window between port and the first breakpoint, shaved at both ends
    excl = ell if exclusion is None else exclusion
    x_lo, x_hi = x_port + excl, -ell - excl
    if x_hi - x_lo < 0.5 * ell:
        raise ValueError("tail region too short for a decay fit; widen margins")
    xs = np.linspace(x_lo, x_hi, 25)
    ys = np.linspace(0.0, 1.0, 81)
    vals = solver.eval_on_grid(field, xs, ys)
    # amplitude of the cos(pi y) channel at each station (norm 1/2)
    a = 2.0 * np.trapezoid(vals * np.cos(math.pi * ys)[np.newaxis, :], ys, axis=1)
    out = amp * (np.exp(-beta * xs) - 1j * np.exp(beta * xs))  # W2+ factor
    cleaned = np.abs(a - (1.0 + s22) * out)
    good = np.isfinite(cleaned) & (cleaned > 0)
    coeffs = np.polyfit(xs[good], np.log(cleaned[good]), 1)
    return float(coeffs[0])


def unfold(field: ComplexField, parity: str,
           options: Optional[SolveOptions] = None) -> ComplexField:
    """Mirror a half-guide field onto the full guide.

    parity 'even': v(x, y) = u(-|x|, y); 'odd': v = sign(x)-odd extension,
    which requires a vanishing trace on the symmetry line.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    mesh = field.mesh
    domain = mesh.domain
    if domain.symmetry_x != 0.0:
        raise ValueError("unfold needs a half-guide field (symmetry line at x=0)")
    coords = mesh.node_coords()
    on_sigma = np.abs(coords[:, 0]) < 1e-12
    sigma_sup = float(np.max(np.abs(field.values[on_sigma])))
    if parity == "odd":
        sup = float(np.max(np.abs(field.values)))
        if sigma_sup > 1e-8 * max(sup, 1.0):
            raise ValueError(
                f"odd unfolding needs zero trace on the symmetry line "
                f"(sup {sigma_sup:.2e})"
            )

    half_cols = domain.columns
    mirrored = tuple((-x1, -x0, h) for x0, x1, h in reversed(half_cols))
    from .geometry import PortSpec, TruncatedDomain

    X = -half_cols[0][0]
    full_domain = TruncatedDomain(
        columns=half_cols + mirrored,
        ports=(PortSpec("left", "left", -X, (0.0, 1.0)),
               PortSpec("right", "right", X, (0.0, 1.0))),
    )
    full_mesh = generate(full_domain, mesh.h)
    lookup = {}
    for i, (x, y) in enumerate(coords):
        lookup[(round(x, 9), round(y, 9))] = field.values[i]
    out = np.zeros(full_mesh.n_nodes, dtype=np.complex128)
    sign = 1.0 if parity == "even" else -1.0
    for i, (x, y) in enumerate(full_mesh.node_coords()):
        key = (round(-abs(x), 9), round(y, 9))
        v = lookup[key]
        out[i] = v if x <= 0 else sign * v
    return ComplexField(values=out, mesh=full_mesh, k=field.k,
                        metadata=dict(field.metadata, unfolded=parity))


def remark_checks(field: ComplexField, pair: ScatteringPair,
                  tol: float = 1e-2) -> Dict[str, Optional[float]]:
    """Residuals of the invisibility / perfect-reflection field identities.

    At T = 1 the scattered part has Re(v - incident) = 0; at R = 1 the total
    field satisfies Im(v) = 0.  Residuals are sup-norms relative to sup|v|.
    """
    coords = field.mesh.node_coords()
    v = field.values
    sup = float(np.max(np.abs(v)))
    out: Dict[str, Optional[float]] = {"re_residual": None, "im_residual": None}
    if abs(pair.T - 1.0) < tol:
        inc = np.exp(1j * field.k * coords[:, 0]) / math.sqrt(2.0 * field.k)
        out["re_residual"] = float(np.max(np.abs(np.real(v - inc)))) / sup
    if abs(pair.R - 1.0) < tol:
        out["im_residual"] = float(np.max(np.abs(np.imag(v)))) / sup
    return out


def pair_to_json(pair: ScatteringPair, geom: WaveguideGeometry) -> str:
    rec = pair.to_record()
    rec["geometry"] = json.loads(geom.to_json())
    return json.dumps(rec)
