"""Transverse mode bases on port cross-sections.

Each port carries a family of transverse profiles (cosines on the horizontal
strip, cosines or odd sines on the vertical branch) together with global
longitudinal factors anchored at x=0 / y=0.  The per-mode Robin coefficient is
the outward-normal logarithmic derivative of the outgoing longitudinal factor
at the port line; imposing it mode by mode turns the truncation boundary into
a transparent (DtN) condition.  Besides the usual propagating/evanescent
kinds there are two special channels: the n=1 "wave packet" on the strip
(combination of the growing and decaying cos(pi y) modes) and the threshold
channel on the branch whose outgoing factor is linear, (y - i).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ._p2ref import shape1d
from .geometry import PortSpec

DEFAULT_DTN_TERMS = 15


class ModalError(ValueError):
    pass


class ModeKind(enum.Enum):
    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"
    WAVE_PACKET = "wave_packet"
    THRESHOLD = "threshold"


def beta_strip(k: float) -> float:
    """Decay rate of the first non-piston strip mode."""
    return math.sqrt(math.pi**2 - k**2)


def gamma_branch(k: float) -> float:
    """Propagation constant of the odd branch mode of width 2*ell."""
    return 0.5 * k * math.sqrt(3.0)


@dataclass(frozen=True)
class TransverseMode:
    n: int
    kind: ModeKind
    rate: float  # k (propagating), decay rate (evanescent/packet), 0 (threshold)
    family: str  # 'strip_cos' | 'branch_cos' | 'branch_sin'
    orientation: str  # 'left' | 'right' | 'top'
    width: float
    amp: float  # global normalization prefactor of the mode

    def profile(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.family == "strip_cos":
            return np.cos(self.n * math.pi * t)
        if self.family == "branch_cos":
            return np.cos(self.n * math.pi * t / self.width)
        if self.family == "branch_sin":
            return np.sin((2 * self.n + 1) * math.pi * t / (2.0 * self.width))
        raise ModalError(f"unknown family {self.family}")

    @property
    def norm2(self) -> float:
        if self.family == "strip_cos":
            return 1.0 if self.n == 0 else 0.5
        if self.family == "branch_cos":
            return self.width if self.n == 0 else 0.5 * self.width
        return 0.5 * self.width

    # longitudinal factors, anchored at s = 0 (s is x for horizontal ports,
    # y for the top port)
    def out_value(self, s):
        if self.kind is ModeKind.PROPAGATING:
            sgn = -1.0 if self.orientation == "left" else 1.0
            return self.amp * np.exp(sgn * 1j * self.rate * np.asarray(s))
        if self.kind is ModeKind.EVANESCENT:
            sgn = 1.0 if self.orientation == "left" else -1.0
            return np.exp(sgn * self.rate * np.asarray(s)) + 0j
        if self.kind is ModeKind.WAVE_PACKET:
            b = self.rate
            s = np.asarray(s)
            return self.amp * (np.exp(-b * s) - 1j * np.exp(b * s))
        # threshold
        return self.amp * (np.asarray(s) - 1j)

    def out_deriv(self, s):
        if self.kind is ModeKind.PROPAGATING:
            sgn = -1.0 if self.orientation == "left" else 1.0
            return sgn * 1j * self.rate * self.out_value(s)
        if self.kind is ModeKind.EVANESCENT:
            sgn = 1.0 if self.orientation == "left" else -1.0
            return sgn * self.rate * self.out_value(s)
        if self.kind is ModeKind.WAVE_PACKET:
            b = self.rate
            s = np.asarray(s)
            return self.amp * (-b * np.exp(-b * s) - 1j * b * np.exp(b * s))
        return self.amp * np.ones_like(np.asarray(s, dtype=np.complex128))

    def in_value(self, s):
        if self.kind is ModeKind.PROPAGATING:
            sgn = 1.0 if self.orientation == "left" else -1.0
            return self.amp * np.exp(sgn * 1j * self.rate * np.asarray(s))
        if self.kind is ModeKind.WAVE_PACKET:
            b = self.rate
            s = np.asarray(s)
            return self.amp * (np.exp(-b * s) + 1j * np.exp(b * s))
        if self.kind is ModeKind.THRESHOLD:
            return self.amp * (np.asarray(s) + 1j)
        raise ModalError("no incoming wave in an evanescent channel")

    def in_deriv(self, s):
        if self.kind is ModeKind.PROPAGATING:
            sgn = 1.0 if self.orientation == "left" else -1.0
            return sgn * 1j * self.rate * self.in_value(s)
        if self.kind is ModeKind.WAVE_PACKET:
            b = self.rate
            s = np.asarray(s)
            return self.amp * (-b * np.exp(-b * s) + 1j * b * np.exp(b * s))
        if self.kind is ModeKind.THRESHOLD:
            return self.amp * np.ones_like(np.asarray(s, dtype=np.complex128))
        raise ModalError("no incoming wave in an evanescent channel")

    def _normal_sign(self) -> float:
        return -1.0 if self.orientation == "left" else 1.0

    def robin(self, position: float) -> complex:
        """Outward-normal logarithmic derivative of the outgoing factor."""
        return complex(
            self._normal_sign() * self.out_deriv(position) / self.out_value(position)
        )

    def incident_forcing(self, position: float) -> complex:
        """(d_n - Lambda) applied to the incoming factor at the port line."""
        lam = self.robin(position)
        return complex(
            self._normal_sign() * self.in_deriv(position)
            - lam * self.in_value(position)
        )


@dataclass(frozen=True)
class PortBasis:
    port: PortSpec
    modes: tuple  # (TransverseMode, ...)
    k: float

    @property
    def N(self) -> int:
        return len(self.modes)

    def robin_coeffs(self) -> np.ndarray:
        return np.array([m.robin(self.port.position) for m in self.modes])


def strip_modes(
    k: float, port: PortSpec, N: int = DEFAULT_DTN_TERMS, packet: bool = False
) -> PortBasis:
    """Cosine modes of the height-1 strip; n=1 optionally the wave packet."""
    if not 0.0 < k < math.pi:
        raise ModalError(f"k={k} outside (0, pi)")
    if port.orientation not in ("left", "right"):
        raise ModalError("strip modes live on horizontal ports")
    if packet and N < 2:
        raise ModalError("the wave-packet channel needs N >= 2")
    b = beta_strip(k)
    modes = []
    for n in range(N):
        if n == 0:
            m = TransverseMode(0, ModeKind.PROPAGATING, k, "strip_cos",
                               port.orientation, 1.0, 1.0 / math.sqrt(2.0 * k))
        elif n == 1 and packet:
            m = TransverseMode(1, ModeKind.WAVE_PACKET, b, "strip_cos",
                               port.orientation, 1.0, 1.0 / math.sqrt(2.0 * b))
        else:
            rate = math.sqrt((n * math.pi) ** 2 - k**2)
            m = TransverseMode(n, ModeKind.EVANESCENT, rate, "strip_cos",
                               port.orientation, 1.0, 1.0)
        modes.append(m)
    return PortBasis(port=port, modes=tuple(modes), k=k)


def _check_branch_width(k: float, port: PortSpec) -> float:
    w = port.span[1] - port.span[0]
    if abs(w - math.pi / k) > 1e-10:
        raise ModalError(
            f"branch width {w} != pi/k = {math.pi / k}; the threshold channel "
            "requires the branch width to equal the half wavelength"
        )
    return w


def branch_modes(k: float, port: PortSpec, N: int = DEFAULT_DTN_TERMS) -> PortBasis:
    """Neumann branch modes of width ell: piston, threshold, then evanescent."""
    if port.orientation != "top":
        raise ModalError("branch modes live on the top port")
    ell = _check_branch_width(k, port)
    modes = []
    for n in range(N):
        if n == 0:
            m = TransverseMode(0, ModeKind.PROPAGATING, k, "branch_cos", "top",
                               ell, 1.0 / math.sqrt(2.0 * k * ell))
        elif n == 1:
            # cut-off exactly at k = pi/ell: linear outgoing factor (y - i)
            m = TransverseMode(1, ModeKind.THRESHOLD, 0.0, "branch_cos", "top",
                               ell, 1.0 / math.sqrt(ell))
        else:
            m = TransverseMode(n, ModeKind.EVANESCENT, k * math.sqrt(n * n - 1.0),
                               "branch_cos", "top", ell, 1.0)
        modes.append(m)
    return PortBasis(port=port, modes=tuple(modes), k=k)


def branch_modes_mixed(
    k: float, port: PortSpec, N: int = DEFAULT_DTN_TERMS
) -> PortBasis:
    """Branch modes odd about x=0 (Dirichlet on the symmetry line).

    On the half-branch of width ell these are sin((2n+1) pi x / (2 ell));
    the first one propagates with rate gamma = k sqrt(3)/2.
    """
    if port.orientation != "top":
        raise ModalError("branch modes live on the top port")
    ell = _check_branch_width(k, port)
    g = gamma_branch(k)
    modes = []
    for n in range(N):
        if n == 0:
            m = TransverseMode(0, ModeKind.PROPAGATING, g, "branch_sin", "top",
                               ell, 1.0 / math.sqrt(g * ell))
        else:
            mu = (2 * n + 1) * math.pi / (2.0 * ell)
            m = TransverseMode(n, ModeKind.EVANESCENT, math.sqrt(mu * mu - k * k),
                               "branch_sin", "top", ell, 1.0)
        modes.append(m)
    return PortBasis(port=port, modes=tuple(modes), k=k)


class PortQuadrature:
    """Composite Gauss rule along the boundary edges of one port."""

    def __init__(self, node_ids, t, w):
        self.node_ids = node_ids  # (ne, 3): end, end, midpoint global node ids
        self.t = t  # (ne, q) cross-section coordinate of quad points
        self.w = w  # (ne, q) weights including edge length
        s, _ = np.polynomial.legendre.leggauss(t.shape[1])
        s = 0.5 * (s + 1.0)
        self.basis1d = shape1d(s)  # (3, q)

    @classmethod
    def from_mesh(cls, mesh, port: PortSpec, npts: int = 8) -> "PortQuadrature":
        from .mesh import port_tag  # local import to avoid a cycle

        edge_ids = mesh.boundary_edges_with_tag(port_tag(port.id))
        if not edge_ids:
            raise ModalError(f"mesh has no edges tagged for port {port.id!r}")
        s, gw = np.polynomial.legendre.leggauss(npts)
        s = 0.5 * (s + 1.0)
        gw = 0.5 * gw
        axis = 1 if port.orientation in ("left", "right") else 0
        node_ids, tq, wq = [], [], []
        for e in sorted(edge_ids):
            a, b = mesh.edges[e]
            pa, pb = mesh.vertices[a], mesh.vertices[b]
            if pa[axis] > pb[axis]:
                a, b = b, a
                pa, pb = pb, pa
            node_ids.append((a, b, mesh.n_vertices + e))
            length = abs(pb[axis] - pa[axis])
            tq.append(pa[axis] + s * (pb[axis] - pa[axis]))
            wq.append(gw * length)
        return cls(np.array(node_ids), np.array(tq), np.array(wq))

    def integrate_nodal(self, values: np.ndarray, f) -> complex:
        """Integral of (P2 trace of ``values``) * f(t) along the port."""
        tr = np.einsum("ek,kq->eq", values[self.node_ids], self.basis1d)
        return complex(np.sum(self.w * tr * f(self.t)))

    def node_vector(self, ndof: int, f) -> np.ndarray:
        """q[i] = integral of basis_i * f(t): the modal coupling vector."""
        contrib = np.einsum("eq,kq,eq->ek", self.w, self.basis1d, f(self.t))
        out = np.zeros(ndof)
        np.add.at(out, self.node_ids.ravel(), contrib.ravel())
        return out

    def integrate_callable(self, fa, fb) -> complex:
        return complex(np.sum(self.w * fa(self.t) * fb(self.t)))


def project_trace(trace, basis: PortBasis, n: int, quad: PortQuadrature) -> complex:
    """Amplitude of transverse mode n in a port trace.

    ``trace`` is either the nodal value vector of a solution (evaluated on the
    port's quadratic boundary nodes) or a callable of the cross-section
    coordinate.
    """
    mode = basis.modes[n]
    if callable(trace):
        num = quad.integrate_callable(trace, mode.profile)
        den = quad.integrate_callable(mode.profile, mode.profile).real
    else:
        num = quad.integrate_nodal(np.asarray(trace), mode.profile)
        den = quad.integrate_callable(mode.profile, mode.profile).real
    return num / den
