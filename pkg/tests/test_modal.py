import math

import numpy as np
import pytest

from wgscat.geometry import PortSpec, SymmetryBC, build_omega, half_guide, truncate
from wgscat.mesh import generate
from wgscat.modal import (
    ModalError,
    PortQuadrature,
    beta_strip,
    branch_modes,
    branch_modes_mixed,
    gamma_branch,
    project_trace,
    strip_modes,
)

K = 0.8 * math.pi
ELL = math.pi / K
LEFT = PortSpec("left", "left", -2 * ELL, (0.0, 1.0))
RIGHT = PortSpec("right", "right", 2 * ELL, (0.0, 1.0))
TOP = PortSpec("top", "top", 1 + 2 * ELL, (-ELL, 0.0))


@pytest.fixture(scope="module")
def quad():
    mesh = generate(truncate(half_guide(build_omega(K, 2.0),
                                        SymmetryBC.NEUMANN)), ELL / 16)
    return PortQuadrature.from_mesh(mesh, LEFT, npts=12)


def test_rates():
    assert beta_strip(K) == pytest.approx(0.6 * math.pi)
    assert gamma_branch(K) == pytest.approx(K * math.sqrt(3) / 2)


def test_strip_mode_normalizations():
    basis = strip_modes(K, LEFT, 4, packet=True)
    assert basis.modes[0].amp == pytest.approx(1 / math.sqrt(2 * K))
    assert basis.modes[1].amp == pytest.approx(1 / math.sqrt(2 * beta_strip(K)))
    assert basis.modes[2].amp == 1.0
    assert basis.modes[2].rate == pytest.approx(
        math.sqrt((2 * math.pi) ** 2 - K**2))


def test_orthogonality(quad):
    basis = strip_modes(K, LEFT, 15)
    for n in range(15):
        for m in range(n):
            ip = quad.integrate_callable(basis.modes[n].profile,
                                         basis.modes[m].profile)
            assert abs(ip) < 1e-10, (n, m)


def test_profile_norms(quad):
    basis = strip_modes(K, LEFT, 6)
    for mode in basis.modes:
        ip = quad.integrate_callable(mode.profile, mode.profile)
        assert ip.real == pytest.approx(mode.norm2, rel=1e-10)


def test_robin_propagating_is_plus_ik():
    for port in (LEFT, RIGHT):
        basis = strip_modes(K, port, 2)
        assert basis.modes[0].robin(port.position) == pytest.approx(1j * K)


def test_robin_evanescent_negative_real():
    basis = strip_modes(K, LEFT, 3)
    lam = basis.modes[2].robin(LEFT.position)
    rate = math.sqrt((2 * math.pi) ** 2 - K**2)
    assert lam == pytest.approx(-rate)


def test_robin_packet_sympy_oracle():
    sympy = pytest.importorskip("sympy")
    b = beta_strip(K)
    x = sympy.symbols("x", real=True)
    phi = sympy.exp(-b * x) - sympy.I * sympy.exp(b * x)
    pos = float(LEFT.position)
    # outward normal at the left port is -x
    expected = complex((-sympy.diff(phi, x) / phi).subs(x, pos).evalf())
    basis = strip_modes(K, LEFT, 2, packet=True)
    assert basis.modes[1].robin(pos) == pytest.approx(expected, rel=1e-12)


def test_robin_threshold_finite_difference():
    basis = branch_modes(K, TOP, 3)
    mode = basis.modes[1]
    pos = TOP.position
    eps = 1e-7
    fd = (mode.out_value(pos + eps) - mode.out_value(pos - eps)) / (2 * eps)
    expected = fd / mode.out_value(pos)
    assert mode.robin(pos) == pytest.approx(expected, rel=1e-6)
    assert mode.robin(pos) == pytest.approx(1.0 / (pos - 1j), rel=1e-12)


def test_branch_modes_values():
    basis = branch_modes(K, TOP, 4)
    assert basis.modes[0].robin(TOP.position) == pytest.approx(1j * K)
    assert basis.modes[2].rate == pytest.approx(K * math.sqrt(3))
    mixed = branch_modes_mixed(K, TOP, 3)
    assert mixed.modes[0].robin(TOP.position) == pytest.approx(
        1j * gamma_branch(K))
    assert mixed.modes[1].rate == pytest.approx(K * math.sqrt(5) / 2)


def test_incident_forcing_finite_difference():
    basis = strip_modes(K, LEFT, 2)
    mode = basis.modes[0]
    pos = LEFT.position
    eps = 1e-7
    d_in = (mode.in_value(pos + eps) - mode.in_value(pos - eps)) / (2 * eps)
    expected = -d_in - mode.robin(pos) * mode.in_value(pos)
    assert mode.incident_forcing(pos) == pytest.approx(expected, rel=1e-6)


def test_branch_width_check():
    bad = PortSpec("top", "top", 3.0, (-0.9 * ELL, 0.0))
    with pytest.raises(ModalError):
        branch_modes(K, bad, 3)


def test_project_trace_callable(quad):
    basis = strip_modes(K, LEFT, 5)
    coeffs = (0.7, -0.2, 0.0, 0.4, 0.0)

    def trace(t):
        return sum(c * basis.modes[n].profile(t)
                   for n, c in enumerate(coeffs))

    for n, c in enumerate(coeffs):
        assert project_trace(trace, basis, n, quad) == pytest.approx(c, abs=1e-10)


def test_project_trace_nodal(quad):
    mesh = generate(truncate(half_guide(build_omega(K, 2.0),
                                        SymmetryBC.NEUMANN)), ELL / 16)
    basis = strip_modes(K, LEFT, 3)
    coords = mesh.node_coords()
    values = np.cos(math.pi * coords[:, 1]).astype(np.complex128)
    p = project_trace(values, basis, 1, quad)
    assert p == pytest.approx(1.0, abs=1e-5)  # P2 interpolation of cos(pi y)
