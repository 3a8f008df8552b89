import math

import numpy as np
import pytest

from wgscat import solver
from wgscat.geometry import PortSpec, TruncatedDomain, build_omega, truncate
from wgscat.mesh import generate
from wgscat.modal import PortQuadrature, project_trace, strip_modes

K = 0.8 * math.pi
ELL = math.pi / K


def straight_strip(width=4 * ELL, h=ELL / 16):
    dom = TruncatedDomain(
        columns=((-width / 2, width / 2, 1.0),),
        ports=(PortSpec("left", "left", -width / 2, (0.0, 1.0)),
               PortSpec("right", "right", width / 2, (0.0, 1.0))),
    )
    return generate(dom, h)


@pytest.fixture(scope="module")
def strip_solution():
    mesh = straight_strip()
    bases = {p.id: strip_modes(K, p, 8) for p in mesh.domain.ports}
    system = solver.assemble(mesh, K, bases, incident=("left", 0))
    field = solver.factor_solve(system)
    return mesh, bases, system, field


def test_transparent_strip(strip_solution):
    """An empty guide transmits the piston exactly: R = 0, T = 1."""
    mesh, bases, system, field = strip_solution
    for pid, expect_inc in (("left", True), ("right", False)):
        basis = bases[pid]
        quad = system.quads[pid]
        p = project_trace(field.values, basis, 0, quad)
        mode = basis.modes[0]
        pos = basis.port.position
        if expect_inc:
            R = (p - mode.in_value(pos)) / mode.out_value(pos)
            assert abs(R) < 1e-7
        else:
            T = p / mode.out_value(pos)
            assert abs(T - 1.0) < 1e-4


def test_field_matches_incident_wave(strip_solution):
    mesh, _, _, field = strip_solution
    coords = mesh.node_coords()
    exact = np.exp(1j * K * coords[:, 0]) / math.sqrt(2 * K)
    assert np.max(np.abs(field.values - exact)) < 1e-4


def test_complex_symmetric(strip_solution):
    _, _, system, _ = strip_solution
    A = system.A
    assert abs(A - A.T).max() < 1e-12


def test_residual_check(strip_solution):
    _, _, system, field = strip_solution
    r = system.A @ field.values - system.b
    assert np.max(np.abs(r)) < 1e-10


def test_rcond_estimate(strip_solution):
    mesh, bases, _, _ = strip_solution
    system = solver.assemble(mesh, K, bases, incident=("left", 0))
    field = solver.factor_solve(system, rcond_estimate=True)
    assert "rcond" in field.metadata


def test_eval_on_grid(strip_solution):
    mesh, _, _, field = strip_solution
    xs = np.linspace(-ELL, ELL, 7)
    ys = np.linspace(0.0, 1.0, 5)  # includes both walls
    vals = solver.eval_on_grid(field, xs, ys)
    assert np.all(np.isfinite(vals))
    exact = np.exp(1j * K * xs)[:, None] / math.sqrt(2 * K)
    assert np.max(np.abs(vals - exact)) < 1e-4
    outside = solver.eval_on_grid(field, np.array([10 * ELL]),
                                  np.array([0.5]))
    assert np.isnan(outside).all()


def test_eval_on_grid_material_boundary():
    """Points exactly on the duct roof next to the branch are inside."""
    mesh = generate(truncate(build_omega(K, 2.0)), ELL / 8)
    field = solver.ComplexField(values=np.ones(mesh.n_nodes, complex),
                                mesh=mesh, k=K)
    vals = solver.eval_on_grid(field, np.array([-1.5 * ELL, 1.5 * ELL]),
                               np.array([1.0]))
    assert np.allclose(vals, 1.0)


def test_field_norms(strip_solution):
    mesh, _, _, field = strip_solution
    norms = solver.field_norms(field)
    # |e^{ikx}|^2/(2k) integrated over the strip
    area = mesh.domain.area
    assert norms["l2"] ** 2 == pytest.approx(area / (2 * K), rel=1e-4)


def test_dirichlet_tag_enforced():
    from wgscat.geometry import SymmetryBC, half_guide
    from wgscat.mesh import SYMMETRY

    dom = truncate(half_guide(build_omega(K, 2.0), SymmetryBC.DIRICHLET))
    mesh = generate(dom, ELL / 8)
    bases = {"left": strip_modes(K, dom.ports[0], 8)}
    system = solver.assemble(mesh, K, bases, incident=("left", 0),
                             dirichlet_tag=SYMMETRY)
    field = solver.factor_solve(system)
    fixed = mesh.nodes_on_tag(SYMMETRY)
    assert np.max(np.abs(field.values[fixed])) < 1e-14
