import math

import numpy as np
import pytest
from scipy.integrate import quad

from wgscat.geometry import SymmetryBC, build_omega
from wgscat.modematch import (
    coupling_matrix,
    half_reflection,
    oracle_pair,
    oracle_scattering,
)
from wgscat.scattering import SolveOptions, solve_full

K = 0.8 * math.pi
ELL = math.pi / K


@pytest.mark.parametrize("L", [1.7, 2.3, 3.1])
@pytest.mark.parametrize("bc", [SymmetryBC.NEUMANN, SymmetryBC.DIRICHLET])
def test_half_reflection_unimodular(L, bc):
    r = half_reflection(K, L, bc)
    assert abs(abs(r) - 1.0) < 1e-10


@pytest.mark.parametrize("L", [1.7, 2.3, 3.1])
def test_energy_conserved(L):
    pair = oracle_pair(K, L)
    assert abs(pair.R) ** 2 + abs(pair.T) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_coupling_matrix_against_quadrature():
    L = 2.0
    n, m = 6, 12
    G = coupling_matrix(n, m, L)
    for i in range(n):
        for j in range(m):
            val, _ = quad(
                lambda y, i=i, j=j: math.cos(i * math.pi * y)
                * math.cos(j * math.pi * y / L),
                0.0, 1.0, limit=200)
            assert G[i, j] == pytest.approx(val, abs=1e-10), (i, j)


def test_oracle_matches_fem():
    L = 2.0
    pair_mm = oracle_pair(K, L)
    pair_fem = solve_full(build_omega(K, L), SolveOptions(h=ELL / 20))
    assert abs(pair_mm.R - pair_fem.R) < 5e-4
    assert abs(pair_mm.T - pair_fem.T) < 5e-4


def test_oracle_mode_count_convergence():
    L = 2.3
    coarse = oracle_pair(K, L, n_strip=20)
    fine = oracle_pair(K, L, n_strip=40)
    assert abs(coarse.T - fine.T) < 1e-4


def test_oracle_scattering_provenance():
    pair = oracle_scattering(K, 2.0)
    assert pair.provenance == "mode_matching"


def test_invisibility_location():
    """T passes through 1 near L = 2.5756 (independent of the FEM)."""
    Ls = np.linspace(2.56, 2.60, 21)
    dists = [abs(oracle_pair(K, L).T - 1.0) for L in Ls]
    i = int(np.argmin(dists))
    assert 2.570 < Ls[i] < 2.582
    assert dists[i] < 5e-3
