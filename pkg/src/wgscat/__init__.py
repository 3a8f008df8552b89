"""Scattering toolkit for symmetric branched waveguides.

Computes reflection/transmission coefficients, augmented scattering matrices
and their large-branch asymptotics for 2D Helmholtz problems on staircase
waveguides, and locates the branch heights giving perfect invisibility
(T = 1) and trapped modes (s22 = -1).
"""

from .geometry import (
    GeometryError,
    HalfGuideProblem,
    LimitGeometry,
    Margins,
    SymmetryBC,
    TruncatedDomain,
    WaveguideGeometry,
    build_omega,
    build_staircase,
    half_guide,
    limit_geometry,
    truncate,
    truncate_limit,
)
from .mesh import Mesh, generate, refine
from .modal import (
    PortBasis,
    TransverseMode,
    beta_strip,
    branch_modes,
    branch_modes_mixed,
    gamma_branch,
    strip_modes,
)
from .scattering import (
    AugmentedMatrix,
    HalfCoefficients,
    LimitMatrix,
    ScatteringPair,
    SolveOptions,
    TrappedCandidate,
    augmented,
    combine,
    half_coefficients,
    limit_mixed,
    limit_neumann,
    remark_checks,
    solve_full,
    solve_half,
    trapped_candidate,
    unfold,
)
from .asymptotics import (
    ExceptionalCaseError,
    MobiusCircle,
    decay_compare,
    mobius_circle_2,
    mobius_circle_4,
    predicted_periods,
    r_asy,
    s22_asy,
)
from .modematch import oracle_pair, oracle_scattering
from .search import PeakSet, SweepRecord, find_peaks, spacing_stats, sweep

__version__ = "0.1.0"
