"""Closed-form large-branch asymptotics and the algebraic identities they obey.

The reflection coefficient of the mixed half-guide problem and the s22 entry
of the augmented matrix both approach Moebius images of the unit circle,

    R_asy(L)   = S11 + S12*S21 / (exp(-2i*gamma*L) - S22),
    s22_asy(L) = c - d^2 / (-exp(-2i*k*L) + a),

built from the limit-geometry matrices.  Unitarity + symmetry of those
matrices force both image circles to be exactly the unit circle, which is
what guarantees that T = 1 and s22 = -1 are reached for infinitely many L.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from .modal import gamma_branch

EXCEPTIONAL_THRESHOLD = 1e-3


class ExceptionalCaseError(ValueError):
    """A degeneracy assumption of the asymptotic construction is violated."""


@dataclass(frozen=True)
class MobiusCircle:
    center: complex
    radius: float


def _as_matrix(S) -> np.ndarray:
    return np.asarray(getattr(S, "S", S), dtype=np.complex128)


def r_asy(S, L: float, k: float) -> complex:
    """Asymptotic mixed-problem reflection coefficient at branch height L."""
    M = _as_matrix(S)
    if abs(abs(M[1, 1]) - 1.0) < EXCEPTIONAL_THRESHOLD:
        raise ExceptionalCaseError(
            f"|S22| = {abs(M[1, 1]):.6f} is within {EXCEPTIONAL_THRESHOLD} of 1: "
            "the strip and branch channels decouple"
        )
    g = gamma_branch(k)
    z = cmath.exp(-2j * g * L)
    return complex(M[0, 0] + M[0, 1] * M[1, 0] / (z - M[1, 1]))


def mobius_circle_2(S) -> MobiusCircle:
    """Image circle of the unit circle under the 2x2 asymptotic map.

    Valid whenever the channels couple, i.e. |S12| above the exceptional
    threshold (for a unitary matrix 1 - |S22|^2 = |S12|^2, so this is also
    what keeps the denominator away from zero)."""
    M = _as_matrix(S)
    s22 = M[1, 1]
    if abs(M[0, 1] * M[1, 0]) < EXCEPTIONAL_THRESHOLD**2:
        raise ExceptionalCaseError(
            f"|S12 S21| = {abs(M[0, 1] * M[1, 0]):.2e}: channels decouple")
    denom = 1.0 - abs(s22) ** 2
    center = M[0, 0] + M[0, 1] * np.conj(s22) * M[1, 0] / denom
    radius = abs(M[0, 1] * M[1, 0]) / denom
    return MobiusCircle(center=complex(center), radius=float(radius))


def _check_assumptions(M: np.ndarray) -> None:
    if abs(M[0, 3]) < EXCEPTIONAL_THRESHOLD:
        raise ExceptionalCaseError(
            f"|s14| = {abs(M[0, 3]):.2e} is below {EXCEPTIONAL_THRESHOLD}: "
            "the piston and threshold channels decouple"
        )
    a = M[2, 2] - M[0, 2] * M[2, 3] / M[0, 3]
    if abs(abs(a) - 1.0) < EXCEPTIONAL_THRESHOLD:
        raise ExceptionalCaseError(
            f"|s33 - s13*s34/s14| = {abs(a):.6f} is within "
            f"{EXCEPTIONAL_THRESHOLD} of 1: the gauge system is singular"
        )


def gauges_ab(S, L: float, k: float) -> Tuple[complex, complex]:
    """Gauge amplitudes of the branch piston / threshold corrections."""
    M = _as_matrix(S)
    _check_assumptions(M)
    e = cmath.exp(-2j * k * L)
    den = (1.0 + M[3, 3]) * (-e + M[2, 2]) - M[2, 3] * M[3, 2]
    a = (M[1, 3] * M[3, 2] - M[1, 2] * (1.0 + M[3, 3])) / den
    b = (M[1, 3] * (e - M[2, 2]) + M[1, 2] * M[2, 3]) / den
    return complex(a), complex(b)


def s22_asy(S, L: float, k: float, form: str = "direct") -> complex:
    """Asymptotic s22; 'direct' uses the gauge formula, 'reduced' the
    Moebius form c - d^2/(-e^{-2ikL} + a).  Both agree identically."""
    M = _as_matrix(S)
    _check_assumptions(M)
    if form == "reduced":
        a, _b, c, d, _res = abcd(S)
        e = cmath.exp(-2j * k * L)
        return complex(c - d * d / (-e + a))
    gA, gB = gauges_ab(S, L, k)
    return complex(M[1, 1] + gA * M[2, 1] + gB * M[3, 1])


def abcd(S) -> Tuple[complex, complex, complex, complex, float]:
    """Reduced Moebius constants (a, b, c, d) and the |b + d^2| residual."""
    M = _as_matrix(S)
    if abs(M[0, 3]) < EXCEPTIONAL_THRESHOLD:
        raise ExceptionalCaseError(f"|s14| = {abs(M[0, 3]):.2e} too small")
    s14 = M[0, 3]
    a = M[2, 2] - M[0, 2] * M[2, 3] / s14
    b = (2.0 * M[1, 3] * M[0, 2] * M[2, 1]
         - M[1, 2] * s14 * M[2, 1]
         - M[0, 1] * M[3, 1] * M[0, 2] * M[2, 3] / s14) / s14
    c = M[1, 1] - M[0, 1] * M[3, 1] / s14
    d = M[1, 2] - M[1, 3] * M[0, 2] / s14
    return complex(a), complex(b), complex(c), complex(d), float(abs(b + d * d))


def mobius_circle_4(a: complex, c: complex, d: complex) -> MobiusCircle:
    """Image circle of z -> c - d^2/(z + a) over the unit circle."""
    denom = 1.0 - abs(a) ** 2
    if abs(denom) < EXCEPTIONAL_THRESHOLD**2:
        raise ExceptionalCaseError(f"|a| = {abs(a):.6f} too close to 1")
    center = c + d * d * np.conj(a) / denom
    radius = abs(d) ** 2 / denom
    return MobiusCircle(center=complex(center), radius=float(radius))


def relpart_residuals(S, k: float) -> Tuple[float, float, float, float]:
    """Residuals of the four structural relations tying rows 1 and 4.

    They come from expanding the exact standing wave sqrt(2/k) cos(kx) in the
    limit geometry, with lambda = sqrt(ell)/(i sqrt(2k))."""
    M = _as_matrix(S)
    ell = math.pi / k
    lam = math.sqrt(ell) / (1j * math.sqrt(2.0 * k))
    return (
        float(abs(M[0, 0] + lam * M[3, 0] - 1.0)),
        float(abs(M[0, 1] + lam * M[3, 1])),
        float(abs(M[0, 2] + lam * M[3, 2])),
        float(abs(M[0, 3] + lam * M[3, 3] + lam)),
    )


def predicted_periods(k: float) -> Dict[str, float]:
    """Almost-periods in L of the invisibility and trapped-mode points."""
    if not 0.0 < k < math.pi:
        raise ValueError(f"k={k} outside (0, pi)")
    return {
        "invisibility": 2.0 * math.pi / (k * math.sqrt(3.0)),
        "trapped": math.pi / k,
    }


def decay_compare(direct: Sequence[Tuple[float, complex]], asy,
                  floor: float = 0.0) -> Dict[str, float]:
    """Fit log|direct - asy| vs L; returns the decay rate and prefactor.

    Points with residual below ``floor`` are dropped before fitting (they sit
    at the discretization noise level, not on the exponential).
    """
    if len(direct) < 6:
        raise ValueError("need at least 6 samples for a decay fit")
    Ls = np.array([p[0] for p in direct], dtype=float)
    diffs = np.array([abs(p[1] - asy(p[0])) for p in direct])
    keep = diffs > max(floor, 0.0)
    if keep.sum() < 6:
        raise ValueError(
            f"only {int(keep.sum())} samples above floor={floor}; cannot fit"
        )
    slope, intercept = np.polyfit(Ls[keep], np.log(diffs[keep]), 1)
    return {
        "fitted_rate": float(-slope),
        "prefactor": float(math.exp(intercept)),
        "points_used": int(keep.sum()),
    }


def random_unitary_symmetric(n: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded random unitary symmetric matrix (Q Q^T for Haar-like Q)."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return q @ q.T


def identity_report(S2, S4, k: float) -> Dict[str, float]:
    """All residuals used by the limit-matrix acceptance checks."""
    from .scattering import _matrix_residuals

    M2, M4 = _as_matrix(S2), _as_matrix(S4)
    u2, sy2 = _matrix_residuals(M2)
    u4, sy4 = _matrix_residuals(M4)
    rel = relpart_residuals(M4, k)
    a, b, c, d, b_res = abcd(M4)
    circ2 = mobius_circle_2(M2)
    circ4 = mobius_circle_4(a, c, d)
    return {
        "mixed_unitarity": u2,
        "mixed_symmetry": sy2,
        "neumann_unitarity": u4,
        "neumann_symmetry": sy4,
        "relations": list(rel),
        "b_plus_d2": b_res,
        "circle2_center": [circ2.center.real, circ2.center.imag],
        "circle2_radius": circ2.radius,
        "circle4_center": [circ4.center.real, circ4.center.imag],
        "circle4_radius": circ4.radius,
        "s12_magnitude": float(abs(M2[0, 1])),
        "s14_magnitude": float(abs(M4[0, 3])),
    }
