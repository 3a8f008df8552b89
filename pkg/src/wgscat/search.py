"""Parameter sweeps over the branch height L and root-finding on the peaks.

The interesting heights are where a scattering quantity hits a point of the
unit circle: T(L) = 1 (invisibility), R(L) = 1 (perfect reflection) and
s22(L) = -1 (trapped mode).  Because the quantities move on or inside the
unit circle, -ln|value - target| has a sharp local maximum at each hit; we
sweep on a uniform grid, detect those maxima and refine each bracket by
golden-section minimization of |value - target|.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import SymmetryBC, WaveguideGeometry, build_omega, build_staircase
from .scattering import SolveOptions, augmented, solve_full, solve_half

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_TOL_L = 1e-4

# target on the unit circle hit by each quantity: T = 1 is invisibility,
# R = 1 perfect reflection, Rh = -1 the mixed-problem face of invisibility,
# s22 = -1 certifies a trapped mode, r = 1 identically.
QUANTITIES = ("T", "R", "r", "Rh", "s22")
TARGETS = {"T": 1.0 + 0.0j, "R": 1.0 + 0.0j, "r": 1.0 + 0.0j,
           "Rh": -1.0 + 0.0j, "s22": -1.0 + 0.0j}


def _geometry(k: float, L: float, tail: Tuple[float, ...]) -> WaveguideGeometry:
    if tail:
        return build_staircase(k, L, tuple(tail))
    return build_omega(k, L)


def evaluate(quantity: str, k: float, L: float,
             tail: Tuple[float, ...] = (),
             h: Optional[float] = None, dtn_terms: int = 15) -> complex:
    """One scattering quantity at one branch height (picklable entry point)."""
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; use one of {QUANTITIES}")
    geom = _geometry(k, L, tail)
    options = SolveOptions(h=h, dtn_terms=dtn_terms)
    if quantity == "s22":
        return complex(augmented(geom, options).s22)
    if quantity == "r":
        return complex(solve_half(geom, SymmetryBC.NEUMANN, options))
    if quantity == "Rh":
        return complex(solve_half(geom, SymmetryBC.DIRICHLET, options))
    pair = solve_full(geom, options)
    return complex(pair.T if quantity == "T" else pair.R)


def _evaluate_star(args) -> complex:
    return evaluate(*args)


def _safe_evaluate(args) -> Optional[complex]:
    """A failed grid point is recorded as absent, not fatal to the sweep."""
    try:
        return evaluate(*args)
    except Exception as exc:  # noqa: BLE001 - report and continue the sweep
        import warnings

        warnings.warn(f"sweep point {args[:3]} failed: {exc}")
        return None


@dataclass
class SweepRecord:
    L: float
    value: complex
    quantity: str

    @property
    def distance(self) -> float:
        return abs(self.value - TARGETS[self.quantity])

    @property
    def sharpness(self) -> float:
        return -math.log(max(self.distance, 1e-300))


@dataclass
class PeakSet:
    quantity: str
    k: float
    locations: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)

    def spacings(self) -> np.ndarray:
        return np.diff(np.sort(np.asarray(self.locations)))


def sweep(quantity: str, k: float, Ls: Sequence[float],
          tail: Tuple[float, ...] = (), h: Optional[float] = None,
          dtn_terms: int = 15, workers: Optional[int] = None
          ) -> List[SweepRecord]:
    """Evaluate ``quantity`` on a grid of L, optionally in parallel."""
    args = [(quantity, k, float(L), tuple(tail), h, dtn_terms) for L in Ls]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_safe_evaluate, args, chunksize=1))
    else:
        values = [_safe_evaluate(a) for a in args]
    records = [SweepRecord(L=float(L), value=v, quantity=quantity)
               for L, v in zip(Ls, values) if v is not None]
    records.sort(key=lambda r: r.L)
    return records


def detect_peaks(records: Sequence[SweepRecord],
                 min_sharpness: float = 0.0) -> List[int]:
    """Indices of strict local maxima of -ln|value - target|."""
    s = [r.sharpness for r in records]
    return [i for i in range(1, len(s) - 1)
            if s[i] > s[i - 1] and s[i] > s[i + 1] and s[i] > min_sharpness]


def refine(fn: Callable[[float], complex], target: complex,
           La: float, Lb: float, tol_L: float = DEFAULT_TOL_L
           ) -> Tuple[float, float]:
    """Golden-section minimizer of |fn(L) - target| on [La, Lb]."""
    a, b = float(La), float(Lb)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = abs(fn(c) - target)
    fd = abs(fn(d) - target)
    while b - a > tol_L:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = abs(fn(c) - target)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = abs(fn(d) - target)
    L_star = 0.5 * (a + b)
    return L_star, abs(fn(L_star) - target)


def find_peaks(quantity: str, k: float, L_range: Tuple[float, float],
               step: float = 0.05, tail: Tuple[float, ...] = (),
               h: Optional[float] = None, dtn_terms: int = 15,
               tol_L: float = DEFAULT_TOL_L,
               workers: Optional[int] = None,
               quality: Optional[float] = 1e-3) -> PeakSet:
    """Sweep + detect + refine in one call.

    A refined peak is kept only if its residual beats ``quality`` (set it to
    None to keep every local maximum, discretization artifacts included).
    """
    Ls = np.arange(L_range[0], L_range[1] + 0.5 * step, step)
    records = sweep(quantity, k, Ls, tail, h, dtn_terms, workers)
    target = TARGETS[quantity]

    def fn(L: float) -> complex:
        return evaluate(quantity, k, L, tuple(tail), h, dtn_terms)

    peaks = PeakSet(quantity=quantity, k=k)
    for i in detect_peaks(records):
        L_star, resid = refine(fn, target, records[i - 1].L, records[i + 1].L,
                               tol_L)
        if quality is not None and resid >= quality:
            continue
        peaks.locations.append(L_star)
        peaks.residuals.append(resid)
    return peaks


@dataclass
class SpacingStats:
    mean: float
    std: float
    predicted: float

    @property
    def relative_error(self) -> float:
        return abs(self.mean - self.predicted) / self.predicted


def spacing_stats(peaks: PeakSet, predicted: float) -> SpacingStats:
    gaps = peaks.spacings()
    if len(gaps) == 0:
        raise ValueError("need at least two peaks for spacing statistics")
    return SpacingStats(mean=float(np.mean(gaps)), std=float(np.std(gaps)),
                        predicted=predicted)


def write_csv(records: Sequence[SweepRecord], path: str) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["L", "re_value", "im_value", "distance", "quantity"])
        for r in records:
            w.writerow([f"{r.L:.12g}", f"{r.value.real:.12g}",
                        f"{r.value.imag:.12g}", f"{r.distance:.12g}",
                        r.quantity])


def peaks_to_json(peaks: PeakSet, config: Optional[dict] = None) -> str:
    return json.dumps({
        "quantity": peaks.quantity,
        "k": peaks.k,
        "locations": peaks.locations,
        "residuals": peaks.residuals,
        "config": config or {},
    }, indent=2)
