"""Command-line front end: end-to-end experiments with CSV/JSON/SVG output.

Subcommands: sweep-invisibility, sweep-trapped, limit-matrices,
asymptotic-compare, solve-field.  A JSON config file supplies defaults;
command-line flags override it.  Exit codes: 0 success, 2 validation error,
3 solver failure, 4 exceptional-case abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import asymptotics, search, svgplot
from .asymptotics import ExceptionalCaseError
from .geometry import (
    GeometryError,
    Margins,
    SymmetryBC,
    build_omega,
    build_staircase,
    default_margins,
)
from .modal import beta_strip, gamma_branch
from .scattering import (
    SolveOptions,
    augmented,
    limit_mixed,
    limit_neumann,
    remark_checks,
    solve_full,
    solve_half,
    trapped_candidate,
    unfold,
)
from .solver import SolverError, eval_on_grid

OUT_ENV = "WGSCAT_OUT"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_EXCEPTIONAL = 4


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    k: float = 0.8 * math.pi
    geometry: str = "omega"  # 'omega' | 'staircase'
    L: float = 2.5
    heights: Tuple[float, ...] = (2.5, 2.0, 1.5, 1.0)  # staircase tail
    h: Optional[float] = None
    dtn_terms: int = 15
    L_range: Tuple[float, float] = (1.3, 8.0)
    step: float = 0.02
    out: str = "."
    tol: float = 1e-3
    margin_factor: float = 1.0
    threads: Optional[int] = None
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.k < math.pi:
            raise ValidationError(f"k={self.k} must lie in (0, pi)")
        if self.geometry not in ("omega", "staircase"):
            raise ValidationError(f"unknown geometry {self.geometry!r}")
        if self.step <= 0:
            raise ValidationError(f"step={self.step} must be positive")
        if self.L_range[1] <= self.L_range[0]:
            raise ValidationError(f"empty sweep range {self.L_range}")
        if self.L_range[0] <= 1.0:
            raise ValidationError("sweep range must stay above L = 1")
        if self.dtn_terms < 2:
            raise ValidationError("need at least 2 DtN terms")
        if self.margin_factor < 1.0:
            raise ValidationError("margin_factor must be >= 1")
        if self.h is not None and self.h <= 0:
            raise ValidationError("h must be positive")

    @property
    def tail(self) -> Tuple[float, ...]:
        return tuple(self.heights) if self.geometry == "staircase" else ()

    def geometry_at(self, L: float):
        if self.geometry == "staircase":
            return build_staircase(self.k, L, self.tail)
        return build_omega(self.k, L)

    def solve_options(self) -> SolveOptions:
        margins = None
        if self.margin_factor != 1.0:
            base = default_margins(self.geometry_at(self.L))
            margins = Margins(left=base.left * self.margin_factor,
                              top=base.top * self.margin_factor)
        return SolveOptions(h=self.h, dtn_terms=self.dtn_terms,
                            margins=margins)

    def resolved(self) -> dict:
        d = asdict(self)
        d["heights"] = list(self.heights)
        d["L_range"] = list(self.L_range)
        return d


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _write_json(cfg: RunConfig, name: str, payload: dict) -> str:
    payload = dict(payload)
    payload["config"] = cfg.resolved()
    path = _out_path(cfg, name)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
    return path


def _sweep_and_peaks(cfg: RunConfig, quantity: str):
    records = search.sweep(
        quantity, cfg.k,
        np.arange(cfg.L_range[0], cfg.L_range[1] + 0.5 * cfg.step, cfg.step),
        tail=cfg.tail, h=cfg.h, dtn_terms=cfg.dtn_terms, workers=cfg.threads)
    target = search.TARGETS[quantity]

    def fn(L: float) -> complex:
        return search.evaluate(quantity, cfg.k, L, cfg.tail, cfg.h,
                               cfg.dtn_terms)

    peaks = search.PeakSet(quantity=quantity, k=cfg.k)
    for i in search.detect_peaks(records):
        L_star, resid = search.refine(fn, target, records[i - 1].L,
                                      records[i + 1].L)
        if resid < cfg.tol:
            peaks.locations.append(L_star)
            peaks.residuals.append(resid)
    return records, peaks


def cmd_sweep_invisibility(cfg: RunConfig) -> int:
    records, peaks = _sweep_and_peaks(cfg, "T")
    search.write_csv(records, _out_path(cfg, "sweep.csv"))
    _write_json(cfg, "peaks.json",
                {"quantity": "T", "locations": peaks.locations,
                 "residuals": peaks.residuals})
    svgplot.complex_locus(
        _out_path(cfg, "T_locus.svg"), [r.value for r in records],
        title="T(L) in the complex plane",
        overlays=((0j, 1.0), (0.5 + 0j, 0.5)))
    svgplot.line_plot(
        _out_path(cfg, "T_sharpness.svg"), [r.L for r in records],
        [([r.sharpness for r in records], "#1f77b4", "-ln|T-1|")],
        ylabel="-ln|T-1|", title="Invisibility peaks",
        markers=peaks.locations)
    for L, resid in zip(peaks.locations, peaks.residuals):
        print(f"invisibility point L = {L:.4f}  |T-1| = {resid:.3e}")
    return EXIT_OK


def cmd_sweep_trapped(cfg: RunConfig) -> int:
    Ls = np.arange(cfg.L_range[0], cfg.L_range[1] + 0.5 * cfg.step, cfg.step)
    entries: List[np.ndarray] = []
    for L in Ls:
        M = augmented(cfg.geometry_at(float(L)), cfg.solve_options())
        entries.append(M.S.reshape(-1))
    S = np.array(entries)  # (nL, 4): s11, s12, s21, s22
    with open(_out_path(cfg, "sweep.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["L"] + [f"{p}_{ij}" for ij in ("s11", "s12", "s21", "s22")
                            for p in ("re", "im")])
        for L, row in zip(Ls, S):
            w.writerow([f"{L:.12g}"] + [f"{v:.12g}"
                                        for z in row for v in (z.real, z.imag)])
    svgplot.line_plot(
        _out_path(cfg, "sij.svg"), list(Ls),
        [(list(np.abs(S[:, 0])), "#1f77b4", "|s11|"),
         (list(np.abs(S[:, 1])), "#2ca02c", "|s12|"),
         (list(np.abs(S[:, 3])), "#d62728", "|s22|")],
        ylabel="|s_ij|", title="Augmented matrix entries")
    sharp = [-math.log(max(abs(z + 1.0), 1e-300)) for z in S[:, 3]]
    records = [search.SweepRecord(L=float(L), value=complex(z), quantity="s22")
               for L, z in zip(Ls, S[:, 3])]

    def fn(L: float) -> complex:
        return search.evaluate("s22", cfg.k, L, cfg.tail, cfg.h,
                               cfg.dtn_terms)

    locations, residuals = [], []
    for i in search.detect_peaks(records):
        L_star, resid = search.refine(fn, -1.0 + 0j, records[i - 1].L,
                                      records[i + 1].L)
        if resid < cfg.tol:
            locations.append(L_star)
            residuals.append(resid)
    svgplot.line_plot(
        _out_path(cfg, "s22_sharpness.svg"), list(Ls),
        [(sharp, "#1f77b4", "-ln|s22+1|")], ylabel="-ln|s22+1|",
        title="Trapped-mode peaks", markers=locations)
    _write_json(cfg, "peaks.json",
                {"quantity": "s22", "locations": locations,
                 "residuals": residuals})
    for L_star, resid in zip(locations, residuals):
        cand = trapped_candidate(cfg.geometry_at(L_star), cfg.solve_options())
        _export_field(cfg, cand.field, f"trapped_L{L_star:.4f}")
        full = unfold(cand.field, "even")
        _export_field(cfg, full, f"trapped_unfolded_L{L_star:.4f}")
        print(f"trapped point L = {L_star:.4f}  |s22+1| = {resid:.3e}  "
              f"tail rate = {cand.tail_decay_rate:.4f}")
    return EXIT_OK


def cmd_limit_matrices(cfg: RunConfig) -> int:
    opts = cfg.solve_options()
    S2 = limit_mixed(cfg.k, opts)
    S4 = limit_neumann(cfg.k, opts)
    report = asymptotics.identity_report(S2, S4, cfg.k)
    payload = {
        "k": cfg.k,
        "S2": [[[z.real, z.imag] for z in row] for row in S2.S],
        "S4": [[[z.real, z.imag] for z in row] for row in S4.S],
        "identities": report,
    }
    path = _write_json(cfg, "limit_matrices.json", payload)
    print(f"limit matrices written to {path}")
    for key in ("mixed_unitarity", "neumann_unitarity", "b_plus_d2",
                "circle2_radius", "circle4_radius"):
        print(f"  {key}: {report[key]:.3e}")
    return EXIT_OK


def cmd_asymptotic_compare(cfg: RunConfig) -> int:
    opts = cfg.solve_options()
    S2 = limit_mixed(cfg.k, opts)
    S4 = limit_neumann(cfg.k, opts)
    Ls = np.arange(cfg.L_range[0], cfg.L_range[1] + 0.5 * cfg.step, cfg.step)
    rows = []
    for L in Ls:
        L = float(L)
        geom = cfg.geometry_at(L)
        Rh = complex(solve_half(geom, SymmetryBC.DIRICHLET, opts))
        s22 = complex(augmented(geom, opts).s22)
        rows.append((L, Rh, asymptotics.r_asy(S2, L, cfg.k), s22,
                     asymptotics.s22_asy(S4, L, cfg.k)))
    with open(_out_path(cfg, "asymptotic_compare.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["L", "re_R", "im_R", "re_R_asy", "im_R_asy",
                    "re_s22", "im_s22", "re_s22_asy", "im_s22_asy"])
        for L, Rh, Ra, s22, sa in rows:
            w.writerow([f"{v:.12g}" for v in
                        (L, Rh.real, Rh.imag, Ra.real, Ra.imag,
                         s22.real, s22.imag, sa.real, sa.imag)])
    err_R = [abs(r[1] - r[2]) for r in rows]
    err_s = [abs(r[3] - r[4]) for r in rows]
    svgplot.line_plot(
        _out_path(cfg, "asymptotic_error.svg"), [r[0] for r in rows],
        [([math.log10(max(e, 1e-16)) for e in err_R], "#1f77b4",
          "log10|R-R_asy|"),
         ([math.log10(max(e, 1e-16)) for e in err_s], "#d62728",
          "log10|s22-s22_asy|")],
        ylabel="log10 error", title="Asymptotic convergence")
    gamma = gamma_branch(cfg.k)
    report = {"gamma": gamma, "beta_strip": beta_strip(cfg.k)}
    try:
        fit = asymptotics.decay_compare(
            [(r[0], r[1]) for r in rows],
            lambda L: asymptotics.r_asy(S2, L, cfg.k), floor=2e-5)
        report["R_fitted_rate"] = fit["fitted_rate"]
        print(f"R decay: fitted rate {fit['fitted_rate']:.3f} "
              f"(gamma = {gamma:.3f}; the bound rate)")
    except ValueError as exc:
        report["R_fit_error"] = str(exc)
        print(f"R decay fit unavailable: {exc}")
    try:
        fit = asymptotics.decay_compare(
            [(r[0], r[3]) for r in rows],
            lambda L: asymptotics.s22_asy(S4, L, cfg.k), floor=2e-5)
        report["s22_fitted_rate"] = fit["fitted_rate"]
        print(f"s22 decay: fitted rate {fit['fitted_rate']:.3f} "
              "(empirical; no asserted value)")
    except ValueError as exc:
        report["s22_fit_error"] = str(exc)
        print(f"s22 decay fit unavailable: {exc}")
    _write_json(cfg, "asymptotic_report.json", report)
    return EXIT_OK


def _export_field(cfg: RunConfig, fieldobj, stem: str) -> None:
    mesh = fieldobj.mesh
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    ell = math.pi / cfg.k
    n_per_ell = 10
    xs = np.linspace(lo[0], hi[0],
                     max(2, int((hi[0] - lo[0]) / ell * n_per_ell) + 1))
    ys = np.linspace(lo[1], hi[1],
                     max(2, int((hi[1] - lo[1]) / ell * n_per_ell) + 1))
    Z = eval_on_grid(fieldobj, xs, ys).T  # (ny, nx)
    with open(_out_path(cfg, f"{stem}.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "y", "re", "im"])
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                w.writerow([f"{x:.12g}", f"{y:.12g}",
                            f"{Z[j, i].real:.12g}", f"{Z[j, i].imag:.12g}"])
    svgplot.heatmap(_out_path(cfg, f"{stem}_re.svg"), xs, ys, Z.real,
                    title=f"Re v ({stem})")
    svgplot.heatmap(_out_path(cfg, f"{stem}_im.svg"), xs, ys, Z.imag,
                    title=f"Im v ({stem})")


def cmd_solve_field(cfg: RunConfig) -> int:
    geom = cfg.geometry_at(cfg.L)
    pair, fieldobj = solve_full(geom, cfg.solve_options(), return_field=True)
    _export_field(cfg, fieldobj, f"field_L{cfg.L:.4f}")
    checks = remark_checks(fieldobj, pair)
    # scattered-field map Im(v - incident) per the invisibility remark
    mesh = fieldobj.mesh
    lo, hi = mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)
    xs = np.linspace(lo[0], hi[0], 121)
    ys = np.linspace(lo[1], hi[1], 61)
    Z = eval_on_grid(fieldobj, xs, ys).T  # (ny, nx)
    inc = np.exp(1j * cfg.k * xs)[np.newaxis, :] / math.sqrt(2.0 * cfg.k)
    svgplot.heatmap(_out_path(cfg, f"field_L{cfg.L:.4f}_scat.svg"),
                    xs, ys, (Z - inc).imag,
                    title="Im(v - incident)")
    print(f"L = {cfg.L}: R = {pair.R:.6f}, T = {pair.T:.6f}, "
          f"energy residual = {pair.energy_residual:.2e}")
    for key, value in checks.items():
        if value is not None:
            print(f"  {key} = {value:.3e}")
    _write_json(cfg, f"field_L{cfg.L:.4f}.json",
                {"R": [pair.R.real, pair.R.imag],
                 "T": [pair.T.real, pair.T.imag],
                 "energy_residual": pair.energy_residual,
                 "checks": checks})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wgscat",
                                description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--k", type=float)
    p.add_argument("--geometry", choices=("omega", "staircase"))
    p.add_argument("--L", type=float)
    p.add_argument("--heights", type=float, nargs="+",
                   help="staircase tail heights (ell-wide steps)")
    p.add_argument("--h", type=float, help="target mesh size")
    p.add_argument("--dtn-terms", type=int, dest="dtn_terms")
    p.add_argument("--range", type=float, nargs=2, dest="L_range",
                   metavar=("LMIN", "LMAX"))
    p.add_argument("--step", type=float)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    p.add_argument("--tol", type=float)
    p.add_argument("--margin-factor", type=float, dest="margin_factor")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("command", choices=("sweep-invisibility", "sweep-trapped",
                                       "limit-matrices", "asymptotic-compare",
                                       "solve-field"))
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(out=os.environ.get(OUT_ENV, "."))
    if args.config:
        with open(args.config) as f:
            data = json.load(f)
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise ValidationError(f"unknown config key {key!r}")
            if key in ("heights", "L_range"):
                value = tuple(value)
            setattr(cfg, key, value)
    for key in ("k", "geometry", "L", "heights", "h", "dtn_terms", "L_range",
                "step", "out", "tol", "margin_factor", "threads", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            if key in ("heights", "L_range"):
                value = tuple(value)
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


COMMANDS = {
    "sweep-invisibility": cmd_sweep_invisibility,
    "sweep-trapped": cmd_sweep_trapped,
    "limit-matrices": cmd_limit_matrices,
    "asymptotic-compare": cmd_asymptotic_compare,
    "solve-field": cmd_solve_field,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValidationError, GeometryError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](cfg)
    except (ValidationError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ExceptionalCaseError as exc:
        print(f"exceptional case: {exc}", file=sys.stderr)
        return EXIT_EXCEPTIONAL


if __name__ == "__main__":
    sys.exit(main())
