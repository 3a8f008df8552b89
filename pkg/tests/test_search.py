import csv
import json
import math

import numpy as np
import pytest

from wgscat.search import (
    QUANTITIES,
    TARGETS,
    PeakSet,
    SweepRecord,
    detect_peaks,
    evaluate,
    find_peaks,
    peaks_to_json,
    refine,
    spacing_stats,
    sweep,
    write_csv,
)

K = 0.8 * math.pi
ELL = math.pi / K


def test_targets_cover_quantities():
    assert set(TARGETS) == set(QUANTITIES)
    for t in TARGETS.values():
        assert abs(abs(t) - 1.0) < 1e-15


def test_evaluate_rejects_unknown_quantity():
    with pytest.raises(ValueError):
        evaluate("X", K, 2.0)


def test_sweep_record_sharpness():
    rec = SweepRecord(L=2.0, value=1.0 + 1e-4j, quantity="T")
    assert rec.distance == pytest.approx(1e-4)
    assert rec.sharpness == pytest.approx(-math.log(1e-4))


def test_detect_and_refine_synthetic():
    """|cos(KL) + 1| has sharp minima at odd multiples of pi/K."""
    def fn(L):
        return complex(math.cos(K * L))

    Ls = np.arange(0.2, 7.0, 0.05)
    records = [SweepRecord(L=float(L), value=fn(L), quantity="s22")
               for L in Ls]
    idx = detect_peaks(records)
    assert len(idx) == 3  # L = pi/K, 3 pi/K, 5 pi/K in (0.2, 7.0)
    i = idx[0]
    L_star, resid = refine(fn, -1.0, records[i - 1].L, records[i + 1].L,
                           tol_L=1e-6)
    assert L_star == pytest.approx(math.pi / K, abs=1e-5)
    assert resid < 1e-9


def test_spacing_stats_arithmetic():
    peaks = PeakSet(quantity="T", k=K, locations=[1.0, 2.5, 4.0, 5.5],
                    residuals=[0.0] * 4)
    stats = spacing_stats(peaks, predicted=1.5)
    assert stats.mean == pytest.approx(1.5)
    assert stats.std == pytest.approx(0.0, abs=1e-14)
    assert stats.relative_error < 1e-14
    with pytest.raises(ValueError):
        spacing_stats(PeakSet(quantity="T", k=K, locations=[1.0]), 1.5)


def test_write_csv_roundtrip(tmp_path):
    records = [SweepRecord(L=1.5, value=0.25 - 0.75j, quantity="R"),
               SweepRecord(L=1.55, value=0.5 + 0.5j, quantity="R")]
    path = tmp_path / "sweep.csv"
    write_csv(records, str(path))
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 2
    assert float(rows[0]["re_value"]) == 0.25
    assert float(rows[0]["distance"]) == pytest.approx(records[0].distance)
    assert rows[1]["quantity"] == "R"


def test_peaks_to_json():
    peaks = PeakSet(quantity="s22", k=K, locations=[2.55], residuals=[1e-5])
    rec = json.loads(peaks_to_json(peaks, {"step": 0.02}))
    assert rec["quantity"] == "s22"
    assert rec["config"]["step"] == 0.02


def test_safe_evaluate_skips_failed_points():
    """L below the duct height is invalid; the sweep drops that point."""
    with pytest.warns(UserWarning, match="failed"):
        records = sweep("T", K, [0.5, 2.0], h=ELL / 8)
    assert [r.L for r in records] == [2.0]


def test_find_peaks_fem_trapped():
    peaks = find_peaks("s22", K, (2.45, 2.65), step=0.05, h=ELL / 16,
                       tol_L=1e-3)
    assert len(peaks.locations) == 1
    assert peaks.locations[0] == pytest.approx(2.552, abs=0.01)
    assert peaks.residuals[0] < 1e-3
