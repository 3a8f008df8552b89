import math
import xml.etree.ElementTree as ET

import numpy as np

from wgscat.svgplot import complex_locus, diverging_color, heatmap, line_plot


def parse(path):
    return ET.parse(path).getroot()


def test_diverging_color_endpoints():
    assert diverging_color(0.0) == "#2166ac"
    assert diverging_color(0.5) == "#f7f7f7"
    assert diverging_color(1.0) == "#b2182b"
    # out-of-range inputs clamp
    assert diverging_color(-5.0) == diverging_color(0.0)


def test_line_plot(tmp_path):
    path = tmp_path / "p.svg"
    xs = [0.1 * i for i in range(50)]
    line_plot(str(path), xs,
              [([math.sin(x) for x in xs], "#1f77b4", "sin"),
               ([math.cos(x) for x in xs], "#d62728", "cos")],
              ylabel="y", title="waves", markers=[2.5])
    root = parse(path)
    assert root.tag.endswith("svg")
    text = ET.tostring(root).decode()
    assert "sin" in text and "cos" in text and "waves" in text


def test_line_plot_deterministic(tmp_path):
    xs = list(range(10))
    ys = [x * x for x in xs]
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    line_plot(str(a), xs, [(ys, "#000000", "q")])
    line_plot(str(b), xs, [(ys, "#000000", "q")])
    assert a.read_bytes() == b.read_bytes()


def test_complex_locus(tmp_path):
    path = tmp_path / "locus.svg"
    vals = [complex(math.cos(t), math.sin(t))
            for t in np.linspace(0, 2 * math.pi, 40)]
    complex_locus(str(path), vals, overlays=((0j, 1.0), (0.5 + 0j, 0.5)),
                  title="unit circle")
    assert parse(path).tag.endswith("svg")


def test_heatmap_with_nan(tmp_path):
    path = tmp_path / "z.svg"
    xs = np.linspace(0, 1, 8)
    ys = np.linspace(0, 2, 12)
    Z = np.outer(ys, xs) - 0.5
    Z[0, 0] = np.nan
    heatmap(str(path), xs, ys, Z, title="field")
    text = ET.tostring(parse(path)).decode()
    assert "#cccccc" in text  # the NaN cell
