import xml.etree.ElementTree as ET

import pytest

from logpatch.svg import Figure, Panel, fmt, grid_step


@pytest.mark.parametrize(
    "x,want",
    [(0.1 + 0.2, "0.3"), (-0.0, "0"), (1 / 3, "0.333333333"), (123456789012.0, "1.23456789e+11"), (2, "2")],
)
def test_fmt_nine_digits(x, want):
    assert fmt(x) == want


def test_grid_step():
    assert grid_step(16) == 1.0
    assert grid_step(60) == 2.0
    assert grid_step(400) == 10.0
    assert grid_step(1e6) >= 1e6 / 40


def test_panel_window():
    with pytest.raises(ValueError):
        Panel("bad", (1, 0, 0, 1))
    with pytest.raises(ValueError):
        Panel("bad", (0, float("inf"), 0, 1))


def test_figure_needs_panels():
    with pytest.raises(ValueError):
        Figure([])


def test_render_is_valid_and_stable():
    def build():
        p = Panel("a < b & c", (-2, 2, -1, 3))
        p.polyline([(-2, -1), (0, 0), (2, 3)], "#123456", label="curve")
        p.polyline([(0, 0)])  # a single point draws nothing
        p.marker(0, 0)
        p.text(1, 1, "+")
        q = Panel("second", (0, 1, 0, 1), grid=False)
        q.polyline([(0, 0), (1, 0), (0, 1)], closed=True)
        return Figure([p, q]).render()

    a, b = build(), build()
    assert a == b
    root = ET.fromstring(a.encode())
    ns = "{http://www.w3.org/2000/svg}"
    assert root.tag == f"{ns}svg" and root.get("version") == "1.1"
    assert len(root.findall(f".//{ns}polyline")) == 1
    assert len(root.findall(f".//{ns}polygon")) == 1
    assert "a &lt; b &amp; c" in a
    # unit grid on the first panel only: 5 + 5 lines
    assert a.count('stroke="#dddddd"') + a.count('stroke="#888888"') == 10
