import json
import math
import xml.etree.ElementTree as ET
from fractions import Fraction
from importlib import resources

import pytest

from logpatch.cli import main
from logpatch.corpus import bundled_corpus, ellipse_input, load_bundled
from logpatch.patchwork import InputError
from logpatch.schemas import input_from_json, input_to_json, parse_rational, validate_report

DATA = resources.files("logpatch") / "data"
ELLIPSE = str(DATA / "ellipse.json")
LINE = str(DATA / "line.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() else None
    return code, report, err


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


NONCONVEX = {
    "degree": 2,
    "vertices": [
        {"k": 0, "l": 0, "sign": "-", "nu": 0},
        {"k": 1, "l": 0, "sign": "+", "nu": 0},
        {"k": 0, "l": 1, "sign": "+", "nu": 0},
        {"k": 2, "l": 0, "sign": "-", "nu": 0},
        {"k": 0, "l": 2, "sign": "-", "nu": "3"},
    ],
    "triangles": [[0, 1, 2], [1, 3, 2], [3, 4, 2]],
}


class TestGraph:
    def test_one_plus_x(self, capsys, tmp_path):
        svg = tmp_path / "g.svg"
        code, rep, _ = run(capsys, "graph", "--poly", "1+x", "--window", "-8:8", "--out", str(svg))
        assert code == 0
        (panel,) = rep["panels"]
        assert panel["corners"] == [0.0]
        assert panel["max_gap"] == pytest.approx(math.log(2), abs=1e-12)
        root = ET.fromstring(svg.read_bytes())
        assert root.get("version") == "1.1"

    def test_single_monomial(self, capsys):
        code, rep, _ = run(capsys, "graph", "--poly", "1")
        assert code == 0
        assert rep["panels"][0]["max_gap"] == 0.0 and rep["panels"][0]["corners"] == []

    def test_scaled_within_bound(self, capsys):
        code, rep, _ = run(capsys, "graph", "--poly", "1+x", "--h", "0.25")
        (scaled,) = rep["panels"][0]["scaled"]
        assert scaled["max_gap"] <= 0.25 * math.log(2) + 1e-12

    @pytest.mark.parametrize("poly,term", [("1-x", "x"), ("x^2+0x+1", "x"), ("-1+x^3", "constant term")])
    def test_nonpositive_coefficient(self, capsys, poly, term):
        code, rep, err = run(capsys, "graph", "--poly", poly)
        assert code == 2 and rep is None
        assert f"coefficient of {term} is" in err

    def test_bad_h(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["graph", "--poly", "1+x", "--h", "2"])
        assert e.value.code == 2

    def test_svg_is_deterministic(self, capsys, tmp_path):
        paths = [tmp_path / "a.svg", tmp_path / "b.svg"]
        for p in paths:
            main(["graph", "--poly", "1+e^5x+x^2", "--h", "0.5", "--out", str(p)])
        capsys.readouterr()
        a, b = (p.read_bytes() for p in paths)
        assert a == b
        text = a.decode()
        assert "<polyline" in text and "stroke-dasharray" in text
        # unit gridlines: 17 vertical lines on [-8, 8] plus at least as many horizontal
        assert text.count('stroke="#dddddd"') + text.count('stroke="#888888"') > 30


class TestPatchwork:
    def test_check(self, capsys, tmp_path):
        code, rep, _ = run(capsys, "patchwork", ELLIPSE, "--stage", "check", "--out", str(tmp_path / "c.svg"))
        assert code == 0 and rep["convex"] and rep["generic"]
        ET.parse(tmp_path / "c.svg")

    def test_curve(self, capsys, tmp_path):
        code, rep, _ = run(capsys, "patchwork", ELLIPSE, "--stage", "curve", "--out", str(tmp_path / "c.svg"))
        assert code == 0
        assert rep["curve"]["arcs"] == [[["1/2", "0"], ["0", "1/2"]], [["3/2", "0"], ["1", "1/2"], ["0", "3/2"]]]

    def test_poly(self, capsys):
        code, rep, _ = run(capsys, "patchwork", ELLIPSE, "--stage", "poly", "--t", "0.001")
        assert code == 0
        assert rep["symbolic"] == "-t + x + y - t^2*x^2 - t^3*y^2"
        assert rep["numeric"] == "-0.001 + x + y - 1e-06*x^2 - 1e-09*y^2"

    def test_all_plus_single_triangle(self, capsys, tmp_path):
        doc = {
            "degree": 1,
            "vertices": [{"k": 0, "l": 0, "sign": "+", "nu": 0}, {"k": 1, "l": 0, "sign": "+", "nu": 0}, {"k": 0, "l": 1, "sign": "+", "nu": 0}],
            "triangles": [[0, 1, 2]],
        }
        code, rep, _ = run(capsys, "patchwork", write(tmp_path, "p.json", doc), "--stage", "curve")
        assert code == 0 and rep["curve"]["arcs"] == [] and rep["curve"]["summary"]["components"] == 0

    def test_affine_and_projective(self, capsys, tmp_path):
        code, rep, _ = run(capsys, "patchwork", ELLIPSE, "--stage", "affine", "--out", str(tmp_path / "a.svg"))
        assert code == 0 and len(rep["vertices"]) == 9
        code, rep, _ = run(capsys, "patchwork", ELLIPSE, "--stage", "projective")
        assert rep["components"] == ["oval"]
        code, rep, _ = run(capsys, "patchwork", LINE, "--stage", "projective")
        assert rep["components"] == ["pseudoline"]

    def test_nonconvex(self, capsys, tmp_path):
        path = write(tmp_path, "n.json", NONCONVEX)
        code, rep, err = run(capsys, "patchwork", path, "--stage", "poly", "--t", "0.5")
        assert code == 3
        assert rep["convexity_failures"] == [{"edge": [[1, 0], [0, 1]], "slack": "0"}]
        assert "(1, 0)-(0, 1)" in err
        code, rep, _ = run(capsys, "patchwork", path, "--stage", "check")
        assert code == 3 and not rep["convex"]
        # the combinatorial stages do not need the certificate
        code, _, _ = run(capsys, "patchwork", path, "--stage", "curve")
        assert code == 0

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.pop("triangles"),
            lambda d: d["vertices"][0].update(sign="0"),
            lambda d: d["vertices"][0].update(nu="1/0"),
            lambda d: d["vertices"][0].update(nu=-1),
            lambda d: d["vertices"][0].update(k=5),
            lambda d: d.update(extra=1),
            lambda d: d["triangles"].pop(),
        ],
    )
    def test_schema_and_structure_errors(self, capsys, tmp_path, mutate):
        doc = json.loads(json.dumps(NONCONVEX))
        mutate(doc)
        code, rep, err = run(capsys, "patchwork", write(tmp_path, "bad.json", doc))
        assert code == 2 and rep is None and err

    def test_unreadable(self, capsys, tmp_path):
        assert run(capsys, "patchwork", str(tmp_path / "missing.json"))[0] == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert run(capsys, "patchwork", str(bad))[0] == 2

    def test_json_copy(self, capsys, tmp_path):
        out = tmp_path / "r.json"
        code, rep, _ = run(capsys, "patchwork", ELLIPSE, "--stage", "curve", "--json", str(out))
        assert json.loads(out.read_text()) == rep


class TestVerify:
    @pytest.mark.parametrize("path", [ELLIPSE, LINE])
    def test_match(self, capsys, tmp_path, path):
        out, fig = tmp_path / "v.json", tmp_path / "v.svg"
        code, rep, _ = run(capsys, "verify", path, "--resolution", "256", "--out", str(out), "--figure", str(fig))
        assert code == 0 and rep["match"]
        assert json.loads(out.read_text()) == rep
        ET.parse(fig)

    def test_ellipse_counts(self, capsys):
        _, rep, _ = run(capsys, "verify", ELLIPSE, "--resolution", "256")
        assert rep["quadrant"]["traced"]["components"] == 2
        assert rep["projective"]["traced"]["ovals"] == 1

    def test_nonconvex_refused(self, capsys, tmp_path):
        code, _, _ = run(capsys, "verify", write(tmp_path, "n.json", NONCONVEX))
        assert code == 3

    def test_unsettled_is_mismatch(self, capsys):
        code, rep, err = run(capsys, "verify", ELLIPSE, "--resolution", "64", "--max-refinements", "1", "--patience", "3")
        assert code == 4 and rep["kind"] == "stabilization"
        validate_report(rep)


class TestRoots:
    def test_quadratic(self, capsys, tmp_path):
        svg = tmp_path / "r.svg"
        code, rep, _ = run(capsys, "roots", "--poly", "x^2-3x+2", "--out", str(svg))
        assert code == 0
        assert [r["x"] for r in rep["roots"]] == pytest.approx([1.0, 2.0], rel=1e-11)
        assert svg.read_text().count("<circle") == 2

    def test_linear(self, capsys):
        _, rep, _ = run(capsys, "roots", "--poly", "x-1")
        assert [r["x"] for r in rep["roots"]] == pytest.approx([1.0], rel=1e-12)

    def test_positive_polynomial(self, capsys):
        code, rep, err = run(capsys, "roots", "--poly", "x^2+1")
        assert code == 2 and "no sign change" in err

    def test_negative_roots(self, capsys):
        _, rep, _ = run(capsys, "roots", "--poly", "x^2+3x+2", "--negative")
        assert sorted(r["x"] for r in rep["roots"]) == pytest.approx([-2.0, -1.0], rel=1e-11)

    def test_all_negative_coefficients(self, capsys):
        _, rep, _ = run(capsys, "roots", "--poly", "-x^2+3x-2", "--window", "-2:2")
        assert [r["x"] for r in rep["roots"]] == pytest.approx([1.0, 2.0], rel=1e-11)


class TestSchemas:
    @pytest.mark.parametrize("name,data", bundled_corpus()[:4])
    def test_round_trip(self, name, data):
        assert input_from_json(json.loads(json.dumps(input_to_json(data)))) == data

    def test_bundled_files_match_generator(self):
        for name, data in bundled_corpus():
            assert load_bundled(name) == data

    @pytest.mark.parametrize("text,want", [("3/2", Fraction(3, 2)), (" 4 / 6 ", Fraction(2, 3)), ("0.25", Fraction(1, 4)), (7, Fraction(7))])
    def test_rationals(self, text, want):
        assert parse_rational(text) == want

    def test_rational_rejects(self):
        with pytest.raises(InputError):
            parse_rational("1/0")
        with pytest.raises(InputError):
            parse_rational(True)

    def test_signs_accept_unicode_minus(self):
        doc = input_to_json(ellipse_input())
        doc["vertices"][0]["sign"] = "−"
        assert input_from_json(doc) == ellipse_input()
