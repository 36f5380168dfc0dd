import math
from fractions import Fraction

import numpy as np
import pytest

from logpatch.corpus import bundled_corpus, ellipse_input, line_input, load_bundled
from logpatch.curves import PLCurve, TopologySummary
from logpatch.patchwork import (
    SignedPolynomial2,
    affine_extension,
    combinatorial_patchwork,
    polynomial_patchwork,
    projective_glue,
)
from logpatch.tracer import (
    StabilizationError,
    TraceWindow,
    auto_window,
    compare_topology,
    sign_field,
    stabilize_t,
    trace,
    trace_affine,
)

LINE = SignedPolynomial2.from_coefficients({(1, 0): 1.0, (0, 1): 1.0, (0, 0): -1.0})


@pytest.fixture(scope="module")
def ellipse_stable():
    return stabilize_t(ellipse_input(), 256)


class TestWindow:
    def test_validation(self):
        with pytest.raises(ValueError):
            TraceWindow(1, 0, 0, 1)
        with pytest.raises(ValueError):
            TraceWindow(0, 1, 0, 1, resolution=8)
        with pytest.raises(ValueError):
            TraceWindow(0, math.inf, 0, 1)

    def test_refined(self):
        w = TraceWindow.square(2, 32).refined()
        assert w.resolution == 64 and w.u_lo == -2


class TestSignField:
    def test_line_at_origin(self):
        w = TraceWindow(-1, 1, -1, 1, 16)
        f = sign_field(LINE, w)
        assert f.values[8, 8] == pytest.approx(math.log(2), abs=1e-15)
        assert f.signs[8, 8] == 1

    def test_diagonal_is_ambiguous(self):
        q = SignedPolynomial2.from_coefficients({(1, 0): 1.0, (0, 1): -1.0})
        f = sign_field(q, TraceWindow(-1, 1, -1, 1, 16))
        assert f.ambiguous == 17
        assert np.all(np.abs(np.diag(f.values)) < 1e-13)

    def test_ellipse_origin(self):
        q = polynomial_patchwork(ellipse_input(), 1e-3)
        f = sign_field(q, TraceWindow(-1, 1, -1, 1, 16))
        assert f.signs[8, 8] == 1
        want = math.log(2) - math.log(1e-3 + 1e-6 + 1e-9)
        assert f.values[8, 8] == pytest.approx(want, abs=1e-12)

    def test_needs_both_parts(self):
        q = SignedPolynomial2.from_coefficients({(1, 0): 1.0})
        with pytest.raises(ValueError):
            sign_field(q, TraceWindow(-1, 1, -1, 1, 16))

    @pytest.mark.parametrize("name,data", bundled_corpus()[:6])
    def test_agrees_with_exact_evaluation(self, name, data):
        q = polynomial_patchwork(data, 0.5)
        w = TraceWindow(-3, 3, -3, 3, 24)
        f = sign_field(q, w)
        for i in range(0, 25, 3):
            for j in range(0, 25, 3):
                if abs(f.values[i, j]) < 1e-9:
                    continue
                x, y = Fraction(math.exp(f.us[i])), Fraction(math.exp(f.vs[j]))
                exact = sum(
                    v.sign * Fraction(1, 2) ** int(v.nu) * x**v.k * y**v.l for v in data.vertices
                )
                assert (exact > 0) == (f.values[i, j] > 0)


class TestTrace:
    def test_line(self):
        rep = trace(LINE, TraceWindow.square(8, 256))
        assert rep.components == 1
        assert [c.side for c in rep.crossings] == ["S", "W"]
        bottom, left = rep.crossings
        assert abs(bottom.point[0]) < 1e-2 and abs(left.point[1]) < 1e-2
        (arc,) = rep.arcs
        u, v = arc[:, 0], arc[:, 1]
        keep = (u < -0.2) & (v < -0.2)
        assert np.max(np.abs(v[keep] - np.log1p(-np.exp(u[keep])))) < 0.05

    def test_empty_zero_set(self):
        q = SignedPolynomial2.from_signed_logs([((1, 0), 1, 0.0), ((0, 0), -1, 100.0)])
        rep = trace(q, TraceWindow.square(8, 64))
        assert rep.components == 0 and not rep.crossings

    def test_no_minus_part(self):
        q = SignedPolynomial2.from_coefficients({(1, 0): 1.0, (0, 0): 1.0})
        assert trace(q, TraceWindow.square(8, 32)).components == 0

    def test_closed_loop(self):
        # 1 - (x - 1)^2 - (y - 1)^2 scaled down: a circle-like oval near x = y = 1
        q = SignedPolynomial2.from_coefficients(
            {(0, 0): -1.99, (1, 0): 2.0, (0, 1): 2.0, (2, 0): -1.0, (0, 2): -1.0}
        )
        rep = trace(q, TraceWindow.square(2, 128))
        assert rep.components == 1 and len(rep.loops) == 1 and not rep.crossings

    def test_ellipse_at_stable_t(self, ellipse_stable):
        rep = ellipse_stable.report
        assert rep.components == 2
        assert [c.side for c in rep.crossings] == ["S", "S", "W", "W"]
        assert compare_topology(combinatorial_patchwork(ellipse_input()), rep).match


class TestStabilize:
    def test_line_settles_at_once(self):
        s = stabilize_t(line_input(), 128)
        assert s.log_t == pytest.approx(-4 * math.log(2))
        assert len(s.history) == 3
        assert s.report.components == 1

    def test_stable_under_squaring(self, ellipse_stable):
        data = ellipse_input()
        lt = 2 * ellipse_stable.log_t
        rep = trace(polynomial_patchwork(data, log_t=lt), auto_window(data, lt, 256))
        assert rep.summary() == ellipse_stable.report.summary()

    def test_gives_up(self):
        with pytest.raises(StabilizationError) as err:
            stabilize_t(ellipse_input(), 64, max_refinements=1, patience=3)
        assert len(err.value.history) == 2

    def test_two_step_agreement_can_be_premature(self):
        # one quadrant holds a single arc at t = 1/2 and 1/4, then splits in two
        data = load_bundled("random-07-deg2")
        early = stabilize_t(data, 256, patience=2)
        assert early.t == 0.25 and early.report.components == 1
        late = stabilize_t(data, 256)
        assert late.report.components == 2
        assert compare_topology(combinatorial_patchwork(data), late.report).match

    def test_patience_floor(self):
        with pytest.raises(ValueError):
            stabilize_t(line_input(), 64, patience=1)

    def test_window_covers_envelope(self):
        w = auto_window(ellipse_input(), -math.log(4), 64)
        assert w.u_hi >= 3 * math.log(4)

    def test_refinement_is_monotone(self, ellipse_stable):
        for name, data in bundled_corpus()[:6]:
            s = stabilize_t(data, 128)
            q = polynomial_patchwork(data, log_t=s.log_t)
            w = s.report.window
            assert trace(q, w.refined()).components >= s.report.components, name


class TestCompare:
    def test_flipped_sign_mismatch(self, ellipse_stable):
        data = ellipse_input()
        flipped = data.with_signs({**data.signs(), (0, 0): 1})
        result = compare_topology(combinatorial_patchwork(flipped), ellipse_stable.report)
        assert not result.match
        assert any("component count" in r for r in result.reasons)

    def test_empty_vs_empty(self):
        empty = PLCurve((), degree=1)
        assert compare_topology(empty, TopologySummary(0, ())).match

    def test_rotation_invariant(self):
        a = TopologySummary(2, (("S", 0), ("S", 1), ("W", 1), ("W", 0)))
        b = TopologySummary(2, (("W", 1), ("W", 0), ("S", 0), ("S", 1)))
        assert compare_topology(a, b).match
        c = TopologySummary(2, (("S", 0), ("S", 0), ("W", 1), ("W", 1)))
        assert not compare_topology(a, c).match


class TestAffineTrace:
    def test_ellipse_oval(self):
        data = ellipse_input()
        s = stabilize_t(data, 128, affine=True)
        rep = s.report
        assert rep.glue_ok
        assert (rep.components, rep.ovals, rep.pseudolines) == (1, 1, 0)
        ext = combinatorial_patchwork(affine_extension(data))
        assert compare_topology(ext, rep).match
        assert compare_topology(projective_glue(ext).summary(), rep.projective_summary()).match

    def test_line_pseudoline(self):
        data = line_input()
        q = polynomial_patchwork(data, 0.25)
        rep = trace_affine(q, auto_window(data, math.log(0.25), 128))
        assert (rep.ovals, rep.pseudolines) == (0, 1)
