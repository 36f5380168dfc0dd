from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from logpatch.corpus import ellipse_input, lower_hull_cells, random_convex_input
from logpatch.envelope import (
    AffinePlane,
    build_envelope,
    check_genericity,
    convex_hull,
    dual_subdivision,
    separating_line,
)
from logpatch.patchwork import combinatorial_patchwork, envelope_planes

F = Fraction


def planes(*triples):
    return [AffinePlane(k, l, F(c)) for k, l, c in triples]


def area(poly):
    return abs(sum(a[0] * b[1] - a[1] * b[0] for a, b in zip(poly, poly[1:] + poly[:1]))) / 2


def random_arrangement(rng, n, spread=4, lattice=4):
    pts = set()
    while len(pts) < n:
        pts.add((int(rng.integers(0, lattice + 1)), int(rng.integers(0, lattice + 1))))
    return [AffinePlane(k, l, F(int(rng.integers(-spread, spread + 1)), int(rng.integers(1, 4)))) for k, l in sorted(pts)]


BASIC = planes((0, 0, 0), (1, 0, 0), (0, 1, 0))
SQUARE = planes((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))
DELTA2 = planes((0, 0, -1), (1, 0, 0), (0, 1, 0), (2, 0, -2), (0, 2, -3))


class TestBuild:
    def test_single_plane(self):
        e = build_envelope(planes((0, 0, 0)))
        assert len(e.faces) == 1 and not e.vertices and not e.edges
        assert check_genericity(e).ok

    def test_three_planes(self):
        e = build_envelope(BASIC)
        assert [v.point for v in e.vertices] == [(0, 0)]
        assert len(e.faces) == 3 and len(e.edges) == 3
        assert {x.kind for x in e.edges} == {"ray"}
        assert {x.direction for x in e.edges} == {(1, 1), (-1, 0), (0, -1)}
        assert e.euler_characteristic == 1

    def test_four_planes_through_origin(self):
        e = build_envelope(SQUARE)
        (v,) = e.vertices
        assert v.point == (0, 0) and len(v.active) == 4 and len(e.faces) == 4

    def test_hidden_plane(self):
        # u never beats max(0, 2u)
        e = build_envelope(planes((0, 0, 0), (2, 0, 0), (0, 2, 0), (1, 0, -1)))
        assert e.hidden == (3,)

    def test_collinear_slopes(self):
        e = build_envelope(planes((0, 0, 0), (1, 0, -1), (2, 0, 0)))
        assert not e.vertices
        assert e.hidden == (1,)
        assert [x.kind for x in e.edges] == ["line"]
        assert e.edges[0].start == (0, 0)

    def test_rejects_duplicates_and_empty(self):
        with pytest.raises(ValueError):
            build_envelope([])
        with pytest.raises(ValueError):
            build_envelope(planes((0, 0, 0), (0, 0, 1)))

    def test_convex_hull_drops_collinear(self):
        assert convex_hull([(0, 0), (1, 0), (2, 0), (0, 2), (1, 1)]) == [(0, 0), (2, 0), (0, 2)]


class TestGenericity:
    def test_examples(self):
        assert check_genericity(build_envelope(BASIC)).ok
        bad = check_genericity(build_envelope(SQUARE))
        assert not bad.ok
        assert bad.violations == (((0, 0), (0, 1, 2, 3)),)


class TestDual:
    def test_basic(self):
        assert dual_subdivision(build_envelope(BASIC)).cell_set() == {frozenset({(0, 0), (1, 0), (0, 1)})}

    def test_square(self):
        assert dual_subdivision(build_envelope(SQUARE)).cell_set() == {
            frozenset({(0, 0), (1, 0), (1, 1), (0, 1)})
        }

    def test_delta2_certificate(self):
        cells = dual_subdivision(build_envelope(DELTA2)).cell_set()
        heights = {(0, 0): 1, (1, 0): 0, (0, 1): 0, (2, 0): 2, (0, 2): 3}
        assert cells == lower_hull_cells(heights)
        assert cells == {
            frozenset({(0, 0), (1, 0), (0, 1)}),
            frozenset({(1, 0), (2, 0), (0, 1)}),
            frozenset({(2, 0), (0, 2), (0, 1)}),
        }

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_lower_hull_oracle(self, seed):
        # coincidences are likely with few small heights, which exercises non-generic cells
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 5))
        pts = [(k, l) for k in range(m + 1) for l in range(m + 1 - k)]
        heights = {p: F(int(rng.integers(0, 4))) for p in pts}
        e = build_envelope([AffinePlane(k, l, -h) for (k, l), h in heights.items()])
        slopes = [p.slope for p in e.planes]
        active = {frozenset(slopes[i] for i in v.active) for v in e.vertices}
        assert active == lower_hull_cells(heights)

    @pytest.mark.parametrize("seed", range(10))
    def test_reproduces_triangulation(self, seed):
        data = random_convex_input(int(np.random.default_rng(seed).integers(1, 6)), np.random.default_rng(seed))
        cells = dual_subdivision(build_envelope(envelope_planes(data))).cell_set()
        assert cells == {frozenset(data.point(i) for i in t) for t in data.triangles}


@pytest.mark.parametrize("seed", range(20))
def test_value_and_convexity(seed):
    rng = np.random.default_rng(100 + seed)
    arr = random_arrangement(rng, int(rng.integers(1, 9)))
    e = build_envelope(arr)
    probes = [(F(int(a), 3), F(int(b), 2)) for a, b in rng.integers(-12, 13, size=(12, 2))]
    for u, v in probes:
        assert e.value(u, v) == max(k.k * u + k.l * v + k.c for k in arr)
    for (p, q), lam in product(zip(probes, probes[1:]), (F(1, 4), F(1, 2), F(3, 4))):
        mid = (lam * p[0] + (1 - lam) * q[0], lam * p[1] + (1 - lam) * q[1])
        assert e.value(*mid) <= lam * e.value(*p) + (1 - lam) * e.value(*q)


@pytest.mark.parametrize("seed", range(20))
def test_faces_have_area_and_hidden_planes_do_not(seed):
    rng = np.random.default_rng(200 + seed)
    arr = random_arrangement(rng, int(rng.integers(2, 9)))
    e = build_envelope(arr)
    reach = max([abs(c) for v in e.vertices for c in v.point] + [F(0)]) + 10
    for x in e.edges:
        reach = max(reach, abs(x.start[0]) + 10, abs(x.start[1]) + 10)
    box = (-reach, reach, -reach, reach)
    visible = {f.plane for f in e.faces}
    for n in range(len(arr)):
        assert (area(e.face_polygon(n, box)) > 0) == (n in visible)
    assert visible.isdisjoint(e.hidden)


@pytest.mark.parametrize("seed", range(15))
def test_euler_on_generic_envelopes(seed):
    data = random_convex_input(int(np.random.default_rng(seed).integers(2, 5)), np.random.default_rng(300 + seed))
    e = build_envelope(envelope_planes(data))
    assert check_genericity(e).ok
    assert e.euler_characteristic == 1


class TestSeparatingLine:
    def test_line(self):
        c = separating_line(build_envelope(BASIC), {0: -1, 1: 1, 2: 1})
        (arc,) = c.arcs
        assert arc.points == ((0, 0),)
        assert {arc.start_dir, arc.end_dir} == {(-1, 0), (0, -1)}

    def test_one_class(self):
        assert separating_line(build_envelope(BASIC), [1, 1, 1]).is_empty()

    def test_ellipse(self):
        data = ellipse_input()
        e = build_envelope(envelope_planes(data))
        c = separating_line(e, [v.sign for v in data.vertices])
        assert len(c.arcs) == 2 and not c.loops
        assert all(a.start_dir and a.end_dir for a in c.arcs)
        assert c.summary() == combinatorial_patchwork(data).summary()

    def test_branching_rejected(self):
        with pytest.raises(ValueError):
            separating_line(build_envelope(SQUARE), [1, -1, -1, 1])

    def test_missing_class(self):
        with pytest.raises(ValueError):
            separating_line(build_envelope(BASIC), {0: 1})

    @pytest.mark.parametrize("seed", range(20))
    def test_edges_dual_to_mixed_triangulation_edges(self, seed):
        rng = np.random.default_rng(400 + seed)
        data = random_convex_input(int(rng.integers(1, 6)), rng)
        e = build_envelope(envelope_planes(data))
        split = [v.sign for v in data.vertices]
        curve = separating_line(e, split)

        mixed = set()
        for t in data.triangles:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                if split[a] != split[b]:
                    mixed.add(frozenset((data.point(a), data.point(b))))
        slopes = [p.slope for p in e.planes]
        segs = {frozenset(s) for s in curve.segments()}
        rays = {(a.points[0], a.start_dir) for a in curve.arcs if a.start_dir}
        rays |= {(a.points[-1], a.end_dir) for a in curve.arcs if a.end_dir}
        got = set()
        for x in e.edges:
            key = frozenset((x.start, x.end)) if x.kind == "segment" else (x.start, x.direction)
            if key in segs or key in rays:
                got.add(frozenset(slopes[f] for f in x.faces))
        assert got == mixed
        assert len(segs) + len(rays) == len(mixed)
        assert curve.summary() == combinatorial_patchwork(data).summary()
