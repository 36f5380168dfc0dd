"""Upper envelopes of planes ``w = k u + l v + c`` with integer slopes.

Everything here is exact over :class:`fractions.Fraction`.  The envelope is
built directly in the (u, v)-plane: candidate vertices come from triples of
planes, a candidate survives when no plane lies above it, and the faces,
edges and rays around each vertex are read off from the convex hull of the
slopes ``(k, l)`` of the planes that are maximal there.  Nothing in this
module lifts points and takes a lower hull; that route is kept separate so
the two can check each other.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Mapping, Sequence

from .curves import Arc, PLCurve

__all__ = [
    "AffinePlane",
    "Vertex",
    "Edge",
    "Face",
    "Envelope",
    "GenericityReport",
    "DualSubdivision",
    "build_envelope",
    "check_genericity",
    "dual_subdivision",
    "separating_line",
    "convex_hull",
]

Point = tuple[Fraction, Fraction]
Lattice = tuple[int, int]


@dataclass(frozen=True)
class AffinePlane:
    k: int
    l: int
    c: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", Fraction(self.c))

    def __call__(self, u, v) -> Fraction:
        return self.k * u + self.l * v + self.c

    @property
    def slope(self) -> Lattice:
        return (self.k, self.l)


@dataclass(frozen=True)
class Vertex:
    point: Point
    value: Fraction
    active: tuple[int, ...]  # every plane attaining the max here
    faces: tuple[int, ...]  # planes with a 2-d face here, counter-clockwise in (k, l)


@dataclass(frozen=True)
class Edge:
    """Common boundary of two faces.

    ``kind`` is ``"segment"`` (``start`` to ``end``), ``"ray"`` (from ``start``
    along ``direction``) or ``"line"`` (through ``start``, both ways along
    ``direction``).
    """

    faces: tuple[int, int]
    kind: str
    start: Point
    end: Point | None = None
    direction: tuple[int, int] | None = None
    vertices: tuple[int, ...] = ()


@dataclass(frozen=True)
class Face:
    plane: int
    vertices: tuple[int, ...]
    bounded: bool


@dataclass(frozen=True)
class Envelope:
    planes: tuple[AffinePlane, ...]
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    faces: tuple[Face, ...]
    hidden: tuple[int, ...]

    def value(self, u, v) -> Fraction:
        u, v = Fraction(u), Fraction(v)
        return max(p(u, v) for p in self.planes)

    def face_of(self, plane: int) -> Face | None:
        for f in self.faces:
            if f.plane == plane:
                return f
        return None

    def face_polygon(self, plane: int, box: tuple[Fraction, Fraction, Fraction, Fraction]) -> list[Point]:
        """Region where ``plane`` is maximal, clipped to ``(u0, u1, v0, v1)``."""
        u0, u1, v0, v1 = (Fraction(x) for x in box)
        poly: list[Point] = [(u0, v0), (u1, v0), (u1, v1), (u0, v1)]
        p = self.planes[plane]
        for j, q in enumerate(self.planes):
            if j == plane or not poly:
                continue
            # keep p - q >= 0
            a, b, c = p.k - q.k, p.l - q.l, p.c - q.c
            poly = _clip(poly, a, b, c)
        return poly

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)


def _clip(poly: list[Point], a, b, c) -> list[Point]:
    out: list[Point] = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] + c
        fq = a * q[0] + b * q[1] + c
        if fp >= 0:
            out.append(p)
        if (fp > 0 and fq < 0) or (fp < 0 and fq > 0):
            s = fp / (fp - fq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    return out


def _cross(o: Lattice, a: Lattice, b: Lattice) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[Lattice]) -> list[Lattice]:
    """Extreme points in counter-clockwise order (monotone chain, collinear dropped)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Lattice] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Lattice] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _primitive(d: tuple[int, int]) -> tuple[int, int]:
    g = gcd(d[0], d[1])
    return (d[0] // g, d[1] // g)


def build_envelope(planes: Sequence[AffinePlane]) -> Envelope:
    """Face, edge and vertex structure of ``max_i (k_i u + l_i v + c_i)``."""
    planes = tuple(planes)
    if not planes:
        raise ValueError("need at least one plane")
    slopes = [p.slope for p in planes]
    if len(set(slopes)) != len(slopes):
        raise ValueError("slopes (k, l) must be distinct")
    if len(planes) == 1:
        return Envelope(planes, (), (), (Face(0, (), False),), ())

    if len(convex_hull(slopes)) <= 2 and _all_collinear(slopes):
        return _collinear_envelope(planes)

    found: dict[Point, Vertex] = {}
    for i, j, q in combinations(range(len(planes)), 3):
        a, b, c = planes[i], planes[j], planes[q]
        a1, b1, r1 = a.k - b.k, a.l - b.l, b.c - a.c
        a2, b2, r2 = a.k - c.k, a.l - c.l, c.c - a.c
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        u = Fraction(r1 * b2 - r2 * b1, det)
        v = Fraction(a1 * r2 - a2 * r1, det)
        if (u, v) in found:
            continue
        w = a(u, v)
        values = [p(u, v) for p in planes]
        if max(values) > w:
            continue
        active = tuple(n for n, x in enumerate(values) if x == w)
        hull = convex_hull([slopes[n] for n in active])
        by_slope = {slopes[n]: n for n in active}
        found[(u, v)] = Vertex((u, v), w, active, tuple(by_slope[s] for s in hull))

    vertices = tuple(found[p] for p in sorted(found))
    ends: dict[tuple[int, int], list[tuple[int, tuple[int, int]]]] = defaultdict(list)
    for vi, vx in enumerate(vertices):
        ring = vx.faces
        for n in range(len(ring)):
            fa, fb = ring[n], ring[(n + 1) % len(ring)]
            ex = slopes[fb][0] - slopes[fa][0]
            ey = slopes[fb][1] - slopes[fa][1]
            # outward normal of a counter-clockwise hull edge
            ends[tuple(sorted((fa, fb)))].append((vi, _primitive((ey, -ex))))

    edges = []
    for pair in sorted(ends):
        e = ends[pair]
        if len(e) == 2:
            (v0, _), (v1, _) = sorted(e)
            edges.append(Edge(pair, "segment", vertices[v0].point, vertices[v1].point, None, (v0, v1)))
        elif len(e) == 1:
            v0, d = e[0]
            edges.append(Edge(pair, "ray", vertices[v0].point, None, d, (v0,)))
        else:  # pragma: no cover - impossible for a convex envelope
            raise AssertionError(f"faces {pair} share {len(e)} edge ends")

    touching: dict[int, list[int]] = defaultdict(list)
    for vi, vx in enumerate(vertices):
        for f in vx.faces:
            touching[f].append(vi)
    unbounded = {f for e in edges if e.kind != "segment" for f in e.faces}
    faces = tuple(
        Face(f, tuple(touching[f]), f not in unbounded) for f in sorted(touching)
    )
    hidden = tuple(n for n in range(len(planes)) if n not in touching)
    return Envelope(planes, vertices, tuple(edges), faces, hidden)


def _all_collinear(slopes: Sequence[Lattice]) -> bool:
    o, a = slopes[0], slopes[1]
    return all(_cross(o, a, s) == 0 for s in slopes[2:])


def _collinear_envelope(planes: tuple[AffinePlane, ...]) -> Envelope:
    # slopes o + s*g; the envelope is o.(u,v) + max_i (s_i * tau + c_i), tau = g.(u,v)
    slopes = [p.slope for p in planes]
    o = min(slopes)
    g = _primitive((max(slopes)[0] - o[0], max(slopes)[1] - o[1]))
    step = [((s[0] - o[0]) // g[0] if g[0] else (s[1] - o[1]) // g[1]) for s in slopes]
    order = sorted(range(len(planes)), key=lambda n: step[n])
    hull: list[int] = []
    for n in order:
        while hull:
            m = hull[-1]
            if planes[n].c >= planes[m].c and step[n] == step[m]:
                hull.pop()
                continue
            if len(hull) >= 2:
                p0 = hull[-2]
                lhs = (planes[p0].c - planes[m].c) * (step[n] - step[m])
                rhs = (planes[m].c - planes[n].c) * (step[m] - step[p0])
                if lhs >= rhs:
                    hull.pop()
                    continue
            break
        hull.append(n)
    gg = g[0] * g[0] + g[1] * g[1]
    edges = []
    for a, b in zip(hull, hull[1:]):
        tau = Fraction(planes[a].c - planes[b].c, step[b] - step[a])
        point = (tau * g[0] / gg, tau * g[1] / gg)
        edges.append(Edge(tuple(sorted((a, b))), "line", point, None, (-g[1], g[0])))
    faces = tuple(Face(n, (), False) for n in sorted(hull))
    hidden = tuple(n for n in range(len(planes)) if n not in hull)
    return Envelope(planes, (), tuple(edges), faces, hidden)


@dataclass(frozen=True)
class GenericityReport:
    ok: bool
    violations: tuple[tuple[Point, tuple[int, ...]], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_genericity(e: Envelope) -> GenericityReport:
    """Every vertex must have exactly three maximal planes."""
    bad = tuple((v.point, v.active) for v in e.vertices if len(v.active) != 3)
    return GenericityReport(not bad, bad)


@dataclass(frozen=True)
class DualSubdivision:
    cells: tuple[tuple[Lattice, ...], ...]
    edges: frozenset[frozenset[Lattice]]

    def cell_set(self) -> set[frozenset[Lattice]]:
        return {frozenset(c) for c in self.cells}


def dual_subdivision(e: Envelope) -> DualSubdivision:
    """Envelope vertices become cells, edges become lattice segments."""
    slope = [p.slope for p in e.planes]
    cells = tuple(sorted(tuple(slope[f] for f in v.faces) for v in e.vertices))
    edges = frozenset(frozenset((slope[a], slope[b])) for a, b in (x.faces for x in e.edges))
    return DualSubdivision(cells, edges)


def separating_line(e: Envelope, split: Mapping[int, int] | Sequence[int]) -> PLCurve:
    """Union of envelope edges between faces of opposite class, as paths and loops.

    ``split`` gives ``+1`` or ``-1`` per plane index (a mapping or a sequence
    aligned with ``e.planes``).  Branching, possible only without genericity,
    raises ``ValueError``.
    """
    sign = dict(split) if isinstance(split, Mapping) else dict(enumerate(split))
    for f in e.faces:
        if sign.get(f.plane) not in (1, -1):
            raise ValueError(f"face of plane {f.plane} has no class")
    cut = [x for x in e.edges if sign[x.faces[0]] != sign[x.faces[1]]]

    arcs: list[Arc] = []
    for x in cut:
        if x.kind == "line":
            d = x.direction
            arcs.append(Arc((x.start,), (-d[0], -d[1]), d))
    cut = [x for x in cut if x.kind != "line"]

    incident: dict[int, list[int]] = defaultdict(list)
    for n, x in enumerate(cut):
        for v in x.vertices:
            incident[v].append(n)
    for v, es in incident.items():
        if len(es) > 2:
            raise ValueError(f"separating line branches at {e.vertices[v].point}")

    used = [False] * len(cut)

    def follow(at: int) -> tuple[list[Point], tuple[int, int] | None]:
        pts = [e.vertices[at].point]
        while True:
            more = [m for m in incident[at] if not used[m]]
            if not more:
                return pts, None
            used[more[0]] = True
            x = cut[more[0]]
            if x.kind == "ray":
                return pts, x.direction
            at = x.vertices[1] if x.vertices[0] == at else x.vertices[0]
            pts.append(e.vertices[at].point)

    for n, x in enumerate(cut):
        if used[n] or x.kind != "ray":
            continue
        used[n] = True
        pts, end_dir = follow(x.vertices[0])
        arcs.append(Arc(tuple(pts), x.direction, end_dir))
    loops: list[tuple[Point, ...]] = []
    for n, x in enumerate(cut):
        if used[n]:
            continue
        used[n] = True
        rest, _ = follow(x.vertices[1])
        loops.append((e.vertices[x.vertices[0]].point, *rest[:-1]))
    return PLCurve(tuple(arcs), tuple(loops), ambient="plane")
