"""Combinatorial and polynomial patchworking of real plane curves.

Initial data: a degree ``m``, a triangulation of the triangle with corners
(0,0), (m,0), (0,m) by lattice triangles, a sign at every vertex and a
convexity certificate ``nu``.  The combinatorial side draws, in every
triangle with mixed signs, the midline separating the signs.  The
polynomial side is ``b_t = sum sign * t^nu * x^k y^l``, carried in log form.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .curves import Arc, PLCurve, TopologySummary, delta_position, square_position
from .envelope import AffinePlane

__all__ = [
    "InputError",
    "PatchVertex",
    "PatchworkInput",
    "ConvexityReport",
    "SignedPolynomial2",
    "ProjectiveCurve",
    "check_convexity",
    "combinatorial_patchwork",
    "polynomial_patchwork",
    "affine_extension",
    "reflect_sign",
    "projective_glue",
    "envelope_planes",
    "format_symbolic",
    "format_numeric",
]

Lattice = tuple[int, int]
Point = tuple[Fraction, Fraction]
QUADRANT_SIGNS = {"++": (1, 1), "-+": (-1, 1), "--": (-1, -1), "+-": (1, -1)}


class InputError(ValueError):
    """Initial data that does not describe a lattice triangulation with signs."""


@dataclass(frozen=True)
class PatchVertex:
    k: int
    l: int
    sign: int
    nu: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "nu", Fraction(self.nu))
        if self.sign not in (1, -1):
            raise InputError(f"sign at ({self.k}, {self.l}) must be +1 or -1, got {self.sign!r}")

    @property
    def point(self) -> Lattice:
        return (self.k, self.l)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class PatchworkInput:
    """Initial data over the triangle (``region="delta"``) or the square made
    of its four reflections (``region="affine"``)."""

    m: int
    vertices: tuple[PatchVertex, ...]
    triangles: tuple[tuple[int, int, int], ...]
    region: str = "delta"

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "triangles", tuple(tuple(t) for t in self.triangles))
        self.validate()

    def point(self, i: int) -> Lattice:
        return self.vertices[i].point

    def index(self) -> dict[Lattice, int]:
        return {v.point: i for i, v in enumerate(self.vertices)}

    def _inside(self, k: int, l: int) -> bool:
        if self.region == "delta":
            return k >= 0 and l >= 0 and k + l <= self.m
        return abs(k) + abs(l) <= self.m

    def on_boundary(self, a: Lattice, b: Lattice) -> bool:
        """Whether the segment ``ab`` lies in the boundary of the region."""
        m = self.m
        if self.region == "delta":
            return (a[1] == b[1] == 0) or (a[0] == b[0] == 0) or (sum(a) == sum(b) == m)
        sides = [lambda p, e=e, d=d: e * p[0] + d * p[1] == m for e, d in QUADRANT_SIGNS.values()]
        return any(s(a) and s(b) for s in sides)

    def validate(self) -> None:
        m = self.m
        if int(m) != m or m < 1:
            raise InputError(f"degree must be a positive integer, got {m!r}")
        if self.region not in ("delta", "affine"):
            raise InputError(f"unknown region {self.region!r}")
        seen = set()
        for v in self.vertices:
            if not self._inside(v.k, v.l):
                raise InputError(f"vertex ({v.k}, {v.l}) lies outside the degree-{m} {self.region} region")
            if v.point in seen:
                raise InputError(f"vertex ({v.k}, {v.l}) listed twice")
            if v.nu < 0:
                raise InputError(f"nu at ({v.k}, {v.l}) is negative")
            seen.add(v.point)
        n = len(self.vertices)
        used = set()
        area2 = 0
        directed: dict[frozenset, list[tuple[Lattice, Lattice]]] = defaultdict(list)
        for t in self.triangles:
            if len(t) != 3 or len(set(t)) != 3 or not all(0 <= i < n for i in t):
                raise InputError(f"bad triangle {t!r}")
            a, b, c = (self.point(i) for i in t)
            cr = _cross(a, b, c)
            if cr == 0:
                raise InputError(f"triangle {t!r} is degenerate")
            if cr < 0:
                b, c = c, b
            area2 += abs(cr)
            used.update(t)
            for p, q in ((a, b), (b, c), (c, a)):
                directed[frozenset((p, q))].append((p, q))
        if used != set(range(n)):
            missing = sorted(self.point(i) for i in set(range(n)) - used)
            raise InputError(f"vertices not used by any triangle: {missing}")
        full = m * m if self.region == "delta" else 4 * m * m
        if area2 != full:
            raise InputError(f"triangles cover doubled area {area2}, expected {full}")
        for key, uses in directed.items():
            a, b = tuple(key)
            if self.on_boundary(a, b):
                if len(uses) != 1:
                    raise InputError(f"boundary edge {sorted(key)} used {len(uses)} times")
            elif len(uses) != 2 or uses[0] != (uses[1][1], uses[1][0]):
                raise InputError(f"interior edge {sorted(key)} is not shared by two triangles")

    def interior_edges(self) -> list[tuple[tuple[int, int], int, int]]:
        """``((i, j), apex1, apex2)`` for every edge shared by two triangles."""
        owners: dict[tuple[int, int], list[int]] = defaultdict(list)
        for t in self.triangles:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                owners[tuple(sorted((a, b)))].append(next(x for x in t if x not in (a, b)))
        return [(e, ap[0], ap[1]) for e, ap in sorted(owners.items()) if len(ap) == 2]

    def signs(self) -> dict[Lattice, int]:
        return {v.point: v.sign for v in self.vertices}

    def nus(self) -> dict[Lattice, Fraction]:
        return {v.point: v.nu for v in self.vertices}

    def with_signs(self, signs: Mapping[Lattice, int]) -> "PatchworkInput":
        vs = tuple(replace(v, sign=signs.get(v.point, v.sign)) for v in self.vertices)
        return replace(self, vertices=vs)


@dataclass(frozen=True)
class ConvexityReport:
    ok: bool
    failures: tuple[tuple[Lattice, Lattice, Fraction], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_convexity(data: PatchworkInput) -> ConvexityReport:
    """Strict local convexity of ``nu`` across every interior edge.

    The affine interpolant of ``nu`` on one triangle, extended to the apex
    of its neighbour, must be strictly below ``nu`` there.  ``slack`` is
    ``nu(apex) - extension``.
    """
    nu = [v.nu for v in data.vertices]
    bad = []
    for (i, j), c, d in data.interior_edges():
        a, b, pc, pd = data.point(i), data.point(j), data.point(c), data.point(d)
        total = _cross(a, b, pc)
        # barycentric coordinates of pd with respect to (a, b, pc)
        wc = Fraction(_cross(a, b, pd), total)
        wa = Fraction(_cross(b, pc, pd), total)
        wb = 1 - wa - wc
        slack = nu[d] - (wa * nu[i] + wb * nu[j] + wc * nu[c])
        if slack <= 0:
            bad.append((a, b, slack))
    return ConvexityReport(not bad, tuple(bad))


def _midpoint(a: Lattice, b: Lattice) -> Point:
    return (Fraction(a[0] + b[0], 2), Fraction(a[1] + b[1], 2))


def combinatorial_patchwork(data: PatchworkInput) -> PLCurve:
    """Midlines separating pluses from minuses, assembled into arcs and loops.

    Arcs run from the end met first on the counter-clockwise boundary walk;
    loops start at their least vertex.  Components are ordered by least vertex.
    """
    sign = [v.sign for v in data.vertices]
    adj: dict[Point, list[Point]] = defaultdict(list)
    for t in data.triangles:
        mixed = [(a, b) for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])) if sign[a] != sign[b]]
        if not mixed:
            continue
        (a0, b0), (a1, b1) = mixed  # three signs always split as 2 + 1
        p = _midpoint(data.point(a0), data.point(b0))
        q = _midpoint(data.point(a1), data.point(b1))
        adj[p].append(q)
        adj[q].append(p)

    for p, ns in adj.items():
        if len(ns) > 2:  # pragma: no cover - a midpoint lies on at most two triangles
            raise AssertionError(f"midline branches at {p}")

    where = delta_position if data.region == "delta" else square_position
    seen: set[Point] = set()

    def walk(start: Point, nxt: Point) -> list[Point]:
        path = [start]
        prev, cur = start, nxt
        seen.add(start)
        while cur not in seen:
            path.append(cur)
            seen.add(cur)
            step = [x for x in adj[cur] if x != prev]
            if not step:
                break
            prev, cur = cur, step[0]
        return path

    arcs = []
    ends = sorted((p for p, ns in adj.items() if len(ns) == 1), key=lambda p: where(p, data.m)[0])
    for p in ends:
        if p in seen:
            continue
        arcs.append(Arc(tuple(walk(p, adj[p][0]))))
    loops = []
    for p in sorted(adj):
        if p in seen:
            continue
        loops.append(tuple(walk(p, min(adj[p]))))
    arcs.sort(key=lambda a: min(a.points))
    loops.sort(key=lambda lp: min(lp))
    return PLCurve(tuple(arcs), tuple(loops), ambient=data.region, degree=data.m)


@dataclass(frozen=True)
class SignedPolynomial2:
    """``p = p+ - p-`` with positive parts stored as ``((k, l), ln coefficient)``."""

    plus: tuple[tuple[Lattice, float], ...]
    minus: tuple[tuple[Lattice, float], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "plus", tuple(sorted(self.plus)))
        object.__setattr__(self, "minus", tuple(sorted(self.minus)))
        sp = {kl for kl, _ in self.plus}
        sm = {kl for kl, _ in self.minus}
        if sp & sm:
            raise ValueError("p+ and p- must have disjoint supports")

    @classmethod
    def from_signed_logs(cls, terms: Iterable[tuple[Lattice, int, float]]) -> "SignedPolynomial2":
        terms = list(terms)
        return cls(
            tuple((kl, b) for kl, s, b in terms if s > 0),
            tuple((kl, b) for kl, s, b in terms if s < 0),
        )

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[Lattice, float]) -> "SignedPolynomial2":
        return cls.from_signed_logs(
            (kl, 1 if a > 0 else -1, math.log(abs(a))) for kl, a in coeffs.items() if a != 0
        )

    def signed_logs(self) -> list[tuple[Lattice, int, float]]:
        out = [(kl, 1, b) for kl, b in self.plus] + [(kl, -1, b) for kl, b in self.minus]
        return sorted(out, key=lambda x: (x[0][0] + x[0][1], -x[0][0]))

    def reflect(self, eps: int, delta: int) -> "SignedPolynomial2":
        """``p(eps*x, delta*y)``."""
        return self.from_signed_logs(
            (kl, s * eps ** kl[0] * delta ** kl[1], b) for kl, s, b in self.signed_logs()
        )

    def scaled(self, h: float) -> "SignedPolynomial2":
        """Member of the dequantizing family: every coefficient ``a`` becomes ``a^(1/h)``."""
        if not h > 0:
            raise ValueError("h must be positive")
        return SignedPolynomial2(
            tuple((kl, b / h) for kl, b in self.plus), tuple((kl, b / h) for kl, b in self.minus)
        )

    @property
    def coefficients(self) -> dict[Lattice, float]:
        return {kl: s * math.exp(b) for kl, s, b in self.signed_logs()}

    def __call__(self, x: float, y: float) -> float:
        return math.fsum(a * x ** kl[0] * y ** kl[1] for kl, a in self.coefficients.items())


def _log_t(t: float | None, log_t: float | None) -> float:
    if (t is None) == (log_t is None):
        raise ValueError("give exactly one of t and log_t")
    if log_t is None:
        if not t > 0:
            raise ValueError(f"t must be positive, got {t!r}")
        return math.log(t)
    return float(log_t)


def polynomial_patchwork(
    data: PatchworkInput, t: float | None = None, *, log_t: float | None = None
) -> SignedPolynomial2:
    """``b_t`` with log-coefficients ``nu * ln t``; pass ``log_t`` when ``t`` underflows."""
    lt = _log_t(t, log_t)
    return SignedPolynomial2.from_signed_logs(
        (v.point, v.sign, float(v.nu) * lt) for v in data.vertices
    )


def _monomial(k: int, l: int) -> str:
    parts = []
    for var, e in (("x", k), ("y", l)):
        if e == 1:
            parts.append(var)
        elif e > 1:
            parts.append(f"{var}^{e}")
    return "*".join(parts)


def _join(terms: list[tuple[int, str]]) -> str:
    out = ""
    for s, body in terms:
        if not out:
            out = body if s > 0 else f"-{body}"
        else:
            out += f" {'+' if s > 0 else '-'} {body}"
    return out or "0"


def _order(data: PatchworkInput) -> list[PatchVertex]:
    return sorted(data.vertices, key=lambda v: (v.k + v.l, -v.k))


def format_symbolic(data: PatchworkInput) -> str:
    """``b_t`` with ``t`` left symbolic, e.g. ``-t + x + y - t^2*x^2 - t^3*y^2``."""
    terms = []
    for v in _order(data):
        mono = _monomial(v.k, v.l)
        if v.nu == 0:
            coef = ""
        elif v.nu == 1:
            coef = "t"
        else:
            nu = str(v.nu) if v.nu.denominator == 1 else f"({v.nu})"
            coef = f"t^{nu}"
        body = "*".join(x for x in (coef, mono) if x) or "1"
        terms.append((v.sign, body))
    return _join(terms)


def format_numeric(data: PatchworkInput, t: float) -> str:
    """``b_t`` at a numeric ``t``, coefficients to 9 significant digits."""
    lt = _log_t(t, None)
    terms = []
    for v in _order(data):
        mono = _monomial(v.k, v.l)
        if v.nu == 0:
            body = mono or "1"
        else:
            coef = f"{math.exp(float(v.nu) * lt):.9g}"
            body = f"{coef}*{mono}" if mono else coef
        terms.append((v.sign, body))
    return _join(terms)


def envelope_planes(data: PatchworkInput) -> list[AffinePlane]:
    """Planes ``w = k u + l v - nu(k, l)``, in vertex order."""
    return [AffinePlane(v.k, v.l, -v.nu) for v in data.vertices]


def reflect_sign(sign: int, k: int, l: int, eps: int, delta: int) -> int:
    """Sign at ``(eps*k, delta*l)``: flips once per odd distance to a mirror axis."""
    return sign * eps ** abs(k) * delta ** abs(l)


def affine_extension(data: PatchworkInput) -> PatchworkInput:
    """Reflect the data into all four quadrants with the parity sign rule."""
    if data.region != "delta":
        raise ValueError("affine extension starts from data over the triangle")
    index: dict[Lattice, int] = {}
    verts: list[PatchVertex] = []
    for eps, delta in QUADRANT_SIGNS.values():
        for v in data.vertices:
            p = (eps * v.k, delta * v.l)
            s = reflect_sign(v.sign, v.k, v.l, eps, delta)
            if p in index:
                if verts[index[p]].sign != s:  # pragma: no cover - axis distance is 0
                    raise AssertionError(f"sign rule disagrees with itself at {p}")
                continue
            index[p] = len(verts)
            verts.append(PatchVertex(p[0], p[1], s, v.nu))
    tris = []
    for eps, delta in QUADRANT_SIGNS.values():
        for t in data.triangles:
            tris.append(tuple(index[(eps * data.point(i)[0], delta * data.point(i)[1])] for i in t))
    return PatchworkInput(data.m, tuple(verts), tuple(tris), region="affine")


@dataclass(frozen=True)
class ProjectiveCurve:
    """Components after gluing opposite boundary points of the square.

    Each component is ``(arc indices, loop indices, gluings traversed)``;
    an odd number of gluings makes it a pseudoline, an even number an oval.
    """

    source: PLCurve
    components: tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple("pseudoline" if g % 2 else "oval" for _, _, g in self.components)

    @property
    def ovals(self) -> int:
        return self.kinds.count("oval")

    @property
    def pseudolines(self) -> int:
        return self.kinds.count("pseudoline")

    def summary(self) -> TopologySummary:
        return TopologySummary(len(self.components), (), self.ovals, self.pseudolines)


def projective_glue(curve: PLCurve) -> ProjectiveCurve:
    if curve.ambient != "affine":
        raise ValueError("projective gluing needs a curve in the affine square")
    ends: dict[Point, int] = {}
    for n, a in enumerate(curve.arcs):
        for p in (a.points[0], a.points[-1]):
            ends[p] = n
    ds = DisjointSet(range(len(curve.arcs)))
    glued: dict[int, int] = defaultdict(int)
    pairs = []
    for p, n in ends.items():
        q = (-p[0], -p[1])
        if q not in ends:
            raise ValueError(f"boundary point {p} has no antipodal partner")
        if p < q:
            pairs.append((n, ends[q]))
            ds.merge(n, ends[q])
    for a, _ in pairs:
        glued[ds[a]] += 1
    comps = []
    for subset in sorted(ds.subsets(), key=min):
        root = ds[min(subset)]
        comps.append((tuple(sorted(subset)), (), glued[root]))
    comps.extend(((), (i,), 0) for i in range(len(curve.loops)))
    return ProjectiveCurve(curve, tuple(comps))
