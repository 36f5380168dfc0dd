"""Polygonal curves and the homeomorphism-invariant data compared across routes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["Arc", "PLCurve", "TopologySummary", "canonical_pattern", "DELTA_SIDES", "QUADRANTS"]

Point = tuple[Fraction, Fraction]

# outward directions of the sides of the standard triangle, and their names:
# S is the side l = 0 (y -> 0), W the side k = 0 (x -> 0), H the hypotenuse
DELTA_SIDES = {(0, -1): "S", (-1, 0): "W", (1, 1): "H"}
QUADRANTS = ("++", "-+", "--", "+-")


@dataclass(frozen=True)
class Arc:
    """Open polygonal path.

    ``start_dir``/``end_dir`` are set when that end runs off to infinity
    along the given direction (curves in the whole plane).  Otherwise the
    ends lie on the boundary of the ambient region.
    """

    points: tuple[Point, ...]
    start_dir: tuple[int, int] | None = None
    end_dir: tuple[int, int] | None = None

    def segments(self) -> list[tuple[Point, Point]]:
        return list(zip(self.points, self.points[1:]))


def canonical_pattern(seq: Sequence[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    """Least rotation of a cyclic (label, component) sequence, components renumbered."""
    n = len(seq)
    best: tuple[tuple[str, int], ...] | None = None
    for r in range(n):
        names: dict[int, int] = {}
        rot = []
        for label, comp in list(seq[r:]) + list(seq[:r]):
            rot.append((label, names.setdefault(comp, len(names))))
        cand = tuple(rot)
        if best is None or cand < best:
            best = cand
    return best or ()


@dataclass(frozen=True)
class TopologySummary:
    """Component count plus the cyclic order in which ends meet the boundary.

    Two summaries are equal when the counts agree and the boundary sequences
    agree up to rotation and renaming of components.  ``ovals`` and
    ``pseudolines`` are filled in only for projective closures.
    """

    components: int
    crossings: tuple[tuple[str, int], ...]
    ovals: int | None = None
    pseudolines: int | None = None

    def canonical(self) -> tuple:
        return (self.components, canonical_pattern(self.crossings), self.ovals, self.pseudolines)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TopologySummary):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    @property
    def sides(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.crossings)

    def to_json(self) -> dict:
        out = {
            "components": self.components,
            "crossings": [{"side": s, "component": c} for s, c in self.crossings],
        }
        if self.ovals is not None:
            out["ovals"] = self.ovals
            out["pseudolines"] = self.pseudolines
        return out


def _direction_key(d: tuple[int, int], p: Point) -> tuple[float, Fraction]:
    # counter-clockwise at infinity: by angle (measured from straight down), then
    # parallel rays by their offset cross(d, p)
    angle = (math.atan2(d[1], d[0]) + math.pi / 2) % (2 * math.pi)
    return (angle, d[0] * p[1] - d[1] * p[0])


def delta_position(p: Point, m: int) -> tuple[Fraction, str]:
    """Counter-clockwise boundary parameter on the triangle (0,0), (m,0), (0,m)."""
    k, l = p
    if l == 0:
        return (Fraction(k), "S")
    if k + l == m:
        return (m + Fraction(l), "H")
    if k == 0:
        return (2 * m + (m - Fraction(l)), "W")
    raise ValueError(f"{p} is not on the boundary of the degree-{m} triangle")


def square_position(p: Point, m: int) -> tuple[Fraction, str]:
    """Counter-clockwise boundary parameter on the square |k| + |l| = m, from (m, 0)."""
    k, l = p
    if abs(k) + abs(l) != m:
        raise ValueError(f"{p} is not on the boundary of the degree-{m} square")
    if k > 0 and l >= 0:
        return (Fraction(l), "++")
    if k <= 0 and l > 0:
        return (m + Fraction(-k), "-+")
    if k < 0 and l <= 0:
        return (2 * m + Fraction(-l), "--")
    return (3 * m + Fraction(k), "+-")


@dataclass(frozen=True)
class PLCurve:
    """Arcs and loops in one ambient region.

    ``ambient`` is ``"delta"`` (the triangle of degree ``degree``),
    ``"affine"`` (the square made of four reflected triangles) or ``"plane"``
    (the whole (u, v)-plane, ends at infinity).
    """

    arcs: tuple[Arc, ...]
    loops: tuple[tuple[Point, ...], ...] = ()
    ambient: str = "delta"
    degree: int | None = None

    @property
    def components(self) -> int:
        return len(self.arcs) + len(self.loops)

    def is_empty(self) -> bool:
        return not self.arcs and not self.loops

    def vertices(self) -> set[Point]:
        pts = {p for a in self.arcs for p in a.points}
        pts.update(p for loop in self.loops for p in loop)
        return pts

    def segments(self) -> list[tuple[Point, Point]]:
        out = [s for a in self.arcs for s in a.segments()]
        for loop in self.loops:
            out.extend(zip(loop, loop[1:] + loop[:1]))
        return out

    def ends(self) -> list[tuple[object, str, int]]:
        """Every boundary end as ``(sort key, side label, arc index)``."""
        out = []
        for n, a in enumerate(self.arcs):
            if self.ambient == "plane":
                for p, d in ((a.points[0], a.start_dir), (a.points[-1], a.end_dir)):
                    if d is None:
                        continue
                    label = DELTA_SIDES.get(d, f"{d[0]},{d[1]}")
                    out.append((_direction_key(d, p), label, n))
            else:
                where = delta_position if self.ambient == "delta" else square_position
                for p in (a.points[0], a.points[-1]):
                    key, label = where(p, self.degree)
                    out.append((key, label, n))
        out.sort(key=lambda e: e[0])
        return out

    def summary(self) -> TopologySummary:
        return TopologySummary(self.components, tuple((s, n) for _, s, n in self.ends()))
