"""Bundled initial data and random convex triangulations.

Random triangulations come from lifting lattice points of the triangle to
random integer heights and keeping the lower faces of the lifted hull.  The
heights then certify convexity by construction.  The lower-hull routine
here is brute force over triples and shares no code with the envelope
builder, which is why the two are usable as checks on each other.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Mapping

import numpy as np

from .patchwork import PatchVertex, PatchworkInput

__all__ = [
    "lower_hull_cells",
    "regular_triangulation",
    "random_convex_input",
    "line_input",
    "ellipse_input",
    "bundled_corpus",
    "load_bundled",
]

Lattice = tuple[int, int]


def lower_hull_cells(heights: Mapping[Lattice, Fraction]) -> set[frozenset[Lattice]]:
    """Lower faces of the lifted points ``(k, l, height)``.

    Each cell is the set of lifted points lying on one supporting plane from
    below (so coplanar extras are included).
    """
    pts = list(heights)
    cells: set[frozenset[Lattice]] = set()
    for a, b, c in combinations(pts, 3):
        det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if det == 0:
            continue
        ha, hb, hc = (Fraction(heights[p]) for p in (a, b, c))
        # plane z = alpha*k + beta*l + gamma through the three lifted points
        alpha = ((hb - ha) * (c[1] - a[1]) - (hc - ha) * (b[1] - a[1])) / det
        beta = ((hc - ha) * (b[0] - a[0]) - (hb - ha) * (c[0] - a[0])) / det
        gamma = ha - alpha * a[0] - beta * a[1]
        on, below = [], False
        for p in pts:
            z = alpha * p[0] + beta * p[1] + gamma
            h = Fraction(heights[p])
            if h < z:
                below = True
                break
            if h == z:
                on.append(p)
        if not below:
            cells.add(frozenset(on))
    return cells


def regular_triangulation(heights: Mapping[Lattice, Fraction]) -> list[tuple[Lattice, Lattice, Lattice]] | None:
    """The lower-hull subdivision when every cell is a triangle, else ``None``."""
    cells = lower_hull_cells(heights)
    if any(len(c) != 3 for c in cells):
        return None
    return sorted(tuple(sorted(c)) for c in cells)


def random_convex_input(
    m: int,
    rng: np.random.Generator,
    *,
    max_height: int = 6,
    bowl: int = 2,
    keep: float = 0.85,
    attempts: int = 1000,
) -> PatchworkInput:
    """Random signed data on a random regular triangulation of degree ``m``.

    Each non-corner lattice point is offered with probability ``keep`` and
    lifted to ``bowl*(k^2 + k*l + l^2)`` plus integer noise in
    ``[0, max_height]``; the bowl keeps most points on the lower hull.
    Points that end up above the lower hull are dropped.
    """
    corners = {(0, 0), (m, 0), (0, m)}
    lattice = [(k, l) for k in range(m + 1) for l in range(m + 1 - k)]
    for _ in range(attempts):
        pts = [p for p in lattice if p in corners or rng.random() < keep]
        heights = {
            p: Fraction(bowl * (p[0] ** 2 + p[0] * p[1] + p[1] ** 2) + int(rng.integers(0, max_height + 1)))
            for p in pts
        }
        tris = regular_triangulation(heights)
        if tris is None:
            continue
        used = sorted({p for t in tris for p in t})
        index = {p: i for i, p in enumerate(used)}
        verts = tuple(
            PatchVertex(p[0], p[1], int(rng.choice([-1, 1])), heights[p]) for p in used
        )
        return PatchworkInput(m, verts, tuple(tuple(index[p] for p in t) for t in tris))
    raise RuntimeError(f"no regular triangulation found for degree {m} in {attempts} attempts")


def line_input() -> PatchworkInput:
    """Degree 1, signs -, +, +: the curve of ``x + y = t``."""
    return PatchworkInput(
        1,
        (PatchVertex(0, 0, -1, 1), PatchVertex(1, 0, 1, 0), PatchVertex(0, 1, 1, 0)),
        ((0, 1, 2),),
    )


def ellipse_input() -> PatchworkInput:
    """Degree 2 data whose curve is an ellipse crossing both positive half-axes."""
    verts = (
        PatchVertex(0, 0, -1, 1),
        PatchVertex(1, 0, 1, 0),
        PatchVertex(0, 1, 1, 0),
        PatchVertex(2, 0, -1, 2),
        PatchVertex(0, 2, -1, 3),
    )
    return PatchworkInput(2, verts, ((0, 1, 2), (1, 3, 2), (3, 4, 2)))


def load_bundled(name: str) -> PatchworkInput:
    """Read one of the JSON documents shipped in ``logpatch/data``."""
    from .schemas import input_from_json

    text = resources.files("logpatch").joinpath("data", f"{name}.json").read_text("utf-8")
    return input_from_json(json.loads(text))


def bundled_corpus(count: int = 10, seed: int = 20240611, max_degree: int = 4) -> list[tuple[str, PatchworkInput]]:
    """Line, ellipse, and ``count`` random generic convex inputs of degree 2..max_degree."""
    from .envelope import build_envelope, check_genericity
    from .patchwork import envelope_planes

    rng = np.random.default_rng(seed)
    out = [("line", line_input()), ("ellipse", ellipse_input())]
    while len(out) < count + 2:
        m = int(rng.integers(2, max_degree + 1))
        data = random_convex_input(m, rng)
        if len({v.sign for v in data.vertices}) < 2:
            continue
        if not check_genericity(build_envelope(envelope_planes(data))):
            continue
        out.append((f"random-{len(out) - 2:02d}-deg{m}", data))
    return out
