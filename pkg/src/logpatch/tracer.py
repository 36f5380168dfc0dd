"""Numeric tracing of ``p+ = p-`` on log paper.

The zero set of ``p = p+ - p-`` in the positive quadrant is the set where
``F(u, v) = ln p+(e^u, e^v) - ln p-(e^u, e^v)`` vanishes.  Both logs are
evaluated as log-sum-exp over the terms ``k u + l v + ln a``, so no
coefficient or power is ever exponentiated on its own.  The sign of ``F`` is
sampled on a grid and contoured by marching squares; components come from a
union-find over the zero crossings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .curves import TopologySummary
from .envelope import build_envelope
from .patchwork import PatchworkInput, SignedPolynomial2, envelope_planes, polynomial_patchwork
from .semiring import tropical_sum

__all__ = [
    "TraceWindow",
    "SignField",
    "TraceReport",
    "AffineTraceReport",
    "Stabilization",
    "Comparison",
    "StabilizationError",
    "sign_field",
    "trace",
    "trace_affine",
    "auto_window",
    "stabilize_t",
    "compare_topology",
]

log = logging.getLogger(__name__)

AMBIGUOUS_EPS = 1e-13
QUADRANTS = {"++": (1, 1), "-+": (-1, 1), "--": (-1, -1), "+-": (1, -1)}


@dataclass(frozen=True)
class TraceWindow:
    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float
    resolution: int = 512

    def __post_init__(self) -> None:
        if not (self.u_lo < self.u_hi and self.v_lo < self.v_hi):
            raise ValueError("window bounds must satisfy lo < hi")
        if not all(math.isfinite(x) for x in (self.u_lo, self.u_hi, self.v_lo, self.v_hi)):
            raise ValueError("window bounds must be finite")
        if self.resolution < 16:
            raise ValueError("resolution must be at least 16 cells per axis")

    @classmethod
    def square(cls, radius: float, resolution: int = 512) -> "TraceWindow":
        return cls(-radius, radius, -radius, radius, resolution)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.resolution
        return np.linspace(self.u_lo, self.u_hi, n + 1), np.linspace(self.v_lo, self.v_hi, n + 1)

    def refined(self) -> "TraceWindow":
        return TraceWindow(self.u_lo, self.u_hi, self.v_lo, self.v_hi, 2 * self.resolution)


def _log_part(terms, uu, vv):
    return tropical_sum(np.stack([k * uu + l * vv + b for (k, l), b in terms]), 1.0)


def _gap(q: SignedPolynomial2, uu, vv):
    return _log_part(q.plus, uu, vv) - _log_part(q.minus, uu, vv)


@dataclass(frozen=True)
class SignField:
    us: np.ndarray
    vs: np.ndarray
    values: np.ndarray  # F at nodes, indexed [i_u, i_v]
    ambiguous: int

    @property
    def signs(self) -> np.ndarray:
        """+1 / -1 per node; nodes with ``|F| < 1e-13`` count as +1."""
        return np.where(self.values > -AMBIGUOUS_EPS, 1, -1)


def sign_field(q: SignedPolynomial2, window: TraceWindow) -> SignField:
    if not q.minus or not q.plus:
        raise ValueError("both p+ and p- must be nonempty for a zero set in the positive quadrant")
    us, vs = window.axes()
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    f = _gap(q, uu, vv)
    amb = int(np.count_nonzero(np.abs(f) < AMBIGUOUS_EPS))
    if amb:
        log.info("%d grid nodes have |F| < %g", amb, AMBIGUOUS_EPS)
    return SignField(us, vs, f, amb)


@dataclass(frozen=True)
class Crossing:
    side: str  # S, H or W
    component: int
    point: tuple[float, float]
    position: float  # counter-clockwise boundary parameter


@dataclass
class TraceReport:
    """Traced zero set in one window.

    ``arcs`` and ``loops`` are float polylines in (u, v); ``crossings`` are
    the arc ends on the window boundary in counter-clockwise order from the
    lower-left corner.  Bottom edge is side S (``y -> 0``), left edge W
    (``x -> 0``), top and right edges H (to infinity).
    """

    window: TraceWindow
    arcs: list[np.ndarray]
    loops: list[np.ndarray]
    crossings: list[Crossing]
    components: int
    ambiguous: int = 0
    stabilized_t: float | None = None
    stabilized_log_t: float | None = None

    def summary(self) -> TopologySummary:
        return TopologySummary(self.components, tuple((c.side, c.component) for c in self.crossings))

    def side_exits(self, side: str) -> list[Crossing]:
        return [c for c in self.crossings if c.side == side]


def _interp(a: float, b: float, fa: float, fb: float) -> float:
    return a + (b - a) * fa / (fa - fb)


def trace(q: SignedPolynomial2, window: TraceWindow) -> TraceReport:
    """Marching-squares contour of ``F = 0`` with union-find components."""
    if not q.plus or not q.minus:
        return TraceReport(window, [], [], [], 0)
    field_ = sign_field(q, window)
    us, vs, f = field_.us, field_.vs, field_.values
    s = field_.signs > 0
    n = window.resolution
    # horizontal edge (i, j): nodes (i, j)-(i+1, j); vertical edge (i, j): (i, j)-(i, j+1)
    hcross = s[:-1, :] != s[1:, :]
    vcross = s[:, :-1] != s[:, 1:]
    nh = n * (n + 1)

    def hid(i, j):
        return j * n + i

    def vid(i, j):
        return nh + i * n + j

    points: dict[int, tuple[float, float]] = {}
    for i, j in zip(*np.nonzero(hcross)):
        points[hid(i, j)] = (_interp(us[i], us[i + 1], f[i, j], f[i + 1, j]), float(vs[j]))
    for i, j in zip(*np.nonzero(vcross)):
        points[vid(i, j)] = (float(us[i]), _interp(vs[j], vs[j + 1], f[i, j], f[i, j + 1]))

    count = (
        hcross[:, :-1].astype(int) + hcross[:, 1:] + vcross[:-1, :] + vcross[1:, :]
    )  # per cell (i, j)
    adj: dict[int, list[int]] = {k: [] for k in points}

    def link(a: int, b: int) -> None:
        adj[a].append(b)
        adj[b].append(a)

    for i, j in zip(*np.nonzero(count == 2)):
        ids = [
            e
            for e, hit in (
                (hid(i, j), hcross[i, j]),
                (hid(i, j + 1), hcross[i, j + 1]),
                (vid(i, j), vcross[i, j]),
                (vid(i + 1, j), vcross[i + 1, j]),
            )
            if hit
        ]
        link(*ids)
    saddles = np.argwhere(count == 4)
    if len(saddles):
        cu = 0.5 * (us[saddles[:, 0]] + us[saddles[:, 0] + 1])
        cv = 0.5 * (vs[saddles[:, 1]] + vs[saddles[:, 1] + 1])
        centre = _gap(q, cu, cv) > -AMBIGUOUS_EPS
        for (i, j), c in zip(saddles, centre):
            bottom, top, left, right = hid(i, j), hid(i, j + 1), vid(i, j), vid(i + 1, j)
            if c == s[i, j]:
                # lower-left and upper-right corners join through the centre
                link(bottom, right)
                link(left, top)
            else:
                link(left, bottom)
                link(top, right)

    ds = DisjointSet(points)
    for a, nbrs in adj.items():
        for b in nbrs:
            ds.merge(a, b)

    width_u, width_v = window.u_hi - window.u_lo, window.v_hi - window.v_lo

    def boundary(eid: int) -> tuple[str, float] | None:
        if eid < nh:
            j = eid // n
            u = points[eid][0]
            if j == 0:
                return "S", u - window.u_lo
            if j == n:
                return "H", 2 * width_u + width_v - (u - window.u_lo)
            return None
        i = (eid - nh) // n
        v = points[eid][1]
        if i == 0:
            return "W", 2 * width_u + 2 * width_v - (v - window.v_lo)
        if i == n:
            return "H", width_u + (v - window.v_lo)
        return None

    ends = {e: boundary(e) for e in points}
    ends = {e: b for e, b in ends.items() if b is not None}

    seen: set[int] = set()

    def walk(start: int) -> list[int]:
        path, prev, cur = [start], None, start
        seen.add(start)
        while True:
            nxt = [x for x in adj[cur] if x != prev and x not in seen]
            if not nxt:
                return path
            prev, cur = cur, nxt[0]
            seen.add(cur)
            path.append(cur)

    arcs, loops, crossings = [], [], []
    comp_of_arc: dict[int, int] = {}
    for e in sorted(ends, key=lambda x: ends[x][1]):
        if e in seen:
            continue
        path = walk(e)
        comp_of_arc[ds[e]] = len(arcs)
        arcs.append(np.array([points[x] for x in path]))
    for e in sorted(points):
        if e in seen:
            continue
        path = walk(e)
        loops.append(np.array([points[x] for x in path]))
    for e in sorted(ends, key=lambda x: ends[x][1]):
        side, pos = ends[e]
        crossings.append(Crossing(side, comp_of_arc[ds[e]], points[e], pos))
    components = len(ds.subsets())
    if components != len(arcs) + len(loops):  # pragma: no cover - would mean a branching contour
        log.warning("union-find gives %d components, walk gives %d", components, len(arcs) + len(loops))
    return TraceReport(window, arcs, loops, crossings, components, field_.ambiguous)


@dataclass
class AffineTraceReport:
    """Four quadrant traces glued along the axes (and, projectively, at infinity)."""

    quadrants: dict[str, TraceReport]
    components: int
    crossings: tuple[tuple[str, int], ...]
    ovals: int | None
    pseudolines: int | None
    glue_ok: bool = True
    notes: list[str] = field(default_factory=list)
    stabilized_t: float | None = None
    stabilized_log_t: float | None = None

    def summary(self) -> TopologySummary:
        return TopologySummary(self.components, self.crossings)

    def projective_summary(self) -> TopologySummary:
        return TopologySummary(self.ovals + self.pseudolines, (), self.ovals, self.pseudolines)


def trace_affine(q: SignedPolynomial2, window: TraceWindow) -> AffineTraceReport:
    """Trace ``q(eps x, delta y)`` in log coordinates for all four sign pairs and glue."""
    reps = {name: trace(q.reflect(*sd), window) for name, sd in QUADRANTS.items()}
    notes: list[str] = []
    nodes = [(name, n) for name, r in reps.items() for n in range(len(r.arcs))]
    ds = DisjointSet(nodes)

    def pair(a: str, b: str, side: str, coord: int) -> None:
        xa = sorted(reps[a].side_exits(side), key=lambda c: c.point[coord])
        xb = sorted(reps[b].side_exits(side), key=lambda c: c.point[coord])
        if len(xa) != len(xb):
            notes.append(f"{len(xa)} vs {len(xb)} {side}-exits between quadrants {a} and {b}")
        for ca, cb in zip(xa, xb):
            ds.merge((a, ca.component), (b, cb.component))

    # positive / negative y half-axis, positive / negative x half-axis
    pair("++", "-+", "W", 1)
    pair("--", "+-", "W", 1)
    pair("++", "+-", "S", 0)
    pair("-+", "--", "S", 0)

    roots = {}
    crossings = []
    for name in QUADRANTS:
        exits = reps[name].side_exits("H")
        if name in ("-+", "+-"):
            exits = exits[::-1]
        for c in exits:
            root = ds[(name, c.component)]
            crossings.append((name, roots.setdefault(root, len(roots))))
    loops = sum(len(r.loops) for r in reps.values())
    components = len(ds.subsets()) + loops if nodes else loops

    # projective closure: opposite quadrants meet at infinity in the same order
    pds = DisjointSet(nodes)
    for x in nodes:
        pds.merge(x, ds[x])
    gluings: dict = {}
    at_infinity = []
    for a, b in (("++", "--"), ("-+", "+-")):
        xa = sorted(reps[a].side_exits("H"), key=lambda c: c.point[1] - c.point[0])
        xb = sorted(reps[b].side_exits("H"), key=lambda c: c.point[1] - c.point[0])
        if len(xa) != len(xb):
            notes.append(f"{len(xa)} vs {len(xb)} points at infinity between quadrants {a} and {b}")
        for ca, cb in zip(xa, xb):
            at_infinity.append(((a, ca.component), (b, cb.component)))
            pds.merge((a, ca.component), (b, cb.component))
    for x, _ in at_infinity:
        gluings[pds[x]] = gluings.get(pds[x], 0) + 1
    pseudo = sum(1 for g in gluings.values() if g % 2)
    closed = len(pds.subsets()) if nodes else 0
    ovals = closed - pseudo + loops
    return AffineTraceReport(reps, components, tuple(crossings), ovals, pseudo, not notes, notes)


def auto_window(data: PatchworkInput, log_t: float, resolution: int = 512) -> TraceWindow:
    """Square window scaled with ``|ln t|`` that holds every vertex of the tropical picture."""
    env = build_envelope(envelope_planes(data))
    reach = max((abs(c) for v in env.vertices for c in v.point), default=Fraction(0))
    radius = abs(log_t) * max(data.m + 1, 2 * float(reach) + 1)
    return TraceWindow.square(radius, resolution)


@dataclass
class Stabilization:
    t: float
    log_t: float
    report: TraceReport | AffineTraceReport
    history: list[tuple[float, TopologySummary]]


class StabilizationError(RuntimeError):
    def __init__(self, message: str, history: list[tuple[float, TopologySummary]]):
        super().__init__(message)
        self.history = history


def _summary_key(rep) -> tuple:
    if isinstance(rep, AffineTraceReport):
        return (rep.summary().canonical(), rep.projective_summary().canonical(), rep.glue_ok)
    return rep.summary().canonical()


def stabilize_t(
    data: PatchworkInput,
    resolution: int = 512,
    *,
    max_refinements: int = 12,
    affine: bool = False,
    patience: int = 3,
) -> Stabilization:
    """Shrink ``t`` through 1/2, 1/4, 1/16, 1/256, ... until ``patience``
    consecutive traces have the same topology; return the last (smallest) ``t``.

    Windows are rescaled with ``|ln t|`` at each step.  With ``affine=True``
    all four quadrants (and their gluing) must agree.  Agreement is a
    heuristic: a curve can hold a wrong topology over two steps before the
    patchwork regime sets in, and a larger ``patience`` guards against that.
    """
    if patience < 2:
        raise ValueError("patience must be at least 2")
    history: list[tuple[float, TopologySummary]] = []
    prev_key, run = None, 0
    for j in range(max_refinements + 1):
        log_t = -math.log(2.0) * 2.0**j
        window = auto_window(data, log_t, resolution)
        q = polynomial_patchwork(data, log_t=log_t)
        rep = trace_affine(q, window) if affine else trace(q, window)
        key = _summary_key(rep)
        history.append((log_t, rep.summary()))
        run = run + 1 if key == prev_key else 1
        if run >= patience:
            t = math.exp(log_t)
            rep.stabilized_t, rep.stabilized_log_t = t, log_t
            return Stabilization(t, log_t, rep, history)
        prev_key = key
    raise StabilizationError(
        f"topology did not settle within {max_refinements} refinements; data may be non-generic",
        history,
    )


@dataclass(frozen=True)
class Comparison:
    match: bool
    predicted: TopologySummary
    traced: TopologySummary
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.match


def compare_topology(predicted, traced) -> Comparison:
    """Compare component counts and cyclic boundary patterns (ovals/pseudolines when present)."""
    p = predicted if isinstance(predicted, TopologySummary) else predicted.summary()
    t = traced if isinstance(traced, TopologySummary) else traced.summary()
    reasons = []
    if p.components != t.components:
        reasons.append(f"component count {p.components} predicted, {t.components} traced")
    if p.canonical()[1] != t.canonical()[1]:
        reasons.append(f"boundary pattern {p.sides} predicted, {t.sides} traced")
    if p.ovals is not None and t.ovals is not None and (p.ovals, p.pseudolines) != (t.ovals, t.pseudolines):
        reasons.append(
            f"ovals/pseudolines {p.ovals}/{p.pseudolines} predicted, {t.ovals}/{t.pseudolines} traced"
        )
    if isinstance(traced, AffineTraceReport) and not traced.glue_ok:
        reasons.extend(traced.notes)
    return Comparison(not reasons, p, t, tuple(reasons))

