"""``logpatch`` command line: graph, patchwork, verify, roots.

Exit codes: 0 success or match, 2 input error, 3 precondition failure,
4 verification mismatch.  Every command prints a JSON report on stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .envelope import build_envelope, check_genericity, separating_line
from .logpaper import (
    PosPolynomial1,
    SignedPolynomial1,
    eval_L,
    eval_M,
    eval_scaled,
    positive_roots_bracket,
    root_window,
    tropical_limit,
)
from .patchwork import (
    InputError,
    PatchworkInput,
    affine_extension,
    check_convexity,
    combinatorial_patchwork,
    envelope_planes,
    format_numeric,
    format_symbolic,
    projective_glue,
)
from .polyparse import ParseError, describe_term, parse_univariate
from .schemas import curve_to_json, input_from_json, validate_report
from .svg import PALETTE, Figure, Panel
from .tracer import StabilizationError, compare_topology, stabilize_t

__all__ = ["main", "cmd_graph", "cmd_patchwork", "cmd_verify", "cmd_roots", "CliError"]

OK, INPUT_ERROR, PRECONDITION, MISMATCH = 0, 2, 3, 4
PLUS, MINUS = "#1f4e9c", "#c0392b"


class CliError(Exception):
    def __init__(self, message: str, code: int = INPUT_ERROR, report: dict | None = None):
        super().__init__(message)
        self.code = code
        self.report = report


def _window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like LO:HI, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise argparse.ArgumentTypeError(f"window {text!r} must satisfy LO < HI")
    return lo, hi


def _positive_h(text: str) -> float:
    h = float(text)
    if not 0 < h <= 1:
        raise argparse.ArgumentTypeError(f"h must lie in (0, 1], got {text}")
    return h


def _unit_t(text: str) -> float:
    t = float(text)
    if not 0 < t < 1:
        raise argparse.ArgumentTypeError(f"t must lie in (0, 1), got {text}")
    return t


def _emit(report: dict[str, Any], out: str | None = None) -> None:
    validate_report(report)
    text = json.dumps(report, indent=2, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _q(x) -> str:
    return str(Fraction(x))


# ---- graph -----------------------------------------------------------------


def _positive_poly(text: str) -> PosPolynomial1:
    try:
        terms = parse_univariate(text, keep_zero=True)
    except ParseError as exc:
        raise CliError(str(exc)) from None
    for k, (sign, _) in sorted(terms.items()):
        if sign <= 0:
            what = "zero" if sign == 0 else "negative"
            raise CliError(
                f"{text!r}: coefficient of {describe_term(k)} is {what}; "
                "log-paper graphs need positive coefficients"
            )
    return PosPolynomial1.from_logs({k: b for k, (_, b) in terms.items()})


def cmd_graph(
    polys: Sequence[str],
    hs: Sequence[float] = (),
    window: tuple[float, float] | None = None,
    samples: int = 1001,
    out: str | None = None,
) -> dict[str, Any]:
    """Log-paper graphs of positive polynomials with their tropical limits."""
    parsed = [(text, _positive_poly(text)) for text in polys]
    if window is None:
        corners = [c for _, p in parsed for c in tropical_limit(p).corners()]
        lo = math.floor(min([-8.0, *(c - 8 for c in corners)]))
        hi = math.ceil(max([8.0, *(c + 8 for c in corners)]))
        window = (float(lo), float(hi))
    us = np.linspace(window[0], window[1], samples)
    panels, figure = [], []
    for n, (text, p) in enumerate(parsed):
        trop = tropical_limit(p)
        corners = trop.corners()
        L, M = np.asarray(eval_L(p, us)), np.asarray(eval_M(trop, us))
        gap = L - M
        far = np.ones_like(us, dtype=bool)
        for c in corners:
            far &= np.abs(us - c) >= 10
        scaled = []
        curves = []
        for h in hs:
            S = np.asarray(eval_scaled(p, us, h))
            scaled.append(
                {"h": h, "max_gap": float(np.max(S - M)), "bound": h * math.log(len(p.terms))}
            )
            curves.append((h, S))
        panels.append(
            {
                "polynomial": text,
                "terms": len(p.terms),
                "corners": [float(c) for c in corners],
                "max_gap": float(np.max(gap)),
                "bound": math.log(len(p.terms)),
                "far_gap": float(np.max(gap[far])) if far.any() else None,
                "min_gap": float(np.min(gap)),
                "scaled": scaled,
            }
        )
        if out:
            v_lo = math.floor(float(np.min(M)) - 1)
            v_hi = math.ceil(float(np.max(L)) + 1)
            panel = Panel(f"v = ln({text})", (window[0], window[1], v_lo, v_hi))
            for k, b in p.terms:
                panel.polyline(
                    [(window[0], k * window[0] + b), (window[1], k * window[1] + b)],
                    "#999999", 0.8, "4 3",
                )
            panel.polyline(zip(us, M), "#000000", 1.2, "6 3", label="tropical limit")
            for i, (h, S) in enumerate(curves):
                panel.polyline(zip(us, S), PALETTE[(i + 2) % len(PALETTE)], 1.2, label=f"h = {h:g}")
            panel.polyline(zip(us, L), PALETTE[0], 2.0, label="log-paper graph")
            figure.append(panel)
    if out:
        Figure(figure).write(out)
    return {"kind": "graph", "window": list(window), "panels": panels}


# ---- patchwork -------------------------------------------------------------


def load_input(path: str) -> tuple[PatchworkInput, dict[str, int]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: not JSON ({exc.msg} at line {exc.lineno})") from None
    try:
        return input_from_json(doc), dict(doc.get("trace", {}))
    except InputError as exc:
        raise CliError(f"{path}: {exc}") from None


def _convexity_gate(data: PatchworkInput) -> None:
    conv = check_convexity(data)
    if not conv.ok:
        lines = ", ".join(f"{tuple(a)}-{tuple(b)}" for a, b, _ in conv.failures)
        raise CliError(
            f"nu is not strictly convex across edges {lines}",
            PRECONDITION,
            {"kind": "check", **_check_report(data)},
        ) from None


def _check_report(data: PatchworkInput) -> dict[str, Any]:
    conv = check_convexity(data)
    env = build_envelope(envelope_planes(data))
    gen = check_genericity(env)
    return {
        "convex": conv.ok,
        "generic": gen.ok,
        "convexity_failures": [
            {"edge": [list(a), list(b)], "slack": _q(s)} for a, b, s in conv.failures
        ],
        "genericity_violations": [
            {"point": [_q(c) for c in p], "planes": [list(data.point(i)) for i in act]}
            for p, act in gen.violations
        ],
        "hidden_planes": [list(data.point(i)) for i in env.hidden],
    }


def _draw_subdivision(panel: Panel, data: PatchworkInput, labels: bool = True) -> None:
    for t in data.triangles:
        pts = [data.point(i) for i in t]
        panel.polyline(pts, "#aaaaaa", 0.8, closed=True)
    for v in data.vertices:
        color = PLUS if v.sign > 0 else MINUS
        panel.marker(v.k, v.l, color, 3.5, fill=v.sign > 0)
        if labels:
            panel.text(v.k + 0.18, v.l + 0.12, "+" if v.sign > 0 else "-", color)


def _draw_curve(panel: Panel, curve, color="#000000", width=2.0) -> None:
    for a in curve.arcs:
        panel.polyline(a.points, color, width)
    for loop in curve.loops:
        panel.polyline(loop, color, width, closed=True)


def _envelope_panel(data: PatchworkInput) -> Panel:
    env = build_envelope(envelope_planes(data))
    pts = [v.point for v in env.vertices] or [(Fraction(0), Fraction(0))]
    lo = float(min(min(p) for p in pts)) - 2
    hi = float(max(max(p) for p in pts)) + 2
    panel = Panel("envelope of k u + l v - nu", (lo, hi, lo, hi))
    far = 4 * (hi - lo)
    split = [v.sign for v in data.vertices]
    cut = {frozenset(x.faces) for x in env.edges if split[x.faces[0]] != split[x.faces[1]]}
    for x in env.edges:
        a = tuple(float(c) for c in x.start)
        if x.kind == "segment":
            b = tuple(float(c) for c in x.end)
        else:
            b = (a[0] + far * x.direction[0], a[1] + far * x.direction[1])
            if x.kind == "line":
                a = (a[0] - far * x.direction[0], a[1] - far * x.direction[1])
        hot = frozenset(x.faces) in cut
        panel.segment(a, b, "#000000" if hot else "#999999", 2.0 if hot else 0.8)
    for v in env.vertices:
        panel.marker(v.point[0], v.point[1], "#000000", 2.0)
    return panel


def cmd_patchwork(
    path: str, stage: str, t: float | None = None, out: str | None = None
) -> dict[str, Any]:
    data, _ = load_input(path)
    m = data.m
    if stage == "check":
        report = {"kind": "check", **_check_report(data)}
        if out:
            dual = Panel("triangulation and signs", (-0.5, m + 0.5, -0.5, m + 0.5), "k", "l")
            _draw_subdivision(dual, data)
            Figure([_envelope_panel(data), dual]).write(out)
        if not (report["convex"] and report["generic"]):
            raise CliError("input fails the convexity or genericity check", PRECONDITION, report)
        return report
    if stage == "curve":
        curve = combinatorial_patchwork(data)
        if out:
            panel = Panel("curve in the first quadrant", (-0.5, m + 0.5, -0.5, m + 0.5), "k", "l")
            _draw_subdivision(panel, data)
            _draw_curve(panel, curve)
            Figure([panel]).write(out)
        return {"kind": "curve", "curve": curve_to_json(curve)}
    if stage in ("affine", "projective"):
        ext = affine_extension(data)
        curve = combinatorial_patchwork(ext)
        if stage == "projective":
            proj = projective_glue(curve)
            return {
                "kind": "projective",
                "components": list(proj.kinds),
                "ovals": proj.ovals,
                "pseudolines": proj.pseudolines,
            }
        if out:
            first = Panel("initial data", (-0.5, m + 0.5, -0.5, m + 0.5), "k", "l")
            _draw_subdivision(first, data)
            _draw_curve(first, combinatorial_patchwork(data))
            whole = Panel("curve on the whole plane", (-m - 0.5, m + 0.5, -m - 0.5, m + 0.5), "k", "l")
            _draw_subdivision(whole, ext, labels=m <= 3)
            _draw_curve(whole, curve)
            Figure([first, whole]).write(out)
        return {
            "kind": "affine",
            "curve": curve_to_json(curve),
            "vertices": [
                {"k": v.k, "l": v.l, "sign": "+" if v.sign > 0 else "-", "nu": _q(v.nu)}
                for v in ext.vertices
            ],
        }
    if stage == "poly":
        _convexity_gate(data)
        report: dict[str, Any] = {"kind": "poly", "symbolic": format_symbolic(data)}
        terms = []
        for v in sorted(data.vertices, key=lambda v: (v.k + v.l, -v.k)):
            row: dict[str, Any] = {"k": v.k, "l": v.l, "sign": "+" if v.sign > 0 else "-", "nu": _q(v.nu)}
            if t is not None:
                row["coefficient"] = v.sign * t ** float(v.nu)
            terms.append(row)
        report["terms"] = terms
        if t is not None:
            report["t"] = t
            report["numeric"] = format_numeric(data, t)
        return report
    raise CliError(f"unknown stage {stage!r}")


# ---- verify ----------------------------------------------------------------


def _comparison_json(c) -> dict[str, Any]:
    return {
        "match": c.match,
        "predicted": c.predicted.to_json(),
        "traced": c.traced.to_json(),
        "reasons": list(c.reasons),
    }


def cmd_verify(
    path: str,
    resolution: int | None = None,
    patience: int | None = None,
    max_refinements: int | None = None,
    figure: str | None = None,
) -> dict[str, Any]:
    """Trace ``b_t`` at shrinking ``t`` and compare with the combinatorial curve."""
    data, settings = load_input(path)
    _convexity_gate(data)
    res = resolution or settings.get("resolution", 512)
    pat = patience or settings.get("patience", 3)
    steps = max_refinements or settings.get("max_refinements", 12)
    try:
        quad = stabilize_t(data, res, max_refinements=steps, patience=pat)
        aff = stabilize_t(data, res, max_refinements=steps, patience=pat, affine=True)
    except StabilizationError as exc:
        history = [{"log_t": lt, "summary": s.to_json()} for lt, s in exc.history]
        raise CliError(str(exc), MISMATCH, {"kind": "stabilization", "history": history}) from None

    curve = combinatorial_patchwork(data)
    ext_curve = combinatorial_patchwork(affine_extension(data))
    c_quad = compare_topology(curve, quad.report)
    c_aff = compare_topology(ext_curve, aff.report)
    c_proj = compare_topology(projective_glue(ext_curve).summary(), aff.report.projective_summary())
    report = {
        "kind": "verify",
        "match": bool(c_quad.match and c_aff.match and c_proj.match),
        "t": quad.t,
        "log_t": quad.log_t,
        "affine_t": aff.t,
        "affine_log_t": aff.log_t,
        "resolution": res,
        "quadrant": _comparison_json(c_quad),
        "affine": _comparison_json(c_aff),
        "projective": _comparison_json(c_proj),
        "history": [{"log_t": lt, "summary": s.to_json()} for lt, s in quad.history],
    }
    if figure:
        _verify_figure(data, curve, quad).write(figure)
    return report


def _verify_figure(data: PatchworkInput, curve, quad) -> Figure:
    m = data.m
    env = build_envelope(envelope_planes(data))
    tropical = separating_line(env, [v.sign for v in data.vertices])
    scale = abs(quad.log_t)
    w = quad.report.window
    box = (w.u_lo / scale, w.u_hi / scale, w.v_lo / scale, w.v_hi / scale)
    traced = Panel(f"b_t = 0 at t = {quad.t:.3g}, axes / |ln t|", box)
    far = 4 * (box[1] - box[0])
    for a in tropical.arcs:
        pts = [tuple(float(c) for c in p) for p in a.points]
        if a.start_dir:
            pts.insert(0, (pts[0][0] + far * a.start_dir[0], pts[0][1] + far * a.start_dir[1]))
        if a.end_dir:
            pts.append((pts[-1][0] + far * a.end_dir[0], pts[-1][1] + far * a.end_dir[1]))
        traced.polyline(pts, "#999999", 3.0)
    for loop in tropical.loops:
        traced.polyline(loop, "#999999", 3.0, closed=True)
    for arr in [*quad.report.arcs, *quad.report.loops]:
        traced.polyline((arr / scale).tolist(), PALETTE[1], 1.2)
    traced.legend.extend([("tropical limit", "#999999"), ("traced curve", PALETTE[1])])
    pred = Panel("predicted curve", (-0.5, m + 0.5, -0.5, m + 0.5), "k", "l")
    _draw_subdivision(pred, data)
    _draw_curve(pred, curve)
    return Figure([pred, traced])


# ---- roots -----------------------------------------------------------------


def cmd_roots(
    poly: str,
    window: tuple[float, float] | None = None,
    samples: int = 2001,
    negative: bool = False,
    out: str | None = None,
) -> dict[str, Any]:
    try:
        terms = parse_univariate(poly)
    except ParseError as exc:
        raise CliError(str(exc)) from None
    plus = {k: b for k, (s, b) in terms.items() if s > 0}
    minus = {k: b for k, (s, b) in terms.items() if s < 0}
    if not plus:
        # -p has the same roots
        plus, minus = minus, plus
    q = SignedPolynomial1(
        PosPolynomial1.from_logs(plus), PosPolynomial1.from_logs(minus) if minus else None
    )
    if negative:
        q = q.reflect()
    if q.minus is None:
        side = "negative" if negative else "positive"
        raise CliError(f"{poly!r}: no sign change possible, all coefficients of the {side}-root problem agree")
    if window is None:
        window = root_window(q)
    roots = positive_roots_bracket(q, window, samples)
    sgn = -1.0 if negative else 1.0
    report = {
        "kind": "roots",
        "polynomial": poly,
        "negative": negative,
        "window": [float(window[0]), float(window[1])],
        "roots": [
            {
                "x": sgn * r.x,
                "u": float(r.u),
                "bracket": [float(r.u_lo), float(r.u_hi)],
                "suspected_tangency": bool(r.suspected_tangency),
            }
            for r in roots
        ],
    }
    if out:
        us = np.linspace(window[0], window[1], samples)
        Lp, Lm = np.asarray(eval_L(q.plus, us)), np.asarray(eval_L(q.minus, us))
        v_lo = math.floor(float(min(Lp.min(), Lm.min())) - 1)
        v_hi = math.ceil(float(max(Lp.max(), Lm.max())) + 1)
        title = f"roots of {poly}" + (" at -x" if negative else "")
        panel = Panel(title, (window[0], window[1], v_lo, v_hi))
        panel.polyline(zip(us, Lp), PLUS, 1.8, label="positive part")
        panel.polyline(zip(us, Lm), MINUS, 1.8, label="negative part")
        for r in roots:
            v = float(eval_L(q.plus, r.u))
            panel.segment((r.u, v_lo), (r.u, v_hi), "#777777", 0.6, "3 3")
            panel.marker(r.u, v, "#000000", 3.5)
        Figure([panel]).write(out)
    return report


# ---- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="logpatch", description="Log-paper graphs and patchworked curves.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", help="log-paper graphs of positive polynomials")
    g.add_argument("--poly", action="append", required=True, help="polynomial in x, repeatable")
    g.add_argument("--h", action="append", type=_positive_h, default=[], help="deformation parameter, repeatable")
    g.add_argument("--window", type=_window, help="u-range LO:HI")
    g.add_argument("--samples", type=int, default=1001, help="grid points on the u-range")
    g.add_argument("--out", help="SVG output path")
    g.add_argument("--json", help="also write the report here")

    p = sub.add_parser("patchwork", help="run one stage of the patchwork pipeline")
    p.add_argument("input", help="input JSON document")
    p.add_argument("--stage", choices=["check", "curve", "affine", "projective", "poly"], default="check")
    p.add_argument("--t", type=_unit_t, help="evaluate the patchwork polynomial at this t")
    p.add_argument("--out", help="SVG output path")
    p.add_argument("--json", help="also write the report here")

    v = sub.add_parser("verify", help="trace the true curve and compare topologies")
    v.add_argument("input", help="input JSON document")
    v.add_argument("--resolution", type=int, help="grid cells per side (default 512)")
    v.add_argument("--patience", type=int, help="agreeing traces needed to stop (default 3)")
    v.add_argument("--max-refinements", type=int, help="squarings of t before giving up (default 12)")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--figure", help="SVG output path")

    r = sub.add_parser("roots", help="positive (or negative) roots from log-paper graphs")
    r.add_argument("--poly", required=True, help="real polynomial in x")
    r.add_argument("--window", type=_window, help="u-range LO:HI (default from root bounds)")
    r.add_argument("--samples", type=int, default=2001, help="sign samples on the u-range")
    r.add_argument("--negative", action="store_true", help="roots of p(-x), reported as negative x")
    r.add_argument("--out", help="SVG output path")
    r.add_argument("--json", help="also write the report here")
    return ap


def _glue_values(argv: Sequence[str]) -> list[str]:
    # "--window -8:8" would otherwise be read as an unknown option
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a in ("--window", "--h", "--t", "--poly"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(_glue_values(sys.argv[1:] if argv is None else argv))
    try:
        if args.command == "graph":
            if args.samples < 2:
                raise CliError("--samples must be at least 2")
            report = cmd_graph(args.poly, args.h, args.window, args.samples, args.out)
            _emit(report, args.json)
        elif args.command == "patchwork":
            report = cmd_patchwork(args.input, args.stage, args.t, args.out)
            _emit(report, args.json)
        elif args.command == "verify":
            report = cmd_verify(args.input, args.resolution, args.patience, args.max_refinements, args.figure)
            _emit(report, args.out)
            return OK if report["match"] else MISMATCH
        else:
            if args.samples < 2:
                raise CliError("--samples must be at least 2")
            report = cmd_roots(args.poly, args.window, args.samples, args.negative, args.out)
            _emit(report, args.json)
    except CliError as exc:
        if exc.report is not None:
            print(json.dumps(exc.report, indent=2, ensure_ascii=False))
        print(f"logpatch {args.command}: {exc}", file=sys.stderr)
        return exc.code
    return OK


if __name__ == "__main__":
    sys.exit(main())
