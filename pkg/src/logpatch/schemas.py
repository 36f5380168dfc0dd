"""JSON documents read and written by the command line.

Input: ``{"degree": m, "vertices": [{"k", "l", "sign", "nu"}...],
"triangles": [[i, j, k]...], "trace": {...}}`` with signs ``"+"``/``"-"``
and ``nu`` an integer or a rational string ``"p/q"``.  Every report carries
a ``"kind"`` and validates against :data:`REPORT_SCHEMA`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

import jsonschema

from .curves import PLCurve, TopologySummary
from .patchwork import InputError, PatchVertex, PatchworkInput

__all__ = [
    "INPUT_SCHEMA",
    "REPORT_SCHEMA",
    "parse_rational",
    "input_from_json",
    "input_to_json",
    "curve_to_json",
    "validate_report",
]

_RATIONAL = {
    "oneOf": [
        {"type": "integer", "minimum": 0},
        {"type": "string", "pattern": r"^\s*\+?[0-9]+(\s*/\s*[0-9]+)?\s*$"},
        {"type": "string", "pattern": r"^\s*\+?[0-9]*\.[0-9]+\s*$"},
    ]
}

INPUT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["degree", "vertices", "triangles"],
    "additionalProperties": False,
    "properties": {
        "degree": {"type": "integer", "minimum": 1},
        "vertices": {
            "type": "array",
            "minItems": 3,
            "items": {
                "type": "object",
                "required": ["k", "l", "sign", "nu"],
                "additionalProperties": False,
                "properties": {
                    "k": {"type": "integer", "minimum": 0},
                    "l": {"type": "integer", "minimum": 0},
                    "sign": {"enum": ["+", "-", "−"]},
                    "nu": _RATIONAL,
                },
            },
        },
        "triangles": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 3,
                "maxItems": 3,
                "items": {"type": "integer", "minimum": 0},
            },
        },
        "trace": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "resolution": {"type": "integer", "minimum": 16},
                "max_refinements": {"type": "integer", "minimum": 1},
                "patience": {"type": "integer", "minimum": 2},
            },
        },
    },
}

_EXACT = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}
_POINT = {"type": "array", "items": _EXACT, "minItems": 2, "maxItems": 2}
_FPOINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_SUMMARY = {
    "type": "object",
    "required": ["components", "crossings"],
    "properties": {
        "components": {"type": "integer", "minimum": 0},
        "crossings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["side", "component"],
                "properties": {"side": {"type": "string"}, "component": {"type": "integer"}},
            },
        },
        "ovals": {"type": "integer", "minimum": 0},
        "pseudolines": {"type": "integer", "minimum": 0},
    },
}
_CURVE = {
    "type": "object",
    "required": ["ambient", "arcs", "loops", "summary"],
    "properties": {
        "ambient": {"enum": ["delta", "affine", "plane"]},
        "degree": {"type": ["integer", "null"]},
        "arcs": {"type": "array", "items": {"type": "array", "items": _POINT}},
        "loops": {"type": "array", "items": {"type": "array", "items": _POINT}},
        "summary": _SUMMARY,
    },
}


def _kind(name: str, required: list[str], props: dict[str, Any]) -> dict[str, Any]:
    return {
        "type": "object",
        "required": ["kind", *required],
        "properties": {"kind": {"const": name}, **props},
    }


_COMPARISON = {
    "type": "object",
    "required": ["match", "predicted", "traced", "reasons"],
    "properties": {
        "match": {"type": "boolean"},
        "predicted": _SUMMARY,
        "traced": _SUMMARY,
        "reasons": {"type": "array", "items": {"type": "string"}},
    },
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "oneOf": [
        _kind(
            "check",
            ["convex", "generic", "convexity_failures", "genericity_violations", "hidden_planes"],
            {
                "convex": {"type": "boolean"},
                "generic": {"type": "boolean"},
                "convexity_failures": {"type": "array"},
                "genericity_violations": {"type": "array"},
                "hidden_planes": {"type": "array"},
            },
        ),
        _kind("curve", ["curve"], {"curve": _CURVE}),
        _kind("affine", ["curve", "vertices"], {"curve": _CURVE, "vertices": {"type": "array"}}),
        _kind(
            "projective",
            ["components", "ovals", "pseudolines"],
            {
                "components": {"type": "array", "items": {"enum": ["oval", "pseudoline"]}},
                "ovals": {"type": "integer"},
                "pseudolines": {"type": "integer"},
            },
        ),
        _kind(
            "poly",
            ["symbolic", "terms"],
            {
                "symbolic": {"type": "string"},
                "numeric": {"type": "string"},
                "t": {"type": "number"},
                "terms": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["k", "l", "sign", "nu"],
                        "properties": {
                            "k": {"type": "integer"},
                            "l": {"type": "integer"},
                            "sign": {"enum": ["+", "-"]},
                            "nu": _EXACT,
                            "coefficient": {"type": "number"},
                        },
                    },
                },
            },
        ),
        _kind(
            "verify",
            ["match", "t", "log_t", "quadrant", "affine", "projective"],
            {
                "match": {"type": "boolean"},
                "t": {"type": "number"},
                "log_t": {"type": "number"},
                "affine_log_t": {"type": "number"},
                "resolution": {"type": "integer"},
                "quadrant": _COMPARISON,
                "affine": _COMPARISON,
                "projective": _COMPARISON,
                "history": {"type": "array"},
            },
        ),
        _kind("stabilization", ["history"], {"history": {"type": "array"}}),
        _kind(
            "roots",
            ["polynomial", "roots"],
            {
                "polynomial": {"type": "string"},
                "negative": {"type": "boolean"},
                "window": _FPOINT,
                "roots": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["x", "u", "bracket", "suspected_tangency"],
                        "properties": {
                            "x": {"type": "number"},
                            "u": {"type": "number"},
                            "bracket": _FPOINT,
                            "suspected_tangency": {"type": "boolean"},
                        },
                    },
                },
            },
        ),
        _kind(
            "graph",
            ["panels", "window"],
            {
                "window": _FPOINT,
                "panels": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["polynomial", "terms", "corners", "max_gap", "bound", "scaled"],
                        "properties": {
                            "polynomial": {"type": "string"},
                            "terms": {"type": "integer"},
                            "corners": {"type": "array", "items": {"type": "number"}},
                            "max_gap": {"type": "number"},
                            "bound": {"type": "number"},
                            "scaled": {"type": "array"},
                        },
                    },
                },
            },
        ),
    ],
}


def parse_rational(x: int | str) -> Fraction:
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    try:
        return Fraction(x.replace(" ", "")) if isinstance(x, str) else Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational: {x!r}") from exc


def input_from_json(doc: dict[str, Any]) -> PatchworkInput:
    try:
        jsonschema.validate(doc, INPUT_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        raise InputError(f"{where}: {exc.message}") from None
    verts = tuple(
        PatchVertex(v["k"], v["l"], 1 if v["sign"] == "+" else -1, parse_rational(v["nu"]))
        for v in doc["vertices"]
    )
    return PatchworkInput(doc["degree"], verts, tuple(tuple(t) for t in doc["triangles"]))


def _exact(x: Fraction) -> str:
    return str(Fraction(x))


def input_to_json(data: PatchworkInput) -> dict[str, Any]:
    return {
        "degree": data.m,
        "vertices": [
            {"k": v.k, "l": v.l, "sign": "+" if v.sign > 0 else "-", "nu": _exact(v.nu)}
            for v in data.vertices
        ],
        "triangles": [list(t) for t in data.triangles],
    }


def curve_to_json(curve: PLCurve) -> dict[str, Any]:
    def pts(seq):
        return [[_exact(a), _exact(b)] for a, b in seq]

    return {
        "ambient": curve.ambient,
        "degree": curve.degree,
        "arcs": [pts(a.points) for a in curve.arcs],
        "loops": [pts(lp) for lp in curve.loops],
        "summary": curve.summary().to_json(),
    }


def summary_to_json(s: TopologySummary) -> dict[str, Any]:
    return s.to_json()


def validate_report(report: dict[str, Any]) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)
