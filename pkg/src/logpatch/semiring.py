"""The deformation family of semirings S_h.

Every S_h is the real line.  Multiplication is ordinary addition; addition
is ``max`` at ``h == 0`` and the log-shifted sum ``h*log(e^(a/h) + e^(b/h))``
for ``h > 0``.  The map ``x -> h*log(x)`` carries positive reals with their
usual operations onto S_h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

__all__ = [
    "Deform",
    "as_deform",
    "tropical_add",
    "tropical_mul",
    "tropical_sum",
    "dequantize",
    "quantize",
]


@dataclass(frozen=True)
class Deform:
    """Deformation parameter; ``h == 0`` is the idempotent (max-plus) regime."""

    h: float

    def __post_init__(self) -> None:
        h = float(self.h)
        if not math.isfinite(h) or h < 0:
            raise ValueError(f"deformation parameter must be finite and >= 0, got {self.h!r}")
        object.__setattr__(self, "h", h)

    @property
    def idempotent(self) -> bool:
        return self.h == 0.0

    @classmethod
    def from_dilation(cls, c: float) -> "Deform":
        """The log-paper dilation ratio C corresponds to h = 1/C."""
        if not c > 0:
            raise ValueError(f"dilation ratio must be positive, got {c!r}")
        return cls(1.0 / c)

    @classmethod
    def from_t(cls, t: float) -> "Deform":
        """Patchwork parameter t in (0, 1) corresponds to h = -1/ln t."""
        if not 0 < t < 1:
            raise ValueError(f"t must lie in (0, 1), got {t!r}")
        return cls(-1.0 / math.log(t))


DeformLike = Union[Deform, float, int]


def as_deform(d: DeformLike) -> Deform:
    return d if isinstance(d, Deform) else Deform(d)


def _finite(*xs: float) -> None:
    for x in xs:
        if not math.isfinite(x):
            raise ValueError(f"semiring elements must be finite reals, got {x!r}")


def tropical_add(a: float, b: float, d: DeformLike) -> float:
    """``a (+)_h b``, stable for small ``h``."""
    h = as_deform(d).h
    a, b = float(a), float(b)
    _finite(a, b)
    hi = a if a >= b else b
    if h == 0.0:
        return hi
    return hi + h * math.log1p(math.exp(-abs(a - b) / h))


def tropical_mul(a: float, b: float, d: DeformLike = 0.0) -> float:
    """``a (.)_h b = a + b`` for every ``h``."""
    as_deform(d)
    a, b = float(a), float(b)
    _finite(a, b)
    return a + b


def tropical_sum(values: Iterable[float] | np.ndarray, d: DeformLike, axis: int = 0):
    """n-ary ``(+)_h`` with a single max extraction.

    Scalars in, scalar out.  An ndarray is reduced along ``axis``; that path
    is what the grid evaluators use.
    """
    h = as_deform(d).h
    if isinstance(values, np.ndarray):
        if values.shape[axis] == 0:
            raise ValueError("empty tropical sum has no finite value")
        if not np.all(np.isfinite(values)):
            raise ValueError("semiring elements must be finite reals")
        arg = np.expand_dims(np.argmax(values, axis=axis), axis)
        top = np.take_along_axis(values, arg, axis=axis)
        if h == 0.0:
            return np.squeeze(top, axis=axis)
        # the maximal term contributes exactly 1; drop it and use log1p
        e = np.exp((values - top) / h)
        np.put_along_axis(e, arg, 0.0, axis=axis)
        rest = np.sum(e, axis=axis, keepdims=True)
        return np.squeeze(top + h * np.log1p(rest), axis=axis)

    xs = [float(v) for v in values]
    if not xs:
        raise ValueError("empty tropical sum has no finite value")
    _finite(*xs)
    i = max(range(len(xs)), key=xs.__getitem__)
    top = xs[i]
    if h == 0.0:
        return top
    rest = math.fsum(math.exp((x - top) / h) for j, x in enumerate(xs) if j != i)
    return top + h * math.log1p(rest)


def dequantize(x: float, d: DeformLike) -> float:
    """``D_h(x) = h*ln x`` for ``x > 0`` and ``h > 0``."""
    h = as_deform(d).h
    if h <= 0:
        raise ValueError("dequantization needs h > 0")
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"dequantization is defined on positive reals, got {x!r}")
    return h * math.log(x)


def quantize(b: float, d: DeformLike) -> float:
    """Inverse of :func:`dequantize`: ``e^(b/h)``."""
    h = as_deform(d).h
    if h <= 0:
        raise ValueError("quantization needs h > 0")
    _finite(float(b))
    try:
        x = math.exp(b / h)
    except OverflowError:
        x = math.inf
    if x == 0.0 or math.isinf(x):
        raise OverflowError(f"e^({b}/{h}) is outside the double-precision range")
    return x
