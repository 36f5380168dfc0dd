"""Univariate polynomials with positive coefficients on log paper.

With ``u = ln x`` the monomial ``a x^k`` becomes the line ``v = k u + b`` where
``b = ln a``.  A polynomial becomes the curve ``L_p(u) = ln sum e^(k u + b_k)``,
which sits in a strip of width ``ln(#terms)`` above the broken line
``M_p(u) = max(k u + b_k)``.  All evaluation goes through the semiring
operations of :mod:`logpatch.semiring`: ``L_p`` is the polynomial with
coefficients ``b_k`` evaluated in S_1, ``M_p`` the same polynomial in S_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .semiring import DeformLike, as_deform, tropical_sum

__all__ = [
    "PosPolynomial1",
    "SignedPolynomial1",
    "TropicalPoly1",
    "eval_L",
    "eval_M",
    "eval_scaled",
    "tropical_limit",
    "dequantizing_member",
    "RootBracket",
    "positive_roots_bracket",
    "root_window",
    "TANGENCY_EPS",
]

TANGENCY_EPS = 1e-13
REFINE_TOL = 1e-12


@dataclass(frozen=True)
class PosPolynomial1:
    """Sparse polynomial with positive coefficients, stored by log-coefficient.

    ``terms`` is a sorted tuple of ``(k, b_k)`` with ``b_k = ln a_k``.  The log
    form is the source of truth so that members of a dequantizing family with
    astronomically large or small coefficients stay representable.
    """

    terms: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a polynomial needs at least one term")
        ks = [k for k, _ in self.terms]
        if len(set(ks)) != len(ks):
            raise ValueError("exponents must be distinct")
        for k, b in self.terms:
            if int(k) != k or k < 0:
                raise ValueError(f"exponent must be a nonnegative integer, got {k!r}")
            if not math.isfinite(b):
                raise ValueError(f"log-coefficient of x^{k} is not finite")
        object.__setattr__(
            self, "terms", tuple(sorted((int(k), float(b)) for k, b in self.terms))
        )

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[int, float]) -> "PosPolynomial1":
        terms = []
        for k, a in coeffs.items():
            if not (a > 0 and math.isfinite(a)):
                raise ValueError(f"coefficient of x^{k} must be positive, got {a!r}")
            terms.append((k, math.log(a)))
        return cls(tuple(terms))

    @classmethod
    def from_logs(cls, logs: Mapping[int, float]) -> "PosPolynomial1":
        return cls(tuple(logs.items()))

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.terms)

    @property
    def logs(self) -> tuple[float, ...]:
        return tuple(b for _, b in self.terms)

    @property
    def coefficients(self) -> dict[int, float]:
        """Coefficients ``a_k``; may overflow to ``inf`` or underflow to 0."""
        out = {}
        for k, b in self.terms:
            try:
                out[k] = math.exp(b)
            except OverflowError:
                out[k] = math.inf
        return out

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        return self.terms[-1][0]

    def __call__(self, x: float) -> float:
        """Plain evaluation at ``x > 0`` (exponentiates; for small cases only)."""
        return math.fsum(a * x**k for k, a in self.coefficients.items())


@dataclass(frozen=True)
class SignedPolynomial1:
    """``p = plus - minus`` with plus and minus sharing no exponent."""

    plus: PosPolynomial1
    minus: PosPolynomial1 | None = None

    def __post_init__(self) -> None:
        if self.minus is not None and set(self.plus.exponents) & set(self.minus.exponents):
            raise ValueError("p+ and p- must not share an exponent")

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[int, float]) -> "SignedPolynomial1":
        """Canonical split of a real polynomial by coefficient sign; zeros dropped."""
        pos = {k: a for k, a in coeffs.items() if a > 0}
        neg = {k: -a for k, a in coeffs.items() if a < 0}
        if not pos:
            raise ValueError("polynomial has no positive coefficient")
        return cls(
            PosPolynomial1.from_coefficients(pos),
            PosPolynomial1.from_coefficients(neg) if neg else None,
        )

    def reflect(self) -> "SignedPolynomial1":
        """``p(-x)``: odd-degree terms change sides."""
        coeffs: dict[int, tuple[int, float]] = {}
        for sign, part in ((1, self.plus), (-1, self.minus)):
            if part is None:
                continue
            for k, b in part.terms:
                coeffs[k] = (sign * (-1) ** k, b)
        pos = {k: b for k, (s, b) in coeffs.items() if s > 0}
        neg = {k: b for k, (s, b) in coeffs.items() if s < 0}
        if not pos:
            pos, neg = neg, pos  # overall sign does not move roots
        return SignedPolynomial1(
            PosPolynomial1.from_logs(pos), PosPolynomial1.from_logs(neg) if neg else None
        )

    @property
    def signed_coefficients(self) -> dict[int, float]:
        out = dict(self.plus.coefficients)
        if self.minus is not None:
            out.update({k: -a for k, a in self.minus.coefficients.items()})
        return out


@dataclass(frozen=True)
class TropicalPoly1:
    """Pointwise max of affine pieces ``k u + b``, one piece per slope."""

    pieces: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        slopes = [k for k, _ in self.pieces]
        if not slopes:
            raise ValueError("a tropical polynomial needs at least one piece")
        if len(set(slopes)) != len(slopes):
            raise ValueError("pieces must have distinct slopes")

    def __call__(self, u):
        return eval_M(self, u)

    def corners(self) -> list[float]:
        """Breakpoints of the broken line, ascending."""
        hull: list[tuple[int, float]] = []
        for k, b in sorted(self.pieces):
            while hull:
                k1, b1 = hull[-1]
                if len(hull) >= 2:
                    k0, b0 = hull[-2]
                    # piece 1 is dominated when it never beats both neighbours
                    if (b0 - b1) * (k - k1) >= (b1 - b) * (k1 - k0):
                        hull.pop()
                        continue
                break
            hull.append((k, b))
        return [(b0 - b1) / (k1 - k0) for (k0, b0), (k1, b1) in zip(hull, hull[1:])]


def tropical_limit(p: PosPolynomial1) -> TropicalPoly1:
    return TropicalPoly1(p.terms)


def _lines(terms: Iterable[tuple[int, float]], u) -> np.ndarray | list[float]:
    if np.ndim(u) == 0:
        u = float(u)
        if not math.isfinite(u):
            raise ValueError("u must be finite")
        return [k * u + b for k, b in terms]
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("u must be finite")
    return np.stack([k * u + b for k, b in terms])


def eval_L(p: PosPolynomial1, u):
    """Log-paper ordinate ``ln p(e^u)``; scalar or array ``u``."""
    return tropical_sum(_lines(p.terms, u), 1.0)


def eval_M(p: PosPolynomial1 | TropicalPoly1, u):
    """Broken line ``max_k (k u + b_k)``."""
    terms = p.pieces if isinstance(p, TropicalPoly1) else p.terms
    return tropical_sum(_lines(terms, u), 0.0)


def eval_scaled(p: PosPolynomial1, u, d: DeformLike):
    """Ordinate of the rescaled graph of ``p_h``: ``h ln sum e^((k u + b_k)/h)``."""
    dd = as_deform(d)
    if dd.h <= 0:
        raise ValueError("scaled graphs need h > 0; use eval_M for h = 0")
    return tropical_sum(_lines(p.terms, u), dd)


def dequantizing_member(p: PosPolynomial1, d: DeformLike) -> PosPolynomial1:
    """``p_h`` with coefficients ``a_k^(1/h)``, kept in log form ``b_k/h``."""
    h = as_deform(d).h
    if h <= 0:
        raise ValueError("dequantizing family is indexed by h > 0")
    return PosPolynomial1(tuple((k, b / h) for k, b in p.terms))


@dataclass(frozen=True)
class RootBracket:
    u_lo: float
    u_hi: float
    u: float
    suspected_tangency: bool = False

    @property
    def x(self) -> float:
        return math.exp(self.u)


def _gap(q: SignedPolynomial1, u: float) -> float:
    return eval_L(q.plus, u) - eval_L(q.minus, u)


def root_window(q: SignedPolynomial1, margin: float = 1.0) -> tuple[float, float]:
    """Log-window holding every positive root (Cauchy bounds on p and its reversal)."""
    if q.minus is None:
        raise ValueError("no positive roots: p- is empty")
    terms = [(k, b) for k, b in q.plus.terms] + [(k, b) for k, b in q.minus.terms]
    terms.sort()
    (k_lo, b_lo), (k_hi, b_hi) = terms[0], terms[-1]
    upper = np.logaddexp(0.0, max(b - b_hi for _, b in terms[:-1]))
    lower = -np.logaddexp(0.0, max(b - b_lo for _, b in terms[1:]))
    return float(lower - margin), float(upper + margin)


def positive_roots_bracket(
    q: SignedPolynomial1,
    window: tuple[float, float] | None = None,
    samples: int = 2001,
    refine: bool = True,
) -> list[RootBracket]:
    """Positive roots of ``p+ - p-`` as brackets in ``u = ln x``.

    The sign of ``F(u) = L_{p+}(u) - L_{p-}(u)`` is sampled on a uniform grid.
    Each sign change is bisected to ``|du| < 1e-12``.  A node where
    ``|F| < 1e-13`` is reported as a root at that node; when the nearest
    nonzero neighbours share a sign it is flagged as a suspected tangency.
    """
    if q.minus is None:
        raise ValueError("no positive roots: p- is empty, p+ > 0 on x > 0")
    if samples < 2:
        raise ValueError("need at least two samples")
    lo, hi = root_window(q) if window is None else window
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"bad window {window!r}")

    us = np.linspace(lo, hi, samples)
    f = np.asarray(eval_L(q.plus, us) - eval_L(q.minus, us))
    s = np.where(np.abs(f) < TANGENCY_EPS, 0, np.sign(f)).astype(int)

    out: list[RootBracket] = []
    for i in range(samples):
        if s[i] == 0:
            left = next((s[j] for j in range(i - 1, -1, -1) if s[j] != 0), 0)
            right = next((s[j] for j in range(i + 1, samples) if s[j] != 0), 0)
            out.append(RootBracket(us[i], us[i], float(us[i]), left == right and left != 0))
        elif i + 1 < samples and s[i] * s[i + 1] < 0:
            a, b = float(us[i]), float(us[i + 1])
            root = _bisect(q, a, b, s[i]) if refine else 0.5 * (a + b)
            out.append(RootBracket(a, b, root))
    return out


def _bisect(q: SignedPolynomial1, a: float, b: float, sign_a: int) -> float:
    while b - a > REFINE_TOL:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = _gap(q, mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (sign_a > 0):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)
