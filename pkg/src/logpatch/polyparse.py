"""Command-line polynomial literals.

Grammar (whitespace ignored)::

    poly   := term (('+' | '-') term)*          leading sign allowed
    term   := coef ['*'] mono | coef | mono
    coef   := DECIMAL | 'e^' EXP | 'e^(' EXP ')' | 'exp(' EXP ')'
    mono   := factor (['*'] factor)*
    factor := ('x' | 'y') ['^' INT]

``e^q`` coefficients are kept as the exact log ``q``, so ``1+e^5x+x^2`` and
``1+e^-50x`` parse without exponentiating anything.
"""

from __future__ import annotations

import math
import re

__all__ = ["ParseError", "parse_polynomial", "parse_univariate", "describe_term"]

_NUM = r"[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?"
_EXP = r"[+-]?(?:" + _NUM + r")"
_COEF = re.compile(
    rf"(?:e\^\((?P<p>{_EXP})\)|exp\((?P<f>{_EXP})\)|e\^(?P<e>{_EXP})|(?P<d>{_NUM}))"
)
_FACTOR = re.compile(r"\*?(?P<v>[xy])(?:\^(?P<n>[0-9]+))?")


class ParseError(ValueError):
    pass


def parse_polynomial(text: str, *, keep_zero: bool = False) -> dict[tuple[int, int], tuple[int, float]]:
    """Map ``(k, l)`` to ``(sign, ln|coefficient|)``.

    Zero terms are dropped unless ``keep_zero``, in which case they appear
    as ``(0, -inf)``.
    """
    s = re.sub(r"\s+", "", text).replace("−", "-")
    if not s:
        raise ParseError("empty polynomial")
    pos = 0
    out: dict[tuple[int, int], tuple[int, float]] = {}
    first = True
    while pos < len(s):
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' at position {pos} in {text!r}")
        first = False
        start = pos
        logc, zero = 0.0, False
        m = _COEF.match(s, pos)
        # "e^5x": the exponent regex must not swallow a following variable
        if m:
            if m.group("d") is not None:
                val = float(m.group("d"))
                if val == 0:
                    zero = True
                else:
                    logc = math.log(val)
            else:
                logc = float(m.group("p") or m.group("f") or m.group("e"))
            pos = m.end()
        k = l = 0
        while True:
            f = _FACTOR.match(s, pos)
            if not f or (f.group(0).startswith("*") and pos == start):
                break
            e = int(f.group("n")) if f.group("n") else 1
            if f.group("v") == "x":
                k += e
            else:
                l += e
            pos = f.end()
        if pos == start:
            raise ParseError(f"expected a term at position {pos} in {text!r}")
        if (k, l) in out:
            raise ParseError(f"monomial {describe_term(k, l)} appears twice in {text!r}")
        if zero:
            out[(k, l)] = (0, -math.inf)
            continue
        if not math.isfinite(logc):
            raise ParseError(f"coefficient of {describe_term(k, l)} is not finite")
        out[(k, l)] = (sign, logc)
    if not keep_zero:
        out = {key: val for key, val in out.items() if val[0]}
    if not out:
        raise ParseError(f"{text!r} is the zero polynomial")
    return out


def parse_univariate(text: str, *, keep_zero: bool = False) -> dict[int, tuple[int, float]]:
    terms = parse_polynomial(text, keep_zero=keep_zero)
    if any(l for _, l in terms):
        raise ParseError(f"{text!r} involves y; a polynomial in x is expected")
    return {k: v for (k, _), v in terms.items()}


def describe_term(k: int, l: int = 0) -> str:
    parts = [f"{v}^{e}" if e > 1 else v for v, e in (("x", k), ("y", l)) if e]
    return "*".join(parts) or "constant term"
