import math

import pytest

from logpatch.polyparse import ParseError, describe_term, parse_polynomial, parse_univariate


def coeffs(text):
    return {kl: s * math.exp(b) for kl, (s, b) in parse_polynomial(text).items()}


@pytest.mark.parametrize(
    "text,want",
    [
        ("1+x", {(0, 0): 1, (1, 0): 1}),
        ("x^2-3x+2", {(2, 0): 1, (1, 0): -3, (0, 0): 2}),
        ("-0.001 + x + y - 1e-06*x^2 - 1e-09*y^2", {(0, 0): -1e-3, (1, 0): 1, (0, 1): 1, (2, 0): -1e-6, (0, 2): -1e-9}),
        ("2*x*y^3", {(1, 3): 2}),
        ("x^2 y", {(2, 1): 1}),
        ("−x + 1", {(1, 0): -1, (0, 0): 1}),
        (".5x", {(1, 0): 0.5}),
    ],
)
def test_decimal_forms(text, want):
    got = coeffs(text)
    assert got.keys() == want.keys()
    for kl, a in want.items():
        assert got[kl] == pytest.approx(a, rel=1e-14)


def test_exponential_coefficients_stay_in_log_form():
    terms = parse_polynomial("1+e^5x+x^2")
    assert terms[(1, 0)] == (1, 5.0)
    assert parse_polynomial("1+e^-500x")[(1, 0)] == (1, -500.0)
    assert parse_polynomial("e^(2.5)y - exp(-3)")[(0, 1)] == (1, 2.5)
    assert parse_polynomial("e^(2.5)y - exp(-3)")[(0, 0)] == (-1, -3.0)


def test_zero_terms():
    assert parse_polynomial("1 + 0x") == {(0, 0): (1, 0.0)}
    assert parse_polynomial("1 + 0x", keep_zero=True)[(1, 0)] == (0, -math.inf)
    with pytest.raises(ParseError, match="zero polynomial"):
        parse_polynomial("0")


@pytest.mark.parametrize("text", ["", "1 +", "x^", "1 + + x", "2 3x^2 ^", "x + x", "1 x 2", "e^x"])
def test_rejects(text):
    with pytest.raises(ParseError):
        parse_polynomial(text)


def test_univariate():
    assert parse_univariate("x^3 - 1") == {3: (1, 0.0), 0: (-1, 0.0)}
    with pytest.raises(ParseError, match="involves y"):
        parse_univariate("x + y")


def test_describe_term():
    assert describe_term(0) == "constant term"
    assert describe_term(2) == "x^2"
    assert describe_term(1, 3) == "x*y^3"
