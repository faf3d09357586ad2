from fractions import Fraction

import pytest
import sympy as sp

from cubicwaring.factor import find_linear_factor, rational_roots
from cubicwaring.formcore import divide_by_linear, parse_form


def test_rational_roots():
    s = sp.Symbol("s")
    coeffs = sp.Poly(sp.expand((2 * s - 1) * (s + 3) * (s - 5)), s).all_coeffs()[::-1]
    assert set(rational_roots([int(c) for c in coeffs])) == {Fraction(1, 2), Fraction(-3), Fraction(5)}
    assert rational_roots([1, 0, 1]) == []
    assert rational_roots([0, 0, 1]) == [0]


@pytest.mark.parametrize("text", [
    "x0*(x0*x1+x2^2+x3^2)",
    "(3*x0+x1-2*x2+x3)*(x0^2+x1*x2-x3^2)",
    "x1*(x1^2+x2^2)",
    "x0*x1*x2",
    "(x0+x1)^3",
    "(x0/3-x1)*(x1^2+x0^2)",
    "(x1+2*x2)*(x0^2-x1^2+x2*x3)",
])
def test_finds_factor(text):
    F = parse_form(text)
    L = find_linear_factor(F)
    assert L is not None
    assert divide_by_linear(L, F) is not None


def test_irreducible_gives_none():
    assert find_linear_factor(parse_form("x0^3+x1^3+x2^3")) is None


def test_deterministic():
    F = parse_form("(2*x0-x1+x2)*(x0^2+x1^2-x2^2+x0*x2)")
    assert find_linear_factor(F, seed=4) == find_linear_factor(F, seed=4)
