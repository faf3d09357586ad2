"""Shared helpers: a sympy oracle for exact expansion and acceptance reporting."""
from fractions import Fraction

import sympy as sp

from cubicwaring.scalar import Cyclo, Tower

ZETA = sp.Symbol("zeta")
ACCEPTANCE_LINES: list[str] = []


def sym_scalar(c):
    if isinstance(c, (int, Fraction)):
        c = Fraction(c)
        return sp.Rational(c.numerator, c.denominator)
    if isinstance(c, Tower):
        return sum((sp.Rational(v.numerator, v.denominator) * sp.I ** e * sp.sqrt(m)
                    for (e, m), v in c.coords.items()), sp.Integer(0))
    if isinstance(c, Cyclo):
        return sum((sp.Rational(v.numerator, v.denominator) * ZETA ** k
                    for k, v in enumerate(c.coords)), sp.Integer(0))
    raise TypeError(type(c))


def sym_vars(n):
    return sp.symbols(f"x0:{n}")


def sym_form(F):
    X = sym_vars(F.nvars)
    return sp.Add(*[sym_scalar(c) * sp.Mul(*[x ** k for x, k in zip(X, e)])
                    for e, c in F.terms.items()])


def sym_decomposition(D, nvars):
    X = sym_vars(nvars)
    return sp.Add(*[sym_scalar(c) * sp.Add(*[sym_scalar(a) * x for a, x in zip(lin.coeffs, X)])
                    ** D.degree for c, lin in D.terms])


def sympy_equal(expr_a, expr_b, cyclo_order=None) -> bool:
    """Exact equality; cyclotomic expressions are reduced modulo Phi_N independently."""
    diff = sp.expand(expr_a - expr_b)
    if cyclo_order is not None:
        phi = sp.cyclotomic_poly(cyclo_order, ZETA)
        diff = sp.rem(sp.Poly(diff, ZETA), sp.Poly(phi, ZETA)).as_expr()
    return sp.simplify(sp.expand(diff)) == 0


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
