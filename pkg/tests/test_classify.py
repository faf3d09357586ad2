from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cubicwaring import linalg
from cubicwaring.classify import (COMPLEX_LABELS, canonical_complex, classify_complex,
                                  classify_form, classify_real, essential_reduce)
from cubicwaring.formcore import LinearForm, parse_form, substitute
from cubicwaring.quadlinalg import dual_eval, signature
from cubicwaring.scalar import I

coef = st.integers(-4, 4).map(Fraction)
HC = [HealthCheck.large_base_example, HealthCheck.too_slow]


@st.composite
def invertible(draw, n, gaussian=False):
    while True:
        if gaussian:
            A = [[draw(coef) + draw(coef) * I for _ in range(n)] for _ in range(n)]
        else:
            A = [[draw(coef) for _ in range(n)] for _ in range(n)]
        if linalg.det(A) != 0:
            return A


def test_essential_reduction_examples():
    red, T, r = essential_reduce(parse_form("x0*(x1^2+2*x1*x2+x2^2)"))
    assert r == 2
    assert classify_form(parse_form("x0*(x1^2+2*x1*x2+x2^2)"), LinearForm([1, 0, 0])).family.label \
        == "MonomialX0X1sq"
    assert essential_reduce(parse_form("x0^3"))[2] == 1
    F = parse_form("x0*(x0^2+x1^2+x2^2)")
    red, T, r = essential_reduce(F)
    assert r == 3


@pytest.mark.parametrize("L, Q, label", [
    ("x0", "x0^2+x1^2+x2^2", "TypeA"),
    ("x0+I*x1", "x0^2+x1^2+x2^2", "TypeC"),
    ("x0", "x1^2+x2^2", "MonomialX0X1X2"),
    ("x0", "x1^2+x2^2+x3^2", "TypeB"),
    ("x0", "x0^2+x1^2", "Binary"),
    ("x0", "x1^2", "MonomialX0X1sq"),
    ("x0", "x0^2", "CubeL3"),
])
def test_complex_labels(L, Q, label):
    Lf, Qf = parse_form(L), parse_form(Q)
    n = max(Lf.nvars, Qf.nvars)
    fam = classify_form((parse_form(L, n) * parse_form(Q, n)), LinearForm.from_form(parse_form(L, n)))
    assert fam.family.label == label
    assert fam.check()


@pytest.mark.parametrize("L, Q, label, params", [
    ("x0", "x1^2-x2^2", "CaseI", {"eps": [1, -1]}),
    ("x0", "x0^2+x1^2", "CaseII", {"signature": [2, 0]}),
    ("2*x0+x2", "x0^2+x1^2-x2^2", "CaseIII", {"alpha": Fraction(2), "p": 2}),
    ("x0", "x0^2-x1^2-x2^2", "CaseII", {"signature": [1, 2]}),
])
def test_real_labels(L, Q, label, params):
    n = 3 if "x2" in L + Q else 2
    Lf = parse_form(L, n)
    cls = classify_form(Lf * parse_form(Q, n), LinearForm.from_form(Lf), "real")
    assert cls.family.label == label
    for k, v in params.items():
        assert cls.family.params[k] == v
    assert cls.check()


def test_case_iii_alternatives_are_equivalent():
    for L in ("2*x0+x2", "x0/2+x2", "x0+x2"):
        Lf = parse_form(L, 3)
        cls = classify_form(Lf * parse_form("x0^2+x1^2-x2^2", 3), LinearForm.from_form(Lf), "real")
        alt = cls.family.alternative
        assert alt is not None and cls.check(alt)
    assert alt.label == "TangentC"


def test_rejects_non_factor():
    from cubicwaring.classify import ClassificationError
    with pytest.raises(ClassificationError):
        classify_form(parse_form("x0^3+x1^3"), LinearForm([1, 0]))


CANONICAL = [(label, n) for label, n in
             [("TypeA", 2), ("TypeA", 3), ("TypeB", 3), ("TypeB", 4), ("TypeC", 2), ("TypeC", 3),
              ("MonomialX0X1X2", 2), ("MonomialX0X1sq", 1), ("Binary", 1), ("CubeL3", 0)]]


@pytest.mark.parametrize("label, n", CANONICAL)
@settings(max_examples=50, deadline=None, derandomize=True, suppress_health_check=HC)
@given(data=st.data())
def test_label_invariance_over_c(label, n, data):
    N = n + 1
    G = canonical_complex(label, n)
    A = data.draw(invertible(N))
    F = substitute(G, A)
    L = LinearForm([1] + [0] * n).compose(A)
    cls = classify_form(F, L, "complex")
    assert cls.family.label == label
    assert cls.check()
    assert sum(lbl == cls.family.label for lbl in COMPLEX_LABELS) == 1


@pytest.mark.parametrize("label, n", CANONICAL)
@settings(max_examples=10, deadline=None, derandomize=True, suppress_health_check=HC)
@given(data=st.data())
def test_label_invariance_gaussian(label, n, data):
    # witnesses may need nested radicals here; the label must not change
    N = n + 1
    A = data.draw(invertible(N, gaussian=True))
    F = substitute(canonical_complex(label, n), A)
    cls = classify_form(F, LinearForm([1] + [0] * n).compose(A), "complex")
    assert cls.family.label == label
    assert cls.family.witness is None or cls.check()


REAL_CASES = [("x0", "x1^2-x2^2"), ("x0", "x0^2+x1^2+x2^2"), ("2*x0+x2", "x0^2+x1^2-x2^2"),
              ("x0+x2", "x0^2+x1^2-x2^2"), ("x0", "x0^2-x1^2-x2^2"), ("x0+x1", "x1^2+x2^2-x3^2")]


@pytest.mark.parametrize("L, Q", REAL_CASES)
@settings(max_examples=30, deadline=None, derandomize=True, suppress_health_check=HC)
@given(data=st.data())
def test_real_invariants(L, Q, data):
    N = 4 if "x3" in L + Q else 3
    Lf, Qf = parse_form(L, N), parse_form(Q, N)
    A = data.draw(invertible(N))
    L2, Q2 = substitute(Lf, A), substitute(Qf, A)
    before = classify_form(Lf * Qf, LinearForm.from_form(Lf), "real")
    after = classify_form(L2 * Q2, LinearForm.from_form(L2), "real")
    assert after.check()
    assert before.family.n_essential == after.family.n_essential
    from cubicwaring.formcore import matrix_of_quadratic
    s1, s2 = signature(matrix_of_quadratic(Qf)), signature(matrix_of_quadratic(Q2))
    assert s1 == s2 or s1 == (s2[1], s2[0], s2[2])
    d1 = dual_eval(matrix_of_quadratic(Qf), list(LinearForm.from_form(Lf).coeffs))
    d2 = dual_eval(matrix_of_quadratic(Q2), list(LinearForm.from_form(L2).coeffs))
    assert (d1 == 0) == (d2 == 0)
    # CaseII and CaseIII overlap; the set of applicable families is what is invariant
    fams = lambda c: {c.family.label, *c.family.overlap_flags}
    assert fams(before) == fams(after)


def test_classify_complex_accepts_matrices():
    fam = classify_complex([1, 0, 0], [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert fam.label == "TypeA"
    fam = classify_real([1, 0, 0], [[0, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert fam.label == "CaseI"
