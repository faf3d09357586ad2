from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cubicwaring import linalg
from cubicwaring.formcore import parse_form
from cubicwaring.quadlinalg import (ParametricSymMatrix, PencilCertificate, SamplingBudget,
                                    congruence_diagonalize, dual_eval, parametric_det,
                                    pencil_of_partials, pencil_rank_certificate, positive_pattern,
                                    signature)

coef = st.integers(-6, 6).map(Fraction)
HC = [HealthCheck.large_base_example, HealthCheck.too_slow]


@st.composite
def symmetric(draw, n=None):
    n = n or draw(st.integers(1, 4))
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            M[i][j] = M[j][i] = draw(coef)
    return M


@st.composite
def invertible(draw, n):
    while True:
        A = [[draw(coef) for _ in range(n)] for _ in range(n)]
        if linalg.det(A) != 0:
            return A


def _numpy_signature(M):
    ev = np.linalg.eigvalsh(np.array([[float(x) for x in r] for r in M]))
    tol = 1e-9
    return (int((ev > tol).sum()), int((ev < -tol).sum()), int((abs(ev) <= tol).sum()))


def test_hyperbolic_plane():
    P, D = congruence_diagonalize([[0, 1], [1, 0]])
    assert signature([[0, 1], [1, 0]]) == (1, 1, 0)
    PT = linalg.transpose(P)
    assert linalg.matmul(linalg.matmul(PT, [[0, 1], [1, 0]]), P) == D


@settings(max_examples=200, deadline=None, derandomize=True)
@given(symmetric())
def test_diagonalization_exact(M):
    P, D = congruence_diagonalize(M)
    assert linalg.det(P) != 0
    assert linalg.matmul(linalg.matmul(linalg.transpose(P), M), P) == D
    assert all(D[i][j] == 0 for i in range(len(M)) for j in range(len(M)) if i != j)


@settings(max_examples=200, deadline=None, derandomize=True)
@given(symmetric())
def test_signature_matches_eigenvalues(M):
    assert signature(M) == _numpy_signature(M)


TEST_MATRICES = [
    [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
    [[0, 1, 2], [1, 0, 3], [2, 3, 0]],
    [[2, 1, 0], [1, 2, 1], [0, 1, 2]],
]


@pytest.mark.parametrize("M", TEST_MATRICES)
@settings(max_examples=100, deadline=None, derandomize=True, suppress_health_check=HC)
@given(data=st.data())
def test_sylvester_invariance(M, data):
    A = data.draw(invertible(3))
    At = linalg.transpose(A)
    assert signature(linalg.matmul(linalg.matmul(At, M), A)) == signature(M)


@settings(max_examples=100, deadline=None, derandomize=True, suppress_health_check=HC)
@given(data=st.data())
def test_dual_eval_equivariant(data):
    M = data.draw(symmetric(3))
    a = [data.draw(coef) for _ in range(3)]
    A = data.draw(invertible(3))
    At = linalg.transpose(A)
    M2 = linalg.matmul(linalg.matmul(At, M), A)
    a2 = linalg.matvec(At, a)
    assert dual_eval(M2, a2) == linalg.det(A) ** 2 * dual_eval(M, a)


def test_dual_eval_is_adjugate_form():
    M = [[1, 2, 0], [2, -1, 1], [0, 1, 3]]
    a = [1, -1, 2]
    S = sp.Matrix(M)
    v = sp.Matrix(a)
    assert dual_eval(M, a) == (v.T * S.adjugate() * v)[0]


@settings(max_examples=50, deadline=None, derandomize=True, suppress_health_check=HC)
@given(data=st.data())
def test_parametric_det_specializes(data):
    n = data.draw(st.integers(1, 4))
    p = data.draw(st.integers(1, 3))
    M = ParametricSymMatrix.from_matrices(data.draw(symmetric(n)),
                                          [data.draw(symmetric(n)) for _ in range(p)])
    det = parametric_det(M)
    pt = [data.draw(coef) for _ in range(p)]
    assert det.evaluate(pt) == linalg.det(M.specialize(pt))


def test_mixed_sign_pencil_determinant():
    # x0*(x0^2 - x1^2 - ... - xn^2): det of F_0 + sum t_k F_k, against sympy
    for n in range(2, 6):
        F = parse_form("x0*(x0^2" + "".join(f"-x{i}^2" for i in range(1, n + 1)) + ")")
        M = pencil_of_partials(F, 0, range(1, n + 1))
        t = sp.symbols(f"t1:{n + 1}")
        S = sp.zeros(n + 1, n + 1)
        S[0, 0] = 3
        for k in range(1, n + 1):
            S[0, k] = S[k, 0] = -t[k - 1]
            S[k, k] = -1
        ok, cert = pencil_rank_certificate(M, n + 1, "real")
        assert ok and cert.kind == "PositivePattern"
        got = sp.expand(sum(sp.Rational(c) * sp.Mul(*[x ** e for x, e in zip(t, ex)])
                            for ex, c in cert.polynomial.terms.items()))
        assert sp.expand(S.det()) == got
        assert sp.expand(got - (-1) ** n * (sum(x ** 2 for x in t) + 3)) == 0


def test_constant_minor_reverifies():
    F = parse_form("x0*(x0^2+x1^2+x2^2+x3^2)")
    M = pencil_of_partials(F, 0, [1, 2, 3])
    ok, cert = pencil_rank_certificate(M, 3, "complex")
    assert ok and cert.kind == "ConstantMinor"
    again = PencilCertificate.from_json(cert.to_json(), M.nparams)
    assert again.verify(M)
    again.value = again.value + 1
    assert not again.verify(M)


def test_complex_refutation():
    # diag(t, 1) has a complex (indeed real) singular member
    M = ParametricSymMatrix.from_matrices([[0, 0], [0, 1]], [[[1, 0], [0, 0]]])
    ok, cert = pencil_rank_certificate(M, 2, "complex", SamplingBudget(trials=0))
    assert not ok and "refuted" in cert.to_json()


def test_positive_pattern_shape():
    from cubicwaring.formcore import parse_poly
    assert positive_pattern(parse_poly("x0^2+x1^2+3", 2))
    assert positive_pattern(parse_poly("-x0^2-3", 1))
    assert not positive_pattern(parse_poly("x0^2-1", 1))
    assert not positive_pattern(parse_poly("x0", 1))


def test_sampling_is_evidence_only():
    M = ParametricSymMatrix.from_matrices([[1, 0], [0, 1]], [[[1, 0], [0, 0]]])
    ok, cert = pencil_rank_certificate(M, 1, "complex", SamplingBudget(trials=5, seed=3))
    # the constant 1x1 minor settles m = 1 rigorously
    assert ok and cert.rigorous
