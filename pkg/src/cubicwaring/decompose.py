"""Explicit sums of powers for every family, checked by exact expansion."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from . import linalg
from .formcore import (BasisChange, Decomposition, Form, FormError, LinearForm,
                       expand_decomposition)
from .scalar import Cyclo, as_scalar, is_real, sign, sqrt, zeta


class DecompositionError(ValueError):
    pass


def _unit(N: int, i: int, c=1) -> list:
    return [Fraction(0)] * i + [as_scalar(c)] + [Fraction(0)] * (N - i - 1)


def _add(u, v, c=1) -> list:
    return [x + c * y for x, y in zip(u, v)]


def verify_decomposition(D: Decomposition, F: Form):
    """(ok, residual) where residual = expansion - F."""
    if D.terms and D.nvars != F.nvars:
        raise FormError("decomposition and form have different numbers of variables")
    if D.degree != F.degree:
        raise FormError("decomposition and form have different degrees")
    residual = expand_decomposition(D, F.nvars) - F
    return residual.is_zero(), residual


def _checked(D: Decomposition, F: Form) -> Decomposition:
    ok, res = verify_decomposition(D, F)
    if not ok:
        raise DecompositionError(f"construction failed to verify, residual {res.to_text()}")
    return D


# -- atomic identities -------------------------------------------------------

class _Builder:
    """Accumulates cubes c * L^3 and a deferred multiple of one base form."""

    def __init__(self, N: int):
        self.N = N
        self.terms: list = []

    def cube(self, c, lin):
        if c != 0:
            self.terms.append((as_scalar(c), LinearForm(lin)))

    def lin_times_square(self, c, L, x):
        """c * L * x^2 = c/6[(L+x)^3 + (L-x)^3] - c/3 L^3; returns the L^3 part."""
        self.cube(Fraction(1, 6) * c, _add(L, x))
        self.cube(Fraction(1, 6) * c, _add(L, x, -1))
        return -Fraction(1, 3) * c

    def lin_times_a_square(self, c, L, a, x):
        """c * L * (a L^2 + x^2) in two cubes; needs sqrt(3a)."""
        c = as_scalar(c)
        p = sqrt(3 * a)
        k = c / (6 * p)
        self.cube(k, _add([p * y for y in L], x))
        self.cube(k, _add([p * y for y in L], x, -1))

    def square_times_lin(self, c, X, Y):
        """c * X^2 * Y = c/6 (X+Y)^3 - c/6 (X-Y)^3 - c/3 Y^3."""
        c = as_scalar(c)
        self.cube(c / 6, _add(X, Y))
        self.cube(-c / 6, _add(X, Y, -1))
        self.cube(-c / 3, Y)

    def xyz(self, c, X, Y, Z):
        """24 XYZ = (X+Y+Z)^3 - (X+Y-Z)^3 - (X-Y+Z)^3 + (X-Y-Z)^3."""
        c = as_scalar(c)
        for sy, sz, s in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
            self.cube(c * s / 24, _add(_add(X, Y, sy), Z, sz))

    def result(self) -> Decomposition:
        return Decomposition(3, list(self.terms))


# -- binary forms ------------------------------------------------------------

@dataclass
class BinaryResult:
    decomposition: Decomposition
    minimal: bool
    notes: list = field(default_factory=list)


def _binary_moments(F: Form):
    d = F.degree
    return [F.terms.get((d - k, k), Fraction(0)) / comb(d, k) for k in range(d + 1)]


def _solve_weights(F: Form, points):
    d = F.degree
    a = _binary_moments(F)
    M = [[(s ** (d - k)) * (t ** k) for s, t in points] for k in range(d + 1)]
    lam = linalg.solve(M, a)
    if lam is None:
        return None
    D = Decomposition(d, [(l, LinearForm([s, t])) for l, (s, t) in zip(lam, points) if l != 0])
    ok, _ = verify_decomposition(D, F)
    return D if ok else None


def _quadratic_roots(g, field_name: str):
    """Distinct roots (s, t) of g0 u^2 + g1 u v + g2 v^2, or a reason string."""
    g0, g1, g2 = g
    disc = g1 * g1 - 4 * g0 * g2
    if disc == 0:
        return "repeated root"
    if field_name == "real":
        if not all(is_real(x) for x in g):
            return "non-real kernel"
        if sign(disc) < 0:
            return "complex roots"
    try:
        r = sqrt(disc)
    except ValueError:
        return "roots outside the tower"
    if g0 != 0:
        return [((-g1 + r) / (2 * g0), Fraction(1)), ((-g1 - r) / (2 * g0), Fraction(1))]
    # one root at infinity
    return [(Fraction(1), Fraction(0)), (-g2 / g1, Fraction(1))]


def sylvester_binary(F: Form, field_name: str = "complex") -> BinaryResult:
    """Shortest decomposition of a binary form reachable with square roots."""
    if F.nvars != 2:
        raise FormError("binary forms only")
    if F.is_zero():
        raise FormError("zero form")
    if field_name == "real" and not F.is_real():
        raise FormError("real decomposition of a non-real form")
    d = F.degree
    a = _binary_moments(F)
    notes = []

    def hankel(r):
        return [[a[m + j] for j in range(r + 1)] for m in range(d - r + 1)]

    K1 = linalg.nullspace(hankel(1))
    if K1:
        g0, g1 = K1[0]
        D = _solve_weights(F, [(g1, -g0)])
        if D is not None:
            return BinaryResult(D, True)
    if d >= 3:
        K2 = linalg.nullspace(hankel(2))
        if len(K2) == 1:
            roots = _quadratic_roots(K2[0], field_name)
            if isinstance(roots, list):
                D = _solve_weights(F, roots)
                if D is not None:
                    return BinaryResult(D, True)
            else:
                notes.append(f"length-2 kernel rejected: {roots}")
                # for cubics these two obstructions force rank 3
                forced = roots in ("repeated root", "complex roots") and d == 3
                if d == 3:
                    D = _cubic_three_terms(F)
                    if D is not None:
                        return BinaryResult(D, forced, notes)
    # always possible: d+1 distinct rational points
    pts = [(Fraction(k), Fraction(1)) for k in range(d + 1)]
    D = _solve_weights(F, pts)
    notes.append("generic Vandermonde fallback")
    return BinaryResult(D, False, notes)


def _cubic_three_terms(F: Form):
    """Three rational points whose cubes span F."""
    a = _binary_moments(F)
    for c1 in range(-3, 4):
        for c2 in range(c1 + 1, 5):
            p1, p2 = -(c1 + c2), c1 * c2
            # g = (u - c1 v)(u - c2 v)(u - c3 v), apolar condition linear in c3
            num = a[0] + a[1] * p1 + a[2] * p2
            den = a[1] + a[2] * p1 + a[3] * p2
            if den == 0:
                continue
            c3 = num / den
            if c3 in (c1, c2):
                continue
            D = _solve_weights(F, [(Fraction(c), Fraction(1)) for c in (c1, c2, c3)])
            if D is not None and len(D) == 3:
                return D
    return None


# -- canonical complex families ---------------------------------------------

def decompose_complex(label: str, n: int) -> Decomposition:
    """Decomposition of the canonical complex form with n+1 variables."""
    from .classify import canonical_complex
    N = n + 1
    b = _Builder(N)
    e = [_unit(N, i) for i in range(N)]
    if label == "CubeL3":
        b.cube(1, e[0])
    elif label in ("TypeA", "Binary"):
        if n < 1:
            raise DecompositionError("TypeA needs n >= 1")
        for i in range(1, N):
            b.lin_times_a_square(1, e[0], Fraction(1, n), e[i])
    elif label == "TypeB":
        if n < 2:
            raise DecompositionError("TypeB needs n >= 2")
        for i in range(1, N):
            lam = Fraction(1) if i < n else Fraction(-(n - 1))
            b.lin_times_a_square(1, e[0], lam, e[i])
    elif label == "TypeC":
        if n < 2:
            raise DecompositionError("TypeC needs n >= 2")
        c0 = sum(b.lin_times_square(1, e[0], e[k]) for k in range(2, N))
        b.square_times_lin(1, e[0], _add(e[1], e[0], c0))
    elif label == "MonomialX0X1sq":
        b.square_times_lin(1, e[1], e[0])
    elif label == "MonomialX0X1X2":
        b.xyz(1, e[0], e[1], e[2])
    else:
        raise DecompositionError(f"no construction for {label!r}")
    return _checked(b.result(), canonical_complex(label, n))


# -- canonical real families -------------------------------------------------

def decompose_real(rep) -> Decomposition:
    """Real decomposition of a real canonical representative (label + params)."""
    from .classify import canonical_real
    label, params, N = rep.label, rep.params, rep.n_essential
    n = N - 1
    b = _Builder(N)
    e = [_unit(N, i) for i in range(N)]
    if label == "CaseI":
        c0 = sum(b.lin_times_square(s, e[0], e[i + 1]) for i, s in enumerate(params["eps"]))
        b.cube(c0, e[0])
    elif label == "CaseII":
        p = params["signature"][0]
        if n == 0:
            b.cube(1, e[0])
        elif p >= 2:
            # negative squares through the three-term identity, the leftover
            # x0^3 is shared out among the positive squares
            c0 = Fraction(1) + sum(b.lin_times_square(-1, e[0], e[j]) for j in range(p, N))
            for i in range(1, p):
                b.lin_times_a_square(1, e[0], c0 / (p - 1), e[i])
        else:
            c0 = Fraction(1) + sum(b.lin_times_square(-1, e[0], e[j]) for j in range(1, N))
            b.cube(c0, e[0])
    elif label == "CaseIII":
        p, alpha = params["p"], params["alpha"]
        L = _add(_unit(N, 0, alpha), e[p])
        eps = [1] * p + [-1] * (N - p)
        c0 = sum(b.lin_times_square(s, L, e[i]) for i, s in enumerate(eps))
        b.cube(c0, L)
    elif label == "TangentC":
        c0 = sum(b.lin_times_square(s, e[0], e[k + 2]) for k, s in enumerate(params["eps"]))
        b.square_times_lin(1, e[0], _add(e[1], e[0], c0))
    else:
        raise DecompositionError(f"no construction for {label!r}")
    D = _checked(b.result(), canonical_real(label, params, n))
    if not D.is_real():
        raise DecompositionError("real construction produced non-real scalars")
    return D


# -- degree-d family ---------------------------------------------------------

def generalized_c_form(d: int, n: int) -> Form:
    """x0^(d-1) x1 + x0^(d-2) (x2^2 + ... + xn^2)."""
    if d < 3 or n < 2:
        raise ValueError("need d >= 3 and n >= 2")
    N = n + 1
    terms = {tuple([d - 1, 1] + [0] * (N - 2)): Fraction(1)}
    for k in range(2, N):
        e = [0] * N
        e[0], e[k] = d - 2, 2
        terms[tuple(e)] = Fraction(1)
    return Form(N, d, terms)


def decompose_generalized_c(d: int, n: int) -> Decomposition:
    """(d-1)n+1 powers over the cyclotomic field of order d(d-1)."""
    F = generalized_c_form(d, n)
    N = n + 1
    order = d * (d - 1)
    cyc = lambda c: Cyclo(order, [c]) if not isinstance(c, Cyclo) else c
    if d == 3:
        D = decompose_complex("TypeC", n)
        terms = [(cyc(l), LinearForm([cyc(c) for c in lin.coeffs])) for l, lin in D.terms]
        return _checked(Decomposition(3, terms), F)
    zd = zeta(order, d - 1)      # primitive d-th root
    zw = zeta(order, d)          # primitive (d-1)-th root
    one = cyc(Fraction(1))
    terms = []
    # x0^(d-1) x1 = 1/d^2 sum_j zd^-j (x0 + zd^j x1)^d
    for j in range(d):
        lin = [one, zd ** j] + [cyc(Fraction(0))] * (N - 2)
        terms.append((zd ** (-j) * Fraction(1, d * d), LinearForm(lin)))
    # x0^(d-2) x^2 = 1/(C(d,2)(d-1)) sum_j w^-2j (x0 + w^j x)^d
    c = Fraction(1, comb(d, 2) * (d - 1))
    for k in range(2, N):
        for j in range(d - 1):
            lin = [cyc(Fraction(0))] * N
            lin[0] = one
            lin[k] = zw ** j
            terms.append((zw ** (-2 * j) * c, LinearForm(lin)))
    return _checked(Decomposition(d, terms), F)


# -- change of coordinates ---------------------------------------------------

def pull_back(D: Decomposition, T, lam=1) -> Decomposition:
    """Decomposition of lam * G(T x) from one of G."""
    M = T.matrix if isinstance(T, BasisChange) else BasisChange(T).matrix
    lam = as_scalar(lam)
    if lam == 0:
        raise DecompositionError("zero scale")
    return Decomposition(D.degree, [(lam * c, lin.compose(M)) for c, lin in D.terms])


def pad(D: Decomposition, nvars: int) -> Decomposition:
    """View a decomposition in more variables (zeros appended)."""
    return Decomposition(D.degree, [
        (c, LinearForm(list(lin.coeffs) + [Fraction(0)] * (nvars - lin.nvars)))
        for c, lin in D.terms])
