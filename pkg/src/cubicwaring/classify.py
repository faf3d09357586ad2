"""Canonical families of reducible cubics L*Q over the complex and real numbers.

Every classification carries a witness: an invertible W and a scalar lam
with  F(x) = lam * G(W x)  where G is the canonical form of the family.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import linalg
from .formcore import (BasisChange, Form, FormError, LinearForm, divide_by_linear,
                       matrix_of_quadratic, parse_form, partials, substitute)
from .quadlinalg import congruence_diagonalize
from .scalar import as_scalar, is_real, sign, sqrt, to_str

COMPLEX_LABELS = ("TypeA", "TypeB", "TypeC", "MonomialX0X1X2", "MonomialX0X1sq",
                  "CubeL3", "Binary")
REAL_LABELS = ("CaseI", "CaseII", "CaseIII")


class ClassificationError(ValueError):
    pass


# -- essential variables -----------------------------------------------------

@dataclass
class Reduction:
    """F(x) = form(first n_essential coordinates of transform^-1 x)."""

    form: Form
    transform: BasisChange
    n_essential: int

    def lift(self, W) -> BasisChange:
        """Extend a witness on the reduced variables to the full space."""
        N = self.transform.size
        r = self.n_essential
        big = linalg.identity(N)
        for i in range(r):
            for j in range(r):
                big[i][j] = as_scalar(W[i][j])
        return BasisChange(linalg.matmul(big, self.transform.inverse().matrix))

    def reduce_linear(self, L: LinearForm) -> LinearForm:
        full = L.compose(self.transform.matrix)
        if any(c != 0 for c in full.coeffs[self.n_essential:]):
            raise ClassificationError("linear factor involves inessential directions")
        return LinearForm(full.coeffs[:self.n_essential])


def _coeff_rows(forms) -> list[list]:
    keys = sorted({e for f in forms for e in f.terms})
    return [[f.terms.get(e, Fraction(0)) for e in keys] for f in forms]


def essential_reduce(F: Form):
    """(F_red, T, n_ess) with F = F_red padded, composed with T^-1."""
    if F.is_zero():
        raise FormError("zero form")
    N = F.nvars
    P = partials(F)
    # directions c with sum c_k F_k = 0 leave F unchanged
    rows = _coeff_rows(P)
    kernel = linalg.nullspace(linalg.transpose(rows)) if rows and rows[0] else linalg.identity(N)
    r = N - len(kernel)
    comp = linalg.complete_basis(kernel, N)[len(kernel):]
    cols = comp + kernel
    S = linalg.transpose(cols)
    G = substitute(F, S)
    red = Form(r, F.degree, {e[:r]: c for e, c in G.terms.items()})
    return red, BasisChange(S), r


def reduce_form(F: Form) -> Reduction:
    red, T, r = essential_reduce(F)
    return Reduction(red, T, r)


# -- canonical forms ---------------------------------------------------------

def _sq_sum(N: int, idx, signs=None) -> str:
    parts = []
    for k, i in enumerate(idx):
        s = 1 if signs is None else signs[k]
        parts.append(("+" if s > 0 else "-") + f"x{i}^2")
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def canonical_complex(label: str, n: int) -> Form:
    """Canonical representative with n+1 variables."""
    N = n + 1
    if label == "CubeL3":
        return parse_form("x0^3", N)
    if label == "Binary":
        return parse_form("x0*(x0^2+x1^2)", N)
    if label == "MonomialX0X1sq":
        return parse_form("x0*x1^2", N)
    if label == "MonomialX0X1X2":
        return parse_form("x0*x1*x2", N)
    if label == "TypeA":
        return parse_form(f"x0*({_sq_sum(N, range(N))})", N)
    if label == "TypeB":
        return parse_form(f"x0*({_sq_sum(N, range(1, N))})", N)
    if label == "TypeC":
        rest = _sq_sum(N, range(2, N))
        return parse_form(f"x0*(x0*x1{'+' + rest if rest else ''})", N)
    raise ValueError(f"unknown complex label {label!r}")


def canonical_real(label: str, params: dict, n: int) -> Form:
    N = n + 1
    if label == "CaseI":
        eps = params["eps"]
        return parse_form(f"x0*({_sq_sum(N, range(1, N), eps)})", N)
    if label == "CaseII":
        p = params["signature"][0]
        return parse_form(f"x0*({_sq_sum(N, range(N), [1] * p + [-1] * (N - p))})", N)
    if label == "CaseIII":
        p = params["p"]
        alpha = params["alpha"]
        sq = parse_form(_sq_sum(N, range(N), [1] * p + [-1] * (N - p)), N)
        lin = LinearForm([alpha if i == 0 else int(i == p) for i in range(N)]).to_form()
        return lin * sq
    if label == "TangentC":
        eps = params["eps"]
        rest = _sq_sum(N, range(2, N), eps)
        sep = "" if not rest or rest.startswith("-") else "+"
        return parse_form(f"x0*(x0*x1{sep}{rest})", N)
    raise ValueError(f"unknown real label {label!r}")


# -- result types ------------------------------------------------------------

def _witness_json(W):
    return None if W is None else [[to_str(x) for x in row] for row in W]


@dataclass
class Representation:
    """F_red = scale * canonical(witness x)."""

    label: str
    params: dict
    n_essential: int
    witness: list | None
    scale: object
    field: str

    @property
    def n(self) -> int:
        return self.n_essential - 1

    def canonical(self) -> Form:
        if self.field == "complex":
            return canonical_complex(self.label, self.n)
        return canonical_real(self.label, self.params, self.n)

    def check(self, F_red: Form) -> bool:
        if self.witness is None:
            return False
        return substitute(self.canonical(), self.witness) * self.scale == F_red

    def params_json(self) -> dict:
        out = {}
        for k, v in self.params.items():
            out[k] = v if isinstance(v, (bool, int, list)) else to_str(v)
        return out

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "params": self.params_json(),
            "n_essential": self.n_essential,
            "canonical": self.canonical().to_text(),
            "scale": to_str(self.scale),
            "witness": _witness_json(self.witness),
        }


@dataclass
class ComplexFamily(Representation):
    field: str = "complex"


@dataclass
class RealFamily(Representation):
    field: str = "real"
    overlap_flags: list = dc_field(default_factory=list)
    alternative: Representation | None = None

    def to_json(self) -> dict:
        out = super().to_json()
        out["overlap_flags"] = list(self.overlap_flags)
        if self.alternative is not None:
            out["alternative"] = self.alternative.to_json()
        return out


# -- helpers -----------------------------------------------------------------

def _inputs(L, Q):
    a = list(L.coeffs if isinstance(L, LinearForm) else [as_scalar(x) for x in L])
    B = matrix_of_quadratic(Q) if isinstance(Q, Form) else linalg.copy(Q)
    N = len(a)
    if len(B) != N:
        raise ClassificationError("linear and quadratic factors have different sizes")
    if all(x == 0 for x in a):
        raise ClassificationError("zero linear factor")
    if all(x == 0 for row in B for x in row):
        raise ClassificationError("zero quadratic factor")
    return a, B, N


def _diag_terms(B):
    """[(d_i, l_i)] with x^T B x = sum d_i * (l_i . x)^2 over nonzero d_i."""
    P, D = congruence_diagonalize(B)
    Pinv = linalg.inverse(P)
    return [(D[i][i], Pinv[i]) for i in range(len(B)) if D[i][i] != 0]


def _try_sqrt(x):
    try:
        return sqrt(x)
    except ValueError:
        return None


def _scaled_rows(terms, factor=1):
    """Rows sqrt(factor*d) * l; None if any root leaves the tower."""
    rows = []
    for d, l in terms:
        s = _try_sqrt(d * factor)
        if s is None:
            return None
        rows.append([s * x for x in l])
    return rows


def _outer_sub(B, u, v, c=1):
    """B - c/2 * (u v^T + v u^T)."""
    n = len(B)
    return [[B[i][j] - c * (u[i] * v[j] + v[i] * u[j]) / 2 for j in range(n)] for i in range(n)]


def _tangent_data(a, B, v):
    """Split Q = 2 L M + Q'' for a hyperplane tangent to the quadric (L(v) = 0)."""
    N = len(a)
    j = next(i for i, x in enumerate(a) if x != 0)
    u = [Fraction(0)] * N
    u[j] = 1 / a[j]
    Qu = linalg.dot(u, linalg.matvec(B, u))
    up = [ui - Qu / 2 * vi for ui, vi in zip(u, v)]
    m = linalg.matvec(B, up)
    rest = _outer_sub(B, a, m, 2)
    return m, rest


def _check_reduced(a, B, N):
    r = linalg.rank(B)
    if N == 1:
        return r, None
    if r == N:
        v = linalg.solve(B, a)
        return r, v
    if r == N - 1:
        v = linalg.nullspace(B)[0]
        if linalg.dot(a, v) == 0:
            raise ClassificationError("input is not essentially reduced")
        return r, v
    raise ClassificationError("input is not essentially reduced (quadric rank too small)")


# -- complex classification --------------------------------------------------

def classify_complex(L, Q) -> ComplexFamily:
    """Family of the essentially reduced cubic L*Q over the complex numbers."""
    a, B, N = _inputs(L, Q)
    r, v = _check_reduced(a, B, N)
    n_ess = N
    if N == 1:
        return ComplexFamily("CubeL3", {}, 1, [[Fraction(1)]], a[0] * B[0][0])
    if r == N:
        q = linalg.dot(a, v)
        if q != 0:
            label = "TypeA" if N >= 3 else "Binary"
            rest = [[B[i][j] - a[i] * a[j] / q for j in range(N)] for i in range(N)]
            rows = _scaled_rows(_diag_terms(rest), q)
            W = None if rows is None else [a] + rows
            return ComplexFamily(label, {"tangency": q}, n_ess, W, 1 / q)
        m, rest = _tangent_data(a, B, v)
        if N == 2:
            return ComplexFamily("MonomialX0X1sq", {"tangency": q}, n_ess,
                                 [[2 * x for x in m], a], Fraction(1))
        rows = _scaled_rows(_diag_terms(rest))
        W = None if rows is None else [a, [2 * x for x in m]] + rows
        return ComplexFamily("TypeC", {"tangency": q}, n_ess, W, Fraction(1))
    terms = _diag_terms(B)
    if N == 2:
        (d, l), = terms
        return ComplexFamily("MonomialX0X1sq", {}, n_ess, [[d * x for x in a], l], Fraction(1))
    if N == 3:
        (d1, l1), (d2, l2) = terms
        rt = _try_sqrt(-d2 / d1)
        W = None
        if rt is not None:
            W = [a, [d1 * (x + rt * y) for x, y in zip(l1, l2)],
                 [x - rt * y for x, y in zip(l1, l2)]]
        return ComplexFamily("MonomialX0X1X2", {}, n_ess, W, Fraction(1))
    rows = _scaled_rows(terms)
    W = None if rows is None else [a] + rows
    return ComplexFamily("TypeB", {}, n_ess, W, Fraction(1))


# -- real classification -----------------------------------------------------

def _require_real(a, B):
    for x in list(a) + [y for row in B for y in row]:
        if not is_real(x):
            raise ClassificationError("real classification needs real coefficients")


def _householder(b, beta):
    """Symmetric orthogonal H with H b = beta * e_0."""
    k = len(b)
    u = [x - (beta if i == 0 else 0) for i, x in enumerate(b)]
    uu = linalg.dot(u, u)
    if uu == 0:
        return linalg.identity(k)
    return [[(1 if i == j else 0) - 2 * u[i] * u[j] / uu for j in range(k)] for i in range(k)]


def _block_witness(a, terms, s):
    """Witness rows and block norms for Q scaled by s, positives first.

    Returns (W, beta_plus, beta_minus, p) or None when a root leaves the tower.
    """
    pos = [(d, l) for d, l in terms if sign(d * s) > 0]
    neg = [(d, l) for d, l in terms if sign(d * s) < 0]
    ordered = pos + neg
    Z = []
    for d, l in ordered:
        root = _try_sqrt(d * s if sign(d * s) > 0 else -d * s)
        if root is None:
            return None
        Z.append([root * x for x in l])
    b = LinearForm(a).compose(linalg.inverse(Z)).coeffs
    p = len(pos)
    bp, bm = list(b[:p]), list(b[p:])
    beta_p = _try_sqrt(linalg.dot(bp, bp)) if any(bp) else Fraction(0)
    beta_m = _try_sqrt(linalg.dot(bm, bm)) if any(bm) else Fraction(0)
    if beta_p is None or beta_m is None:
        return None
    H = linalg.identity(len(Z))
    for lo, blk, beta in ((0, bp, beta_p), (p, bm, beta_m)):
        if blk:
            h = _householder(blk, beta)
            for i in range(len(blk)):
                for j in range(len(blk)):
                    H[lo + i][lo + j] = h[i][j]
    return linalg.matmul(H, Z), beta_p, beta_m, p


def _nontangent_alternative(a, B, q) -> Representation:
    """CaseII representative via Q = L^2/q + Q' (valid whenever q != 0)."""
    N = len(a)
    rest = [[B[i][j] - a[i] * a[j] / q for j in range(N)] for i in range(N)]
    terms = _diag_terms(rest)
    s = sign(q)
    r0 = _try_sqrt(q * s)
    pos = [(d, l) for d, l in terms if sign(d * s) > 0]
    neg = [(d, l) for d, l in terms if sign(d * s) < 0]
    rows = [[x / r0 for x in a]] if r0 is not None else None
    for d, l in pos + neg:
        root = _try_sqrt(d * s if sign(d * s) > 0 else -d * s)
        if rows is None or root is None:
            rows = None
            break
        rows.append([root * x for x in l])
    p = 1 + len(pos)
    scale = s * r0 if r0 is not None else None
    return Representation("CaseII", {"signature": [p, N - p]}, N, rows, scale, "real")


def _tangent_alternative(a, B, v) -> Representation:
    """Real analogue of the complex TypeC normal form."""
    m, rest = _tangent_data(a, B, v)
    terms = _diag_terms(rest)
    pos = [(d, l) for d, l in terms if sign(d) > 0]
    neg = [(d, l) for d, l in terms if sign(d) < 0]
    rows = [a, [2 * x for x in m]]
    for d, l in pos + neg:
        root = _try_sqrt(d if sign(d) > 0 else -d)
        if root is None:
            rows = None
            break
        rows.append([root * x for x in l])
    eps = [1] * len(pos) + [-1] * len(neg)
    return Representation("TangentC", {"eps": eps}, len(a), rows, Fraction(1), "real")


def classify_real(L, Q) -> RealFamily:
    """Family of the essentially reduced real cubic L*Q over the reals."""
    a, B, N = _inputs(L, Q)
    _require_real(a, B)
    r, v = _check_reduced(a, B, N)
    if N == 1:
        return RealFamily("CaseII", {"signature": [1, 0]}, 1, [[Fraction(1)]], a[0] * B[0][0])
    terms = _diag_terms(B)
    if r == N - 1:
        npos = sum(1 for d, _ in terms if sign(d) > 0)
        s = 1 if 2 * npos >= len(terms) else -1
        pos = [(d, l) for d, l in terms if sign(d * s) > 0]
        neg = [(d, l) for d, l in terms if sign(d * s) < 0]
        rows = _scaled_rows([(d * s, l) for d, l in pos])
        nrows = _scaled_rows([(-d * s, l) for d, l in neg])
        W = None if rows is None or nrows is None else [a] + rows + nrows
        eps = [1] * len(pos) + [-1] * len(neg)
        return RealFamily("CaseI", {"eps": eps}, N, W, Fraction(s))

    q = linalg.dot(a, v)
    base = _block_witness(a, terms, 1)
    if base is None:
        raise ClassificationError("witness needs square roots outside the tower")
    _, bp, bm, p0 = base
    if bm == 0 or bp == 0:
        s = 1 if bm == 0 else -1
        W, beta, _, p = _block_witness(a, terms, s)
        fam = RealFamily("CaseII", {"signature": [p, N - p]}, N, W, s * beta)
        if 0 < p < N:
            fam.overlap_flags = ["CaseIII"]
        return fam

    if 2 * p0 > N:
        s = 1
    elif 2 * p0 < N:
        s = -1
    else:
        s = 1 if sign(bp * bp - bm * bm) >= 0 else -1
    W, bp, bm, p = _block_witness(a, terms, s)
    alpha = bp / bm
    fam = RealFamily("CaseIII", {"alpha": alpha, "p": p}, N, W, s * bm)
    if p == 1:
        fam.params["p_equals_one"] = True
    if q != 0:
        fam.overlap_flags = ["CaseII"]
        fam.alternative = _nontangent_alternative(a, B, q)
    else:
        fam.alternative = _tangent_alternative(a, B, v)
    return fam


# -- form-level entry points -------------------------------------------------

@dataclass
class FormClassification:
    """Classification of an unreduced cubic with a known linear factor."""

    form: Form
    linear: LinearForm
    reduction: Reduction
    family: Representation

    def full_witness(self, rep: Representation | None = None) -> BasisChange | None:
        rep = rep or self.family
        if rep.witness is None:
            return None
        return self.reduction.lift(rep.witness)

    def check(self, rep: Representation | None = None) -> bool:
        rep = rep or self.family
        W = self.full_witness(rep)
        if W is None:
            return False
        G = rep.canonical().pad(self.form.nvars)
        return substitute(G, W) * rep.scale == self.form

    def to_json(self) -> dict:
        W = self.full_witness()
        out = self.family.to_json()
        out["full_witness"] = None if W is None else W.to_json()
        out["reduction"] = self.reduction.transform.to_json()
        return out


def classify_form(F: Form, L: LinearForm, field: str = "complex") -> FormClassification:
    if F.degree != 3:
        raise ClassificationError("only cubic forms are classified")
    if divide_by_linear(L, F) is None:
        raise ClassificationError("the given linear form does not divide the cubic")
    red = reduce_form(F)
    Lr = red.reduce_linear(L)
    Qr = divide_by_linear(Lr, red.form)
    if Qr is None:
        raise ClassificationError("reduced linear factor does not divide the reduced form")
    if field == "complex":
        fam = classify_complex(Lr, Qr)
    elif field == "real":
        fam = classify_real(Lr, Qr)
    else:
        raise ValueError("field must be 'real' or 'complex'")
    return FormClassification(F, L, red, fam)
