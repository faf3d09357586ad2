"""Sparse multivariate polynomials, homogeneous forms and decompositions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from . import linalg
from .scalar import Cyclo, Tower, as_scalar, domain_of, from_str, to_str

__all__ = [
    "Poly", "Form", "LinearForm", "Decomposition", "BasisChange",
    "parse_poly", "parse_form", "expand_decomposition", "substitute",
    "partials", "divide_by_linear", "FormError",
]


class FormError(ValueError):
    """Malformed polynomial input or a violated form invariant."""


def _exp_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Polynomial in ``nvars`` variables; ``terms`` maps exponent tuples to scalars."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise FormError(f"exponent {e} does not have {nvars} entries")
                if c != 0:
                    clean[tuple(e)] = as_scalar(c)
        self.terms = clean

    # -- constructors
    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coeff(self, exps) -> object:
        return self.terms.get(tuple(exps), Fraction(0))

    def scalars(self):
        return self.terms.values()

    # -- arithmetic
    def _check(self, other):
        if other.nvars != self.nvars:
            raise FormError(f"variable counts differ: {self.nvars} vs {other.nvars}")

    def _wrap(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._wrap(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = as_scalar(other)
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _exp_add(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.nvars, out)

    def evaluate(self, point):
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def leading_term(self):
        e = max(self.terms)
        return e, self.terms[e]

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient of an exact division (lex order); raises if inexact."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        le, lc = other.leading_term()
        rem = Poly(self.nvars, dict(self.terms))
        quo: dict = {}
        while not rem.is_zero():
            e, c = rem.leading_term()
            shift = tuple(a - b for a, b in zip(e, le))
            if min(shift) < 0:
                raise FormError("polynomial division is not exact")
            q = c / lc
            quo[shift] = q
            rem = rem - Poly(self.nvars, {shift: q}) * other
        return Poly(self.nvars, quo)

    # -- text
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), [-x for x in kv[0]]))

    def __str__(self):
        return poly_to_str(self)

    def __repr__(self):
        return f"{type(self).__name__}({poly_to_str(self)!r})"


def _monomial_str(e, names) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def poly_to_str(p: Poly, names=None) -> str:
    names = names or [f"x{i}" for i in range(p.nvars)]
    if p.is_zero():
        return "0"
    pieces = []
    for e, c in p.sorted_terms():
        mono = _monomial_str(e, names)
        cs = to_str(c)
        if isinstance(c, Cyclo) or " " in cs:
            cs = "(" + cs + ")"
            sign = "+"
        elif cs.startswith("-"):
            sign, cs = "-", cs[1:]
        else:
            sign = "+"
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        pieces.append((sign, body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


class Form(Poly):
    """Homogeneous polynomial of fixed degree."""

    __slots__ = ("degree",)

    def __init__(self, nvars: int, degree: int, terms=None):
        super().__init__(nvars, terms)
        for e in self.terms:
            if sum(e) != degree:
                raise FormError(f"monomial {e} does not have degree {degree}")
        self.degree = degree

    @classmethod
    def from_poly(cls, p: Poly, degree: int | None = None) -> "Form":
        if degree is None:
            degrees = {sum(e) for e in p.terms}
            if len(degrees) > 1:
                raise FormError("polynomial is not homogeneous")
            degree = degrees.pop() if degrees else 0
        return cls(p.nvars, degree, p.terms)

    def __add__(self, other):
        if isinstance(other, Form):
            if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
                raise FormError("cannot add forms of different degree")
            deg = self.degree if not self.is_zero() else other.degree
            return Form.from_poly(Poly.__add__(self, other), deg)
        return Poly.__add__(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.nvars, self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, Form):
            return self + (-other)
        return Poly.__sub__(self, other)

    def __mul__(self, other):
        p = Poly.__mul__(self, other)
        deg = self.degree + (other.degree if isinstance(other, Form) else 0)
        if isinstance(other, Poly) and not isinstance(other, Form):
            return p
        return Form(p.nvars, deg, p.terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Form(self.nvars, 0, {(0,) * self.nvars: 1})
        for _ in range(k):
            out = out * self
        return out

    __hash__ = Poly.__hash__

    def diff(self, i: int) -> "Form":
        return Form(self.nvars, max(self.degree - 1, 0), Poly.diff(self, i).terms)

    def pad(self, nvars: int) -> "Form":
        """Same form viewed in more variables (appended, unused)."""
        extra = (0,) * (nvars - self.nvars)
        return Form(nvars, self.degree, {e + extra: c for e, c in self.terms.items()})

    def to_text(self) -> str:
        return poly_to_str(self)

    def is_real(self) -> bool:
        from .scalar import is_real
        return all(is_real(c) for c in self.terms.values())


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(sqrt)|(I)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormError(f"syntax error near {text[pos:pos + 10]!r}")
        num, var, sq, imag, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif var is not None:
            out.append(("var", int(var)))
        elif sq:
            out.append(("sqrt", None))
        elif imag:
            out.append(("I", None))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, nvars):
        self.toks = tokens
        self.i = 0
        self.nvars = nvars

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            raise FormError(f"syntax error: expected {val or kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> Poly:
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Poly:
        out = self.unary()
        while True:
            tok = self.peek()
            if tok in (("op", "*"), ("op", "/")):
                self.take()
                rhs = self.unary()
                if tok[1] == "*":
                    out = out * rhs
                else:
                    if not rhs.is_constant() or rhs.is_zero():
                        raise FormError("division only by nonzero constants")
                    out = out * (1 / rhs.constant_term())
            elif tok[0] in ("num", "var", "sqrt", "I") or tok == ("op", "("):
                out = out * self.unary()  # implicit multiplication
            else:
                return out

    def unary(self) -> Poly:
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return -self.unary()
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            k = self.take("num")[1]
            return base ** k
        return base

    def atom(self) -> Poly:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Poly.constant(self.nvars, val)
        if kind == "var":
            self.take()
            if val >= self.nvars:
                raise FormError(f"variable x{val} outside x0..x{self.nvars - 1}")
            return Poly.var(self.nvars, val)
        if kind == "I":
            self.take()
            return Poly.constant(self.nvars, Tower.sqrt_int(-1))
        if kind == "sqrt":
            self.take()
            self.take("op", "(")
            neg = False
            if self.peek() == ("op", "-"):
                self.take()
                neg = True
            n = self.take("num")[1]
            self.take("op", ")")
            return Poly.constant(self.nvars, Tower.sqrt_int(-n if neg else n))
        if (kind, val) == ("op", "("):
            self.take()
            out = self.expr()
            self.take("op", ")")
            return out
        raise FormError(f"syntax error at token {val!r}")


def infer_nvars(text: str) -> int:
    idx = [int(m) for m in re.findall(r"x(\d+)", text)]
    return max(idx) + 1 if idx else 1


def parse_poly(text: str, nvars: int | None = None) -> Poly:
    if nvars is None:
        nvars = infer_nvars(text)
    p = _Parser(_tokenize(text), nvars)
    out = p.expr()
    if p.i != len(p.toks):
        raise FormError(f"syntax error: trailing input {p.peek()[1]!r}")
    return out


def parse_form(text: str, nvars: int | None = None) -> Form:
    """Parse and expand a homogeneous polynomial in x0..x{nvars-1}."""
    p = parse_poly(text, nvars)
    if p.is_zero():
        raise FormError("zero polynomial has no degree")
    try:
        return Form.from_poly(p)
    except FormError:
        raise FormError("inhomogeneous polynomial") from None


# -- linear forms and decompositions ----------------------------------------

class LinearForm:
    """a0*x0 + ... + an*xn."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(as_scalar(c) for c in coeffs)

    @property
    def nvars(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_form(cls, f: Poly) -> "LinearForm":
        if f.total_degree() > 1 or f.constant_term() != 0:
            raise FormError("not a linear form")
        return cls([f.coeff(tuple(int(i == j) for j in range(f.nvars))) for i in range(f.nvars)])

    def to_form(self) -> Form:
        n = self.nvars
        return Form(n, 1, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(self.coeffs)})

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def compose(self, matrix) -> "LinearForm":
        """Coefficients of L(Mx): the row vector a*M."""
        cols = len(matrix[0])
        out = []
        for j in range(cols):
            acc = Fraction(0)
            for a, row in zip(self.coeffs, matrix):
                if a and row[j]:
                    acc = acc + a * row[j]
            out.append(acc)
        return LinearForm(out)

    def power(self, d: int) -> Form:
        return _linear_power(self.coeffs, d)

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"LinearForm({self.to_form().to_text()!r})"


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for k in range(total, -1, -1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


def _linear_power(coeffs, d: int) -> Form:
    n = len(coeffs)
    support = [i for i, c in enumerate(coeffs) if c != 0]
    terms = {}
    if support:
        powers = {i: [Fraction(1)] for i in support}
        for i in support:
            for _ in range(d):
                powers[i].append(powers[i][-1] * coeffs[i])
        fd = factorial(d)
        for comp in _compositions(d, len(support)):
            mult = fd
            c = Fraction(1)
            e = [0] * n
            for i, k in zip(support, comp):
                mult //= factorial(k)
                e[i] = k
                c = c * powers[i][k]
            terms[tuple(e)] = c * mult
    return Form(n, d, terms)


@dataclass
class Decomposition:
    """Assertion F = sum(lambda_i * L_i ** degree)."""

    degree: int
    terms: list = field(default_factory=list)  # list of (scalar, LinearForm)

    def __len__(self):
        return len(self.terms)

    @property
    def nvars(self) -> int:
        return self.terms[0][1].nvars if self.terms else 0

    def scalars(self):
        for lam, lin in self.terms:
            yield lam
            yield from lin.coeffs

    def is_real(self) -> bool:
        from .scalar import is_real
        return all(isinstance(s, (Fraction, Tower)) and is_real(s) for s in self.scalars())

    def field_info(self) -> dict:
        orders = {s.order for s in self.scalars() if isinstance(s, Cyclo)}
        if orders:
            return {"type": "cyclotomic", "order": max(orders)}
        gens = set()
        for s in self.scalars():
            if isinstance(s, Tower):
                gens.update(s.generators)
        if gens:
            return {"type": "tower", "generators": sorted(gens)}
        return {"type": "rational"}

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "field": self.field_info(),
            "terms": [
                {"lambda": to_str(lam), "linear": [to_str(c) for c in lin.coeffs]}
                for lam, lin in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Decomposition":
        info = data.get("field", {})
        order = info.get("order") if info.get("type") == "cyclotomic" else None

        def conv(s):
            v = from_str(s)
            if order is not None and not isinstance(v, Cyclo):
                v = Cyclo(order, [v]) if not isinstance(v, Tower) else v
            return v

        terms = [(conv(t["lambda"]), LinearForm([conv(c) for c in t["linear"]]))
                 for t in data["terms"]]
        return cls(data["degree"], terms)


def expand_decomposition(D: Decomposition, nvars: int | None = None) -> Form:
    """Exact expansion of sum(lambda_i * L_i ** d)."""
    if nvars is None:
        nvars = D.nvars
    out = Form(nvars, D.degree)
    for lam, lin in D.terms:
        if lin.nvars != nvars:
            raise FormError(f"linear form has {lin.nvars} variables, expected {nvars}")
        out = out + lin.power(D.degree) * lam
    return out


# -- basis changes -----------------------------------------------------------

class BasisChange:
    """Invertible linear substitution x_i -> sum_j matrix[i][j] * x_j."""

    def __init__(self, matrix):
        self.matrix = linalg.copy(matrix)
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise FormError("basis change must be square")
        if linalg.det(self.matrix) == 0:
            raise FormError("singular basis change")

    @classmethod
    def identity(cls, n: int) -> "BasisChange":
        return cls(linalg.identity(n))

    @property
    def size(self) -> int:
        return len(self.matrix)

    def det(self):
        return linalg.det(self.matrix)

    def inverse(self) -> "BasisChange":
        return BasisChange(linalg.inverse(self.matrix))

    def __matmul__(self, other: "BasisChange") -> "BasisChange":
        return BasisChange(linalg.matmul(self.matrix, other.matrix))

    def to_json(self) -> list:
        return [[to_str(x) for x in row] for row in self.matrix]

    @classmethod
    def from_json(cls, rows) -> "BasisChange":
        return cls([[from_str(x) for x in row] for row in rows])


def substitute(F: Form, A) -> Form:
    """F(Ax): every x_i is replaced by the linear form in row i of A."""
    M = A.matrix if isinstance(A, BasisChange) else A
    n = F.nvars
    if len(M) != n:
        raise FormError("substitution matrix does not match the number of variables")
    m = len(M[0])
    cache: dict = {}

    def pw(i, k):
        if (i, k) not in cache:
            cache[(i, k)] = _linear_power([as_scalar(x) for x in M[i]], k)
        return cache[(i, k)]

    out = Form(m, F.degree)
    for e, c in F.terms.items():
        term = Form(m, 0, {(0,) * m: c})
        for i, k in enumerate(e):
            if k:
                term = term * pw(i, k)
        out = out + term
    return out


def partials(F: Form) -> list[Form]:
    """[dF/dx0, ..., dF/dxn]."""
    if F.degree < 1:
        raise FormError("partials need degree >= 1")
    return [F.diff(i) for i in range(F.nvars)]


def divide_by_linear(L: LinearForm, F: Form):
    """Q with F = L*Q exactly, or None when L does not divide F."""
    if L.is_zero():
        raise FormError("cannot divide by the zero linear form")
    k = next(i for i, c in enumerate(L.coeffs) if c != 0)
    ak = L.coeffs[k]
    Lf = L.to_form()
    rem = Poly(F.nvars, dict(F.terms))
    quo: dict = {}
    while True:
        cand = [(e, c) for e, c in rem.terms.items() if e[k] > 0]
        if not cand:
            break
        e, c = max(cand, key=lambda t: (t[0][k], t[0]))
        qe = list(e)
        qe[k] -= 1
        qe = tuple(qe)
        q = c / ak
        quo[qe] = quo.get(qe, 0) + q
        rem = rem - Poly(F.nvars, {qe: q}) * Lf
    if not rem.is_zero():
        return None
    return Form(F.nvars, F.degree - 1, quo)


def quadratic_form_of(M) -> Form:
    """x^T M x for a symmetric matrix M."""
    n = len(M)
    terms = {}
    for i in range(n):
        for j in range(i, n):
            c = M[i][j] if i == j else M[i][j] * 2
            if c != 0:
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = c
    return Form(n, 2, terms)


def matrix_of_quadratic(Q: Poly) -> list[list]:
    """Symmetric matrix M with Q = x^T M x."""
    n = Q.nvars
    M = linalg.zeros(n, n)
    for e, c in Q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        if len(idx) != 2:
            raise FormError("not a quadratic form")
        i, j = idx
        if i == j:
            M[i][i] = M[i][i] + c
        else:
            M[i][j] = M[i][j] + c / 2
            M[j][i] = M[j][i] + c / 2
    return M


def same_domain(*scalars) -> bool:
    return len({domain_of(s) for s in scalars if domain_of(s) != "rational"}) <= 1
