"""Symmetric matrices: congruence diagonalization, signatures, tangency
values and rank certificates for affine matrix pencils."""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .formcore import Form, FormError, Poly, matrix_of_quadratic, parse_poly, poly_to_str
from .scalar import as_scalar, from_str, is_real, sign, to_str

__all__ = [
    "congruence_diagonalize", "signature", "dual_eval", "ParametricSymMatrix",
    "parametric_det", "PencilCertificate", "pencil_rank_certificate",
    "pencil_of_partials", "SamplingBudget",
]

MAX_PARAMETRIC_SIZE = 12


def _check_symmetric(M):
    n = len(M)
    for i in range(n):
        if len(M[i]) != n:
            raise ValueError("matrix is not square")
        for j in range(i):
            if M[i][j] != M[j][i]:
                raise ValueError("matrix is not symmetric")


def congruence_diagonalize(M):
    """Return (P, D) with P^T M P = D diagonal.

    Fraction-free: columns are combined with integer-like multipliers so
    rational input stays rational and no square roots are introduced.
    """
    M = linalg.copy(M)
    _check_symmetric(M)
    n = len(M)
    P = linalg.identity(n)

    def current():
        return linalg.matmul(linalg.matmul(linalg.transpose(P), M), P)

    A = current()
    for k in range(n):
        if A[k][k] == 0:
            j = next((j for j in range(k + 1, n) if A[j][j] != 0), None)
            if j is not None:
                for row in P:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if A[k][j] != 0), None)
                if j is None:
                    continue
                for row in P:
                    row[k] = row[k] + row[j]
            A = current()
        piv = A[k][k]
        for j in range(k + 1, n):
            f = A[k][j]
            if f != 0:
                for row in P:
                    row[j] = piv * row[j] - f * row[k]
        A = current()
    D = [[A[i][j] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    return P, D


def signature(M) -> tuple[int, int, int]:
    """Sylvester inertia (n_plus, n_minus, n_zero) of a real symmetric matrix."""
    for row in M:
        for x in row:
            if not is_real(as_scalar(x)):
                raise ValueError("signature needs real entries")
    _, D = congruence_diagonalize(M)
    signs = [sign(D[i][i]) for i in range(len(D))]
    return signs.count(1), signs.count(-1), signs.count(0)


def dual_eval(M, a):
    """a^T adj(M) a, via det(M + a a^T) - det(M)."""
    M = linalg.copy(M)
    a = [as_scalar(x) for x in (a.coeffs if hasattr(a, "coeffs") else a)]
    if len(a) != len(M):
        raise ValueError("size mismatch")
    shifted = [[M[i][j] + a[i] * a[j] for j in range(len(a))] for i in range(len(a))]
    return linalg.det(shifted) - linalg.det(M)


# -- parametric matrices -----------------------------------------------------

@dataclass
class ParametricSymMatrix:
    """Symmetric matrix whose entries are affine polynomials in the parameters."""

    nparams: int
    entries: list  # rows of Poly in nparams variables

    def __post_init__(self):
        n = len(self.entries)
        for i in range(n):
            for j in range(n):
                e = self.entries[i][j]
                if not isinstance(e, Poly):
                    e = Poly.constant(self.nparams, e)
                    self.entries[i][j] = e
                if e.total_degree() > 1:
                    raise ValueError("pencil entries must be affine in the parameters")
        for i in range(n):
            for j in range(i):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError("pencil is not symmetric")

    @property
    def size(self) -> int:
        return len(self.entries)

    @classmethod
    def from_matrices(cls, base, directions) -> "ParametricSymMatrix":
        """base + sum_k t_k * directions[k]."""
        p = len(directions)
        n = len(base)
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                terms = {(0,) * p: base[i][j]}
                for k, D in enumerate(directions):
                    e = [0] * p
                    e[k] = 1
                    terms[tuple(e)] = D[i][j]
                row.append(Poly(p, terms))
            entries.append(row)
        return cls(p, entries)

    def specialize(self, point) -> list[list]:
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def minor(self, rows, cols) -> list[list]:
        return [[self.entries[i][j] for j in cols] for i in rows]

    def parametric_count(self, rows, cols) -> int:
        return sum(1 for i in rows for j in cols if not self.entries[i][j].is_constant())

    def to_json(self) -> dict:
        names = [f"t{k + 1}" for k in range(self.nparams)]
        return {
            "nparams": self.nparams,
            "entries": [[poly_to_str(e, names) for e in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ParametricSymMatrix":
        p = data["nparams"]
        def conv(s):
            s = re.sub(r"t(\d+)", lambda m: f"x{int(m.group(1)) - 1}", s)
            return parse_poly(s, max(p, 1)) if p else Poly.constant(0, parse_poly(s, 1).constant_term())
        return cls(p, [[conv(s) for s in row] for row in data["entries"]])


def _bareiss(entries, nparams: int) -> Poly:
    A = [list(row) for row in entries]
    n = len(A)
    if n == 0:
        return Poly.constant(nparams, 1)
    sgn = 1
    prev = Poly.constant(nparams, 1)
    for k in range(n - 1):
        if A[k][k].is_zero():
            p = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if p is None:
                return Poly(nparams)
            A[k], A[p] = A[p], A[k]
            sgn = -sgn
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = num.exact_div(prev)
        prev = A[k][k]
    det = A[n - 1][n - 1]
    return -det if sgn < 0 else det


def parametric_det(M: ParametricSymMatrix) -> Poly:
    """Exact determinant as a polynomial in the parameters (fraction-free)."""
    if M.size > MAX_PARAMETRIC_SIZE:
        raise ValueError(f"pencil size {M.size} exceeds {MAX_PARAMETRIC_SIZE}")
    return _bareiss(M.entries, M.nparams)


# -- certificates ------------------------------------------------------------

@dataclass
class SamplingBudget:
    trials: int = 200
    seed: int = 0
    max_nonprincipal: int = 5000
    bound: int = 10 ** 4


def _poly_json(p: Poly) -> list:
    return [[list(e), to_str(c)] for e, c in sorted(p.terms.items())]


def _poly_from_json(nparams: int, data) -> Poly:
    return Poly(nparams, {tuple(e): from_str(c) for e, c in data})


def positive_pattern(p: Poly) -> bool:
    """c0 + sum of even monomials whose coefficients share c0's sign."""
    c0 = p.constant_term()
    if c0 == 0:
        return False
    try:
        s0 = sign(c0)
        for e, c in p.terms.items():
            if any(e) and (any(k % 2 for k in e) or sign(c) != s0):
                return False
    except ValueError:
        return False
    return True


@dataclass
class PencilCertificate:
    """Proof object for 'rank >= m for every parameter value'."""

    kind: str  # ConstantMinor | PositivePattern | Sampled
    m: int
    rows: tuple = ()
    cols: tuple = ()
    value: object = None          # constant minor value
    polynomial: Poly | None = None  # PositivePattern determinant
    trials: int = 0
    seed: int = 0
    min_rank: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def rigorous(self) -> bool:
        return self.kind in ("ConstantMinor", "PositivePattern")

    def to_json(self) -> dict:
        out = {"kind": self.kind, "m": self.m, "rigorous": self.rigorous}
        if self.kind != "Sampled":
            out["rows"] = list(self.rows)
            out["cols"] = list(self.cols)
        if self.kind == "ConstantMinor":
            out["value"] = to_str(self.value)
        if self.kind == "PositivePattern":
            out["polynomial"] = _poly_json(self.polynomial)
        if self.kind == "Sampled":
            out.update({"trials": self.trials, "seed": self.seed, "min_rank": self.min_rank})
        out.update(self.extra)
        return out

    @classmethod
    def from_json(cls, data: dict, nparams: int) -> "PencilCertificate":
        cert = cls(data["kind"], data["m"], tuple(data.get("rows", ())), tuple(data.get("cols", ())))
        if "value" in data:
            cert.value = from_str(data["value"])
        if "polynomial" in data:
            cert.polynomial = _poly_from_json(nparams, data["polynomial"])
        cert.trials = data.get("trials", 0)
        cert.seed = data.get("seed", 0)
        cert.min_rank = data.get("min_rank")
        return cert

    def verify(self, M: ParametricSymMatrix) -> bool:
        """Re-derive the certificate from the pencil itself."""
        if self.kind == "Sampled":
            return False
        if len(self.rows) != self.m or len(self.cols) != self.m:
            return False
        det = _bareiss(M.minor(self.rows, self.cols), M.nparams)
        if self.kind == "ConstantMinor":
            return det.is_constant() and not det.is_zero() and det.constant_term() == self.value
        return det == self.polynomial and positive_pattern(det)


def _minor_candidates(M: ParametricSymMatrix, m: int, budget: int):
    n = M.size
    principal = sorted(itertools.combinations(range(n), m),
                       key=lambda c: (M.parametric_count(c, c), c))
    for c in principal:
        yield c, c
    count = 0
    for rows in itertools.combinations(range(n), m):
        for cols in itertools.combinations(range(n), m):
            if rows == cols:
                continue
            if count >= budget:
                return
            count += 1
            yield rows, cols


def sampled_min_rank(M: ParametricSymMatrix, trials: int, seed: int, bound: int = 10 ** 4) -> int:
    """Smallest exact rank seen at integer parameter samples."""
    best = M.size
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        point = [Fraction(rng.randint(-bound, bound)) for _ in range(M.nparams)]
        best = min(best, linalg.rank(M.specialize(point)))
    return best


def pencil_rank_certificate(M: ParametricSymMatrix, m: int, field: str = "complex",
                            budget: SamplingBudget | None = None):
    """Try to certify rank(M(t)) >= m for all parameter values t.

    Returns (bound_holds, certificate).  Constant minors work over both
    fields; positive determinant patterns only over the reals; sampling is
    evidence, never proof.
    """
    if not 1 <= m <= M.size:
        raise ValueError(f"m must lie in 1..{M.size}")
    if field not in ("real", "complex"):
        raise ValueError("field must be 'real' or 'complex'")
    budget = budget or SamplingBudget()
    positives = []
    for rows, cols in _minor_candidates(M, m, budget.max_nonprincipal):
        det = _bareiss(M.minor(rows, cols), M.nparams)
        if det.is_zero():
            continue
        if det.is_constant():
            return True, PencilCertificate("ConstantMinor", m, rows, cols, value=det.constant_term())
        if field == "real" and not positives and positive_pattern(det):
            positives.append(PencilCertificate("PositivePattern", m, rows, cols, polynomial=det))
    if positives:
        return True, positives[0]
    if field == "complex" and m == M.size:
        det = _bareiss(M.entries, M.nparams)
        if not det.is_constant() or det.is_zero():
            # a nonconstant polynomial always has a complex zero
            cert = PencilCertificate("Sampled", m, trials=0, seed=budget.seed, min_rank=None)
            cert.extra["refuted"] = "full determinant " + poly_to_str(
                det, [f"t{k + 1}" for k in range(M.nparams)]) + " has complex zeros"
            return False, cert
    if budget.trials <= 0:
        return False, PencilCertificate("Sampled", m, trials=0, seed=budget.seed, min_rank=None)
    low = sampled_min_rank(M, budget.trials, budget.seed, budget.bound)
    return low >= m, PencilCertificate("Sampled", m, trials=budget.trials, seed=budget.seed,
                                       min_rank=low)


def pencil_of_partials(F: Form, base: int, index_set) -> ParametricSymMatrix:
    """Matrix pencil of F_base + sum_k t_k F_{index_set[k]} for a cubic F."""
    if F.degree != 3:
        raise FormError("matrix pencils need quadratic partials (cubic forms)")
    base_m = matrix_of_quadratic(F.diff(base))
    dirs = [matrix_of_quadratic(F.diff(k)) for k in index_set]
    return ParametricSymMatrix.from_matrices(base_m, dirs)
