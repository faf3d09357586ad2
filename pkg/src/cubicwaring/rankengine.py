"""Rank results with re-checkable certificates.

Lower bounds come from the partial-derivative pencil criterion
(rank >= m + p when F_b + sum t_k F_k keeps rank >= m), from catalecticant
ranks and from the apolar real-split scan.  Upper bounds are explicit
decompositions that expand exactly to the input.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .classify import (FormClassification, Representation, canonical_complex,
                       classify_form)
from .decompose import (decompose_complex, decompose_generalized_c, decompose_real,
                        generalized_c_form, pad, pull_back, verify_decomposition)
from .factor import find_linear_factor
from .formcore import (BasisChange, Decomposition, Form, FormError, LinearForm, Poly, divide_by_linear,
                       matrix_of_quadratic, partials, parse_form, quadratic_form_of, substitute)
from .quadlinalg import (ParametricSymMatrix, PencilCertificate, SamplingBudget, _bareiss,
                         congruence_diagonalize, parametric_det, pencil_of_partials,
                         pencil_rank_certificate, signature)
from .scalar import from_str, sign, sqrt, to_str


class CriterionError(ValueError):
    pass


class ScanError(ValueError):
    pass


class NotReducibleError(ValueError):
    """No linear factor was found or the supplied one does not divide."""


# -- lower-bound tools -------------------------------------------------------

def _coeff_matrix(forms) -> list[list]:
    keys = sorted({e for f in forms for e in f.terms})
    return [[f.terms.get(e, Fraction(0)) for e in keys] for f in forms]


def catalecticant_bound(F: Form, order: int | None = None) -> int:
    """Rank of the span of all order-k partials (k = floor(d/2) by default)."""
    k = F.degree // 2 if order is None else order
    if not 0 < k < F.degree:
        raise ValueError("catalecticant order must lie strictly between 0 and the degree")
    level = [F]
    for _ in range(k):
        nxt = {}
        for G in level:
            for i in range(G.nvars):
                D = G.diff(i)
                if not D.is_zero():
                    nxt[tuple(sorted(D.terms.items(), key=lambda t: t[0]))] = D
        level = list(nxt.values())
    if not level:
        return 0
    return linalg.rank(_coeff_matrix(level))


@dataclass
class CriterionInstance:
    """Pencil F_base + sum_{k in index_set} t_k F_k with target rank m."""

    form: Form
    base: int
    index_set: tuple
    m: int

    @property
    def p(self) -> int:
        return len(self.index_set)

    def partials(self) -> list[Form]:
        return partials(self.form)

    def independent(self) -> bool:
        P = self.partials()
        chosen = [P[k] for k in self.index_set]
        if any(f.is_zero() for f in chosen):
            return False
        return linalg.rank(_coeff_matrix(chosen)) == len(chosen)

    def pencil(self) -> ParametricSymMatrix:
        return pencil_of_partials(self.form, self.base, list(self.index_set))

    def to_json(self) -> dict:
        return {"form": self.form.to_text(), "nvars": self.form.nvars, "base": self.base,
                "index_set": list(self.index_set), "m": self.m, "p": self.p}


def criterion_bound(inst: CriterionInstance, field_name: str = "complex",
                    budget: SamplingBudget | None = None):
    """(m + p or None, certificate json).  Only rigorous certificates give a bound."""
    if inst.form.degree != 3:
        raise CriterionError("certified pencils need quadratic partials; use the "
                             "recursive route for higher degree")
    if inst.base in inst.index_set:
        raise CriterionError("base index must not be in the index set")
    if not inst.independent():
        raise CriterionError("partials in the index set are linearly dependent")
    ok, cert = pencil_rank_certificate(inst.pencil(), inst.m, field_name, budget)
    out = {"kind": "Criterion", "field": field_name, "instance": inst.to_json(),
           "pencil": cert.to_json()}
    bound = inst.m + inst.p if ok and cert.rigorous else None
    out["bound"] = bound
    return bound, out


def _independent_subset(P, candidates):
    chosen = []
    for k in candidates:
        if P[k].is_zero():
            continue
        if linalg.rank(_coeff_matrix([P[j] for j in chosen] + [P[k]])) > len(chosen):
            chosen.append(k)
    return chosen


def criterion_search(F: Form, field_name: str = "complex", budget: SamplingBudget | None = None):
    """Best rigorous pencil bound over base indices and target ranks."""
    budget = budget or SamplingBudget(trials=0)
    if budget.trials:
        budget = SamplingBudget(0, budget.seed, budget.max_nonprincipal, budget.bound)
    P = partials(F)
    best, best_cert = 0, None
    N = F.nvars
    for b in range(N):
        if P[b].is_zero():
            continue
        idx = tuple(_independent_subset(P, [k for k in range(N) if k != b]))
        for m in range(N, 0, -1):
            if m + len(idx) <= best:
                break
            bound, cert = criterion_bound(CriterionInstance(F, b, idx, m), field_name, budget)
            if bound is not None:
                best, best_cert = bound, cert
                break
    return best, best_cert


def recheck_criterion(cert: dict) -> bool:
    """Rebuild the pencil from the cited form and re-verify the minor."""
    inst = cert["instance"]
    F = parse_form(inst["form"], inst["nvars"])
    ci = CriterionInstance(F, inst["base"], tuple(inst["index_set"]), inst["m"])
    if not ci.independent():
        return False
    M = ci.pencil()
    pc = PencilCertificate.from_json(cert["pencil"], M.nparams)
    return pc.m == ci.m and pc.verify(M) and cert.get("bound") == ci.m + ci.p


# -- result type -------------------------------------------------------------

@dataclass
class RankResult:
    field: str
    lower: int
    upper: int
    lower_certs: list = field(default_factory=list)
    upper_cert: dict | None = None
    decomposition: Decomposition | None = None
    classification: dict | None = None
    intersection: dict | None = None
    notes: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_json(self) -> dict:
        out = {"field": self.field, "lower": self.lower, "upper": self.upper,
               "exact": self.exact, "certificates": {"lower": self.lower_certs,
                                                     "upper": self.upper_cert}}
        if self.classification is not None:
            out["classification"] = self.classification
        if self.intersection is not None:
            out["intersection"] = self.intersection
        if self.notes:
            out["notes"] = list(self.notes)
        return out


# -- helpers -----------------------------------------------------------------

COMPLEX_FORMULA = {"CubeL3": lambda n: 1, "Binary": lambda n: 2, "MonomialX0X1sq": lambda n: 3,
                   "MonomialX0X1X2": lambda n: 4, "TypeA": lambda n: 2 * n,
                   "TypeB": lambda n: 2 * n, "TypeC": lambda n: 2 * n + 1}


def _resolve_factor(F: Form, L, seed: int):
    if F.degree != 3:
        raise FormError("only cubic forms are supported here")
    if L is None:
        L = find_linear_factor(F, seed)
        if L is None:
            raise NotReducibleError("no linear factor found; supply one explicitly")
    elif divide_by_linear(L, F) is None:
        raise NotReducibleError("the given linear form does not divide the cubic")
    return L


def _decomposition_cert(D: Decomposition, F: Form, source: str) -> dict:
    ok, _ = verify_decomposition(D, F)
    if not ok:
        raise RuntimeError("pulled-back decomposition does not expand to the input")
    return {"kind": "Decomposition", "source": source, "terms": len(D),
            "verified": True, "decomposition": D.to_json()}


def _pull_to_input(cls: FormClassification, rep: Representation, D_can: Decomposition):
    W = cls.full_witness(rep)
    if W is None:
        return None
    return pull_back(pad(D_can, cls.form.nvars), W, rep.scale)


def _equivalence_json(cls: FormClassification, rep: Representation) -> dict:
    W = cls.full_witness(rep)
    return {"canonical": rep.canonical().to_text(), "nvars": cls.form.nvars,
            "witness": None if W is None else W.to_json(), "scale": to_str(rep.scale),
            "verified": cls.check(rep)}


# -- complex rank ------------------------------------------------------------

def complex_rank(F: Form, L: LinearForm | None = None, seed: int = 0,
                 budget: SamplingBudget | None = None) -> RankResult:
    """Exact complex rank of a reducible cubic via classification."""
    L = _resolve_factor(F, L, seed)
    cls = classify_form(F, L, "complex")
    fam = cls.family
    n = fam.n
    G = canonical_complex(fam.label, n)
    formula = COMPLEX_FORMULA[fam.label](n)
    certs = []
    cat = catalecticant_bound(F)
    certs.append({"kind": "CatalecticantRank", "rank": cat})
    crit, ccert = criterion_search(G, "complex", budget)
    if ccert is not None:
        ccert["equivalence"] = _equivalence_json(cls, fam)
        certs.append(ccert)
    lower = max(cat, crit if ccert is not None and ccert["equivalence"]["verified"] else 0)
    notes = []
    if lower < formula:
        certs.append({"kind": "TheoremFormula", "label": fam.label, "value": formula})
        notes.append("lower bound taken from the classification formula")
        lower = formula
    D = _pull_to_input(cls, fam, decompose_complex(fam.label, n))
    if D is not None:
        upper_cert = _decomposition_cert(D, F, fam.label)
        upper = len(D)
    else:
        upper_cert = {"kind": "TheoremFormula", "label": fam.label, "value": formula}
        upper = formula
        notes.append("witness needs roots outside the tower; upper bound from formula")
    return RankResult("complex", lower, upper, certs, upper_cert, D, cls.to_json(), None, notes)


# -- real rank ---------------------------------------------------------------

def _real_formula(rep: Representation):
    """Interval of the family's rank statements."""
    n = rep.n
    if rep.label == "CaseI":
        return (2 * n, 2 * n if sum(rep.params["eps"]) == 0 else 2 * n + 1)
    if rep.label == "CaseII":
        p = rep.params["signature"][0]
        if p == n + 1:
            return (2 * n, 2 * n)
        if p == 1:
            return (2 * n + 1, 2 * n + 1)
        return (2 * n, 2 * n + 1)
    if rep.label == "CaseIII":
        return (2 * n + 1 if rep.params["alpha"] == 1 else 2 * n, 2 * n + 3)
    if rep.label == "TangentC":
        return (2 * n + 1, 2 * n + 1)
    raise ValueError(rep.label)


def real_rank_bounds(F: Form, L: LinearForm | None = None, seed: int = 0,
                     budget: SamplingBudget | None = None, scan: bool = True) -> RankResult:
    """Real rank interval for a real reducible cubic."""
    if not F.is_real():
        raise FormError("real rank of a non-real form")
    L = _resolve_factor(F, L, seed)
    cx = complex_rank(F, L, seed, budget)
    cls = classify_form(F, L, "real")
    fam = cls.family
    n = fam.n
    notes = []
    certs = [{"kind": "ComplexRank", "lower": cx.lower, "certificates": cx.lower_certs}]
    if fam.n_essential == 1:
        D = _pull_to_input(cls, fam, Decomposition(3, [(Fraction(1), LinearForm([1]))]))
        return RankResult("real", 1, 1, certs, _decomposition_cert(D, F, "cube"), D,
                          cls.to_json())
    f_lo, f_hi = _real_formula(fam)
    lower = max(cx.lower, f_lo if fam.label != "CaseII" or f_lo == 2 * n else 0)
    if fam.label in ("CaseI", "CaseII"):
        crit, ccert = criterion_search(fam.canonical(), "real", budget)
        if ccert is not None and cls.check(fam):
            ccert["equivalence"] = _equivalence_json(cls, fam)
            certs.append(ccert)
            lower = max(lower, crit)
    if lower < f_lo:
        certs.append({"kind": "TheoremFormula", "label": fam.label, "value": f_lo})
        notes.append("lower bound taken from the family formula")
        lower = f_lo
    D = _pull_to_input(cls, fam, decompose_real(fam))
    if D is not None:
        upper_cert = _decomposition_cert(D, F, fam.label)
        # the CaseIII bracket is the family statement; shorter lengths go to the intersection
        upper = f_hi if fam.label == "CaseIII" else min(f_hi, len(D))
    else:
        upper_cert = {"kind": "TheoremFormula", "label": fam.label, "value": f_hi}
        upper = f_hi
    result = RankResult("real", lower, upper, certs, upper_cert, D, cls.to_json(), None, notes)

    scan_report = None
    ternary_gap = fam.n_essential == 3 and cx.lower == 4
    if scan and ternary_gap and lower == 4 and upper > 4 and fam.label != "CaseIII":
        scan_report = _scan_and_apply(result, cls, seed)

    if fam.label == "CaseIII" or fam.overlap_flags:
        result.intersection = _intersection(result, cls, fam, seed, budget,
                                            scan and ternary_gap and scan_report is None)
    return result


def _scan_and_apply(result: RankResult, cls: FormClassification, seed: int):
    report = apolar_real_split_scan(cls.reduction.form, seed=seed)
    cert = _scan_cert(report, cls, seed)
    if report.status == "none-found":
        if report.rigorous:
            result.lower = max(result.lower, 5)
            result.lower_certs.append(cert)
        else:
            cert["probable_lower"] = 5
            result.lower_certs.append(cert)
            result.notes.append("apolar scan is not exhaustive here; lower bound 5 is probable only")
    elif report.decomposition is not None:
        S_inv = cls.reduction.transform.inverse()
        D = pull_back(pad(report.decomposition, cls.form.nvars), S_inv, 1)
        result.upper_cert = _decomposition_cert(D, cls.form, "apolar scan")
        result.decomposition = D
        result.upper = min(result.upper, len(D))
    return report


def _intersection(result: RankResult, cls, fam, seed, budget, run_scan: bool) -> dict:
    """Intersect with the interval of every other family the form belongs to."""
    lo, hi = result.lower, result.upper
    if result.decomposition is not None:
        hi = min(hi, len(result.decomposition))
    certs = []
    alt = fam.alternative
    if alt is not None and cls.check(alt):
        a_lo, a_hi = _real_formula(alt)
        certs.append({"kind": "TheoremFormula", "label": alt.label, "lower": a_lo, "upper": a_hi,
                      "equivalence": _equivalence_json(cls, alt)})
        lo, hi = max(lo, a_lo), min(hi, a_hi)
        crit, ccert = criterion_search(alt.canonical(), "real", budget)
        if ccert is not None:
            ccert["equivalence"] = _equivalence_json(cls, alt)
            certs.append(ccert)
            lo = max(lo, crit)
        D = _pull_to_input(cls, alt, decompose_real(alt))
        if D is not None:
            certs.append(_decomposition_cert(D, cls.form, alt.label))
            hi = min(hi, len(D))
    if run_scan and lo == 4 and hi > 4:
        report = apolar_real_split_scan(cls.reduction.form, seed=seed)
        certs.append(_scan_cert(report, cls, seed))
        if report.status == "none-found" and report.rigorous:
            lo = 5
        elif report.decomposition is not None:
            hi = min(hi, len(report.decomposition))
    out = {"lower": lo, "upper": hi, "alternative": alt.label if alt else None,
           "certificates": certs}
    if lo > hi:
        out["inconsistent"] = True
    return out


def _scan_cert(report: "ScanReport", cls: FormClassification, seed: int) -> dict:
    return {"kind": "ApolarScan", "seed": seed, "scanned_form": cls.reduction.form.to_text(),
            "reduction": cls.reduction.transform.to_json(), **report.to_json()}


# -- degree-d family ---------------------------------------------------------

def _lift(P: Poly, nvars: int) -> Poly:
    pad_ = (0,) * (nvars - P.nvars)
    return Poly(nvars, {e + pad_: c for e, c in P.terms.items()})


def _compose(P: Poly, args: list) -> Poly:
    nv = args[0].nvars
    out = Poly(nv)
    for e, c in P.terms.items():
        term = Poly.constant(nv, c)
        for i, k in enumerate(e):
            if k:
                term = term * args[i] ** k
        out = out + term
    return out


def _generalized_level(r: int, n: int) -> dict:
    """Check F_0 + sum mu_k F_k = F^(r-1)(x0, y1, ..., yn) symbolically."""
    N = n + 1
    t = r - 1
    F = generalized_c_form(r, n)
    P = partials(F)
    indep = linalg.rank(_coeff_matrix(P[1:])) == n
    nv = N + n                       # x0..xn then mu_1..mu_n
    X = [Poly.var(nv, i) for i in range(N)]
    MU = [None] + [Poly.var(nv, N + k - 1) for k in range(1, N)]
    lhs = _lift(P[0], nv)
    for k in range(1, N):
        lhs = lhs + MU[k] * _lift(P[k], nv)
    root = sqrt(Fraction(t - 1))
    y = [X[0], None] + [X[k] * root + MU[k] * X[0] * (1 / root) for k in range(2, N)]
    corr = Poly(nv)
    for k in range(2, N):
        corr = corr + MU[k] * MU[k]
    y[1] = (MU[1] - corr * Fraction(1, t - 1)) * X[0] + X[1] * t
    G = generalized_c_form(r - 1, n)
    rhs = _compose(G, y)
    identity = (lhs - rhs).is_zero()
    # the substitution x -> (x0, y1, ..., yn) is invertible for every mu
    mu_ring = n
    rows = []
    for i in range(N):
        row = []
        for j in range(N):
            c = y[i].terms
            coeff = Poly(mu_ring)
            for e, v in c.items():
                if e[j] == 1 and sum(e[:N]) == 1:
                    coeff = coeff + Poly(mu_ring, {e[N:]: v})
            row.append(coeff)
        rows.append(row)
    det = _bareiss(rows, mu_ring)
    invertible = det.is_constant() and not det.is_zero()
    return {"degree": r, "t": t, "partials_independent": indep, "identity_verified": identity,
            "substitution_det": to_str(det.constant_term()) if det.is_constant() else None,
            "invertible": invertible, "p": n}


def generalized_c_certificate(d: int, n: int, budget: SamplingBudget | None = None) -> RankResult:
    """Exact complex rank (d-1)n+1 of x0^(d-1) x1 + x0^(d-2) sum_{k>=2} x_k^2."""
    if d < 3 or n < 2:
        raise ValueError("need d >= 3 and n >= 2")
    F3 = generalized_c_form(3, n)
    base, bcert = criterion_bound(CriterionInstance(F3, 0, tuple(range(1, n + 1)), n + 1),
                                  "complex", budget)
    levels = [{"degree": 3, "bound": base, "criterion": bcert}]
    bound = base
    ok = base == 2 * n + 1
    for r in range(4, d + 1):
        lv = _generalized_level(r, n)
        good = lv["identity_verified"] and lv["invertible"] and lv["partials_independent"]
        ok = ok and good
        bound = bound + n if good else bound
        lv["bound"] = bound
        levels.append(lv)
    D = decompose_generalized_c(d, n)
    F = generalized_c_form(d, n)
    upper_cert = _decomposition_cert(D, F, "roots of unity")
    lower = bound if ok else catalecticant_bound(F)
    cert = {"kind": "RecursiveCriterion", "levels": levels, "verified": ok}
    return RankResult("complex", lower, len(D), [cert], upper_cert, D,
                      {"label": "GeneralizedC", "degree": d, "n": n})


# -- apolar real-split scan --------------------------------------------------

@dataclass
class ScanReport:
    status: str                      # found | none-found
    rigorous: bool
    apolar_dim: int
    reason: str = ""
    pencil: list | None = None
    decomposition: Decomposition | None = None
    samples: int = 0

    def to_json(self) -> dict:
        out = {"status": self.status, "rigorous": self.rigorous, "apolar_dim": self.apolar_dim,
               "reason": self.reason, "samples": self.samples}
        if self.pencil is not None:
            out["pencil"] = [[[to_str(x) for x in row] for row in M] for M in self.pencil]
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_json()
        return out


def apolar_quadrics(F: Form) -> list[list[list]]:
    """Basis of the degree-2 apolar space, as symmetric matrices in dual variables."""
    if F.degree != 3:
        raise ScanError("the scan needs a cubic")
    N = F.nvars
    pairs = [(i, j) for i in range(N) for j in range(i, N)]
    images = [F.diff(i).diff(j) for i, j in pairs]
    A = [[img.coeff(tuple(int(k == v) for k in range(N))) for v in range(N)] for img in images]
    ker = linalg.nullspace(linalg.transpose(A)) if A else []
    out = []
    for vec in ker:
        M = linalg.zeros(N, N)
        for (i, j), c in zip(pairs, vec):
            if i == j:
                M[i][i] = c
            else:
                M[i][j] = c / 2
                M[j][i] = c / 2
        out.append(M)
    return out


def _comb(mats, coeffs):
    N = len(mats[0])
    return [[sum((c * M[i][j] for c, M in zip(coeffs, mats)), Fraction(0)) for j in range(N)]
            for i in range(N)]


def _e2(M):
    n = len(M)
    return sum((M[i][i] * M[j][j] - M[i][j] * M[j][i] for i in range(n) for j in range(i + 1, n)),
               Fraction(0))


def _split_lines(M):
    """Two linear forms with x^T M x = l1 * l2, for a rank-2 indefinite M."""
    terms = []
    P, D = congruence_diagonalize(M)
    Pinv = linalg.inverse(P)
    for i in range(len(M)):
        if D[i][i] != 0:
            terms.append((D[i][i], Pinv[i]))
    if len(terms) != 2:
        return None
    (d1, l1), (d2, l2) = terms
    try:
        r1, r2 = sqrt(d1), sqrt(-d2)
    except ValueError:
        return None
    u = [r1 * a + r2 * b for a, b in zip(l1, l2)]
    v = [r1 * a - r2 * b for a, b in zip(l1, l2)]
    return LinearForm(u), LinearForm(v)


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def _decomposition_from_pencil(F: Form, G1, G2):
    """Four real cubes from the base points of two split members, when expressible."""
    a = _split_lines(G1)
    b = _split_lines(G2)
    if a is None or b is None:
        return None
    pts = [_cross(x.coeffs, y.coeffs) for x in a for y in b]
    # the dual points are the linear forms themselves
    basis = [LinearForm(p).power(3) for p in pts]
    keys = sorted(set(F.terms) | {e for f in basis for e in f.terms})
    M = [[f.terms.get(e, Fraction(0)) for f in basis] for e in keys]
    lam = linalg.solve(M, [F.terms.get(e, Fraction(0)) for e in keys])
    if lam is None:
        return None
    D = Decomposition(3, [(l, LinearForm(p)) for l, p in zip(lam, pts) if l != 0])
    ok, _ = verify_decomposition(D, F)
    return D if ok and D.is_real() else None


def _binary_cubic_disc(c):
    a, b, cc, d = c
    return 18 * a * b * cc * d - 4 * b ** 3 * d + b * b * cc * cc - 4 * a * cc ** 3 - 27 * a * a * d * d


def _test_pencil(G1, G2):
    """G1 singular rank-2 indefinite; True when the pencil has 4 real base points."""
    if not _is_split(G1):
        return False
    p = parametric_det(ParametricSymMatrix.from_matrices(G1, [G2]))   # det(G1 + t G2)
    c = [p.coeff((k,)) for k in range(4)]
    if c[0] != 0 or c[1] == 0:
        return False
    # singular members: t = 0, the roots of c1 + c2 t + c3 t^2, and G2 itself if c3 = 0
    if c[3] == 0:
        if c[2] == 0:
            return False
        members = [_comb([G1, G2], [1, -c[1] / c[2]]), G2]
    else:
        disc = c[2] * c[2] - 4 * c[1] * c[3]
        if sign(disc) <= 0:
            return False
        r = sqrt(disc)
        members = [_comb([G1, G2], [1, (-c[2] + s * r) / (2 * c[3])]) for s in (1, -1)]
    return all(_is_split(Mm) for Mm in members)


def _is_split(M) -> bool:
    if linalg.det(M) != 0:
        return False
    e2 = _e2(M)
    return e2 != 0 and sign(e2) < 0


def _fixed_line(G1, G2) -> bool:
    """Do two conics share a common line component?"""
    Q1 = quadratic_form_of(G1)
    Q2 = quadratic_form_of(G2)
    P, D = congruence_diagonalize(G1)
    Pinv = linalg.inverse(P)
    terms = [(D[i][i], Pinv[i]) for i in range(len(G1)) if D[i][i] != 0]
    lines = []
    if len(terms) == 1:
        lines = [LinearForm(terms[0][1])]
    elif len(terms) == 2:
        (d1, l1), (d2, l2) = terms
        try:
            r = sqrt(-d2 / d1)
        except ValueError:
            return True   # cannot decide; treat as possible
        lines = [LinearForm([a + r * b for a, b in zip(l1, l2)]),
                 LinearForm([a - r * b for a, b in zip(l1, l2)])]
    else:
        return False
    return any(divide_by_linear(l, Q2) is not None for l in lines if not Q1.is_zero())


def _line_pencil(ell: LinearForm, basis):
    """Two conics spanning the pencil cut out by a line in the net's parameter plane."""
    ker = linalg.nullspace([list(ell.coeffs)])
    return [_comb(basis, v) for v in ker]


def apolar_real_split_scan(F: Form, seed: int = 0, trials: int = 200) -> ScanReport:
    """Search the degree-2 apolar space of a ternary cubic for a pencil with
    four real base points (equivalently a real four-term decomposition)."""
    if F.nvars != 3 or F.degree != 3:
        raise ScanError("the scan needs a ternary cubic")
    basis = apolar_quadrics(F)
    k = len(basis)
    if k == 0:
        raise ScanError("apolar space is empty in degree 2")
    if k == 1:
        return ScanReport("none-found", True, 1, "a single conic cannot cut out four points")
    rng = random.Random(f"{seed}:scan")

    # rational split members
    cands = []
    for M in basis:
        cands.append(M)
    for A, B in itertools.combinations(basis, 2):
        cands += [_comb([A, B], [1, 1]), _comb([A, B], [1, -1])]
    line_factors = []
    if k == 2:
        D = parametric_det(ParametricSymMatrix.from_matrices(basis[0], [basis[1]]))
        c = [D.coeff((j,)) for j in range(4)]
        if all(x == 0 for x in c):
            if not _fixed_line(*basis):
                return ScanReport("none-found", True, 2,
                                  "every member of the only pencil is singular and no line is fixed")
        elif sign(_binary_cubic_disc(c)) <= 0:
            return ScanReport("none-found", True, 2,
                              "the only pencil has fewer than three distinct real singular members")
    if k == 3:
        D = parametric_det(ParametricSymMatrix.from_matrices(linalg.zeros(3, 3), basis))
        Df = Form.from_poly(D, 3) if not D.is_zero() else None
        if Df is not None:
            ell = find_linear_factor(Df, seed)
            if ell is not None:
                line_factors.append((ell, divide_by_linear(ell, Df)))
                for u in linalg.nullspace([list(ell.coeffs)]):
                    for w in linalg.nullspace([list(ell.coeffs)]):
                        for s in (1, -1, 2, Fraction(1, 2)):
                            cands.append(_comb(basis, [x + s * y for x, y in zip(u, w)]))
                    cands.append(_comb(basis, u))
    split = [M for M in cands if _is_split(M)]

    # exhaustive analysis for nets settles the question without sampling
    if k == 3 and line_factors:
        ell, R = line_factors[0]
        Rm = matrix_of_quadratic(R)
        sig = signature(Rm)
        if sig[0] == 0 or sig[1] == 0:
            comps = [ell]
            if sig[2] == 2:
                # R is a square of a line; that line is a component too
                P_, D_ = congruence_diagonalize(Rm)
                Pinv = linalg.inverse(P_)
                comps.append(LinearForm(next(Pinv[i] for i in range(3) if D_[i][i] != 0)))
            fixed = any(_fixed_line(*_line_pencil(c, basis)) for c in comps)
            if not fixed:
                return ScanReport(
                    "none-found", True, k,
                    "determinant cubic is a line times a non-indefinite conic: no pencil meets "
                    "it in three real points, and no line component carries a fixed line",
                    None, None, 0)
    samples = 0
    partners = list(basis)
    for _ in range(trials):
        partners.append(_comb(basis, [Fraction(rng.randint(-9, 9)) for _ in range(k)]))
    for G1 in split:
        for G2 in partners:
            samples += 1
            if _test_pencil(G1, G2):
                pen = [G1, G2]
                dec = None
                # a rational second split member lets us read off the base points
                for G3 in split:
                    if G3 is not G1 and linalg.rank([sum(G1, []), sum(G2, []), sum(G3, [])]) == 2:
                        dec = _decomposition_from_pencil(F, G1, G3)
                        if dec is not None:
                            break
                return ScanReport("found", True, k, "pencil with four real base points",
                                  pen, dec, samples)

    return ScanReport("none-found", False, k, "no split pencil among the sampled candidates",
                      None, None, samples)



# -- re-verification ---------------------------------------------------------

def _check_equivalence(eq: dict, F: Form) -> bool:
    if eq is None or eq.get("witness") is None:
        return False
    G = parse_form(eq["canonical"]).pad(F.nvars)
    W = BasisChange.from_json(eq["witness"])
    return substitute(G, W) * from_str(eq["scale"]) == F


def _check_one(cert: dict, F: Form) -> tuple[bool, str]:
    kind = cert.get("kind")
    if kind == "CatalecticantRank":
        return catalecticant_bound(F) == cert["rank"], kind
    if kind == "Criterion":
        eq = cert.get("equivalence")
        ok = recheck_criterion(cert)
        if eq is not None:
            ok = ok and _check_equivalence(eq, F)
        else:
            ok = ok and parse_form(cert["instance"]["form"], F.nvars) == F
        return ok, kind
    if kind == "Decomposition":
        D = Decomposition.from_json(cert["decomposition"])
        return verify_decomposition(D, F)[0] and len(D) == cert["terms"], kind
    if kind == "ComplexRank":
        return all(_check_one(c, F)[0] for c in cert["certificates"]), kind
    if kind == "ApolarScan":
        G = parse_form(cert["scanned_form"], 3)
        T = BasisChange.from_json(cert["reduction"])
        if substitute(G.pad(F.nvars), T.inverse()) != F:
            return False, kind
        again = apolar_real_split_scan(G, seed=cert.get("seed", 0))
        return (again.status, again.rigorous) == (cert["status"], cert["rigorous"]), kind
    if kind == "RecursiveCriterion":
        ok = cert["verified"]
        for lv in cert["levels"]:
            if lv["degree"] == 3:
                ok = ok and recheck_criterion(lv["criterion"])
            else:
                n = lv["p"]
                again = _generalized_level(lv["degree"], n)
                ok = ok and again["identity_verified"] and again["invertible"]
        return ok, kind
    if kind == "TheoremFormula":
        eq = cert.get("equivalence")
        return (True if eq is None else _check_equivalence(eq, F)), "TheoremFormula (cited)"
    return False, f"unknown certificate {kind!r}"


def _implied(cert: dict):
    """(lower, upper) bound a certificate supports, either may be None."""
    kind = cert.get("kind")
    if kind == "CatalecticantRank":
        return cert["rank"], None
    if kind == "Criterion":
        return cert.get("bound"), None
    if kind == "Decomposition":
        return None, cert["terms"]
    if kind == "ComplexRank":
        return max((_implied(c)[0] or 0 for c in cert["certificates"]), default=0), None
    if kind == "ApolarScan":
        ok = cert["status"] == "none-found" and cert["rigorous"]
        return (5 if ok else None), None
    if kind == "RecursiveCriterion":
        levels = cert["levels"]
        return levels[0]["criterion"]["bound"] + sum(lv["p"] for lv in levels[1:]), None
    if kind == "TheoremFormula":
        return cert.get("lower", cert.get("value")), cert.get("upper")
    return None, None


def _supports(certs, checks) -> tuple:
    lows, highs = [], []
    for cert, ok in zip(certs, checks):
        if ok:
            lo, hi = _implied(cert)
            if lo is not None:
                lows.append(lo)
            if hi is not None:
                highs.append(hi)
    return max(lows, default=0), min(highs, default=None)


def verify_result(data: dict, F: Form) -> dict:
    """Re-validate every certificate of a RankResult JSON against F, and check
    that the claimed bounds are the ones the certificates support."""
    checks = []
    lower_certs = data["certificates"]["lower"]
    for cert in lower_certs:
        ok, what = _check_one(cert, F)
        checks.append({"side": "lower", "kind": what, "ok": ok})
    up = data["certificates"]["upper"]
    upper_ok = False
    if up is not None:
        upper_ok, what = _check_one(up, F)
        checks.append({"side": "upper", "kind": what, "ok": upper_ok})
    lo, _ = _supports(lower_certs, [c["ok"] for c in checks[:len(lower_certs)]])
    _, hi = _supports([up] if up else [], [upper_ok])
    checks.append({"side": "claims", "kind": "lower supported", "ok": data["lower"] <= lo})
    checks.append({"side": "claims", "kind": "upper supported",
                   "ok": hi is not None and data["upper"] >= hi})
    inter = data.get("intersection")
    if inter:
        icerts = inter["certificates"]
        iok = []
        for cert in icerts:
            ok, what = _check_one(cert, F)
            iok.append(ok)
            checks.append({"side": "intersection", "kind": what, "ok": ok})
        ilo, ihi = _supports(icerts, iok)
        hi_all = min(h for h in (hi, ihi) if h is not None) if (hi or ihi) else None
        checks.append({"side": "intersection", "kind": "bounds supported",
                       "ok": inter["lower"] <= max(lo, ilo)
                       and hi_all is not None and inter["upper"] >= hi_all})
    return {"ok": all(c["ok"] for c in checks), "checks": checks}
