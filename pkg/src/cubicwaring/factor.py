"""Best-effort search for a rational linear factor of an expanded cubic.

Candidates come from rational roots of univariate restrictions; every
candidate is confirmed by exact division, so a returned factor is always
correct and a miss just means None.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from . import linalg
from .formcore import Form, LinearForm, divide_by_linear, substitute
from .scalar import Cyclo, Tower, is_rational, rational_value

MAX_COMBINATIONS = 2000


def _rational_coeffs(F: Form) -> bool:
    return all(not isinstance(c, (Tower, Cyclo)) or is_rational(c) for c in F.terms.values())


def rational_roots(coeffs) -> list[Fraction]:
    """Rational roots of sum coeffs[k] * s^k, found numerically and confirmed exactly."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    roots = []
    if coeffs[0] == 0:
        roots.append(Fraction(0))
    approx = np.roots([float(c) for c in reversed(coeffs)])
    for z in approx:
        if abs(z.imag) > 1e-6 * max(1.0, abs(z)):
            continue
        for bound in (10 ** 3, 10 ** 6):
            r = Fraction(z.real).limit_denominator(bound)
            if sum(c * r ** k for k, c in enumerate(coeffs)) == 0 and r not in roots:
                roots.append(r)
                break
    return roots


def _restriction(F: Form, j: int):
    """Coefficients (in s) of F(s, e_j)."""
    out = [Fraction(0)] * (F.degree + 1)
    for e, c in F.terms.items():
        if all(k == 0 for i, k in enumerate(e) if i not in (0, j)):
            out[e[0]] += rational_value(c)
    return out


def _find_monic(G: Form):
    """Factor x0 - sum r_j x_j of G, assuming G(e_0) != 0."""
    N = G.nvars
    cands = [rational_roots(_restriction(G, j)) for j in range(1, N)]
    if any(not c for c in cands):
        return None
    for combo in itertools.islice(itertools.product(*cands), MAX_COMBINATIONS):
        L = LinearForm([Fraction(1)] + [-r for r in combo])
        if divide_by_linear(L, G) is not None:
            return L
    return None


def find_linear_factor(F: Form, seed: int = 0, attempts: int = 50):
    """A linear form dividing F, or None.  Only rational factors are sought."""
    if F.is_zero() or not _rational_coeffs(F):
        return None
    N = F.nvars
    if N == 1:
        return LinearForm([Fraction(1)])
    for t in range(attempts + 1):
        if t == 0:
            A = linalg.identity(N)
        else:
            rng = random.Random(f"{seed}:{t}")
            A = linalg.identity(N)
            col = [Fraction(rng.randint(-5, 5)) for _ in range(N)]
            col[0] = Fraction(rng.randint(1, 5))
            for i in range(N):
                A[i][0] = col[i]
        G = substitute(F, A)
        if G.coeff((G.degree,) + (0,) * (N - 1)) == 0:
            continue
        LG = _find_monic(G)
        if LG is None:
            continue
        L = LG.compose(linalg.inverse(A))
        # normalize: first nonzero coefficient 1
        lead = next(c for c in L.coeffs if c != 0)
        L = LinearForm([c / lead for c in L.coeffs])
        if divide_by_linear(L, F) is not None:
            return L
    return None
