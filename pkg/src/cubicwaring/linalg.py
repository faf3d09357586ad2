"""Dense exact linear algebra over any of the scalar domains.

Matrices are lists of rows.  Every routine is plain Gaussian elimination;
the sizes involved here are tiny, so clarity wins over speed.
"""
from __future__ import annotations

from fractions import Fraction

from .scalar import as_scalar


def zeros(r: int, c: int) -> list[list]:
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n: int) -> list[list]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def copy(M) -> list[list]:
    return [[as_scalar(x) for x in row] for row in M]


def transpose(M) -> list[list]:
    return [list(col) for col in zip(*M)] if M else []


def matmul(A, B) -> list[list]:
    Bt = transpose(B)
    out = []
    for row in A:
        out_row = []
        for col in Bt:
            acc = Fraction(0)
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            out_row.append(acc)
        out.append(out_row)
    return out


def matvec(A, v) -> list:
    return [sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in A]


def dot(u, v):
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def _echelon(M):
    """Row-reduce a copy of M; returns (reduced matrix, pivot columns, det sign/scale)."""
    A = copy(M)
    rows = len(A)
    cols = len(A[0]) if A else 0
    pivots = []
    r = 0
    scale = Fraction(1)
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
            scale = -scale
        piv = A[r][c]
        scale = scale * piv
        inv = 1 / piv
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y if y else x for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots, scale


def rank(M) -> int:
    if not M or not M[0]:
        return 0
    return len(_echelon(M)[1])


def det(M):
    n = len(M)
    if n == 0:
        return Fraction(1)
    A, pivots, scale = _echelon(M)
    if len(pivots) < n:
        return Fraction(0)
    return scale


def inverse(M) -> list[list]:
    n = len(M)
    aug = [list(row) + e for row, e in zip(copy(M), identity(n))]
    A, pivots, _ = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in A]


def nullspace(M, ncols: int | None = None) -> list[list]:
    """Basis of {v : M v = 0}."""
    if not M:
        n = ncols or 0
        return identity(n)
    n = len(M[0])
    A, pivots, _ = _echelon(M)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -A[r][f]
        basis.append(v)
    return basis


def solve(M, b):
    """One solution of M x = b, or None when inconsistent."""
    n = len(M[0])
    aug = [list(row) + [bb] for row, bb in zip(copy(M), b)]
    A, pivots, _ = _echelon(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        x[pc] = A[r][n]
    return x


def complete_basis(rows: list[list], n: int) -> list[list]:
    """Extend independent row vectors to a basis of the n-dimensional space."""
    out = [list(r) for r in rows]
    for i in range(n):
        if len(out) == n:
            break
        e = [Fraction(int(i == j)) for j in range(n)]
        if rank(out + [e]) > len(out):
            out.append(e)
    return out
