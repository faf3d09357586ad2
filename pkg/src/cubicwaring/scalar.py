"""Exact scalars: rationals, multi-quadratic towers and cyclotomic fields.

Rationals are plain :class:`fractions.Fraction` values.  :class:`Tower`
holds elements of Q(sqrt(d1), ..., sqrt(dk), i) as a sparse combination of
basis elements ``i**e * sqrt(m)`` with ``m`` square-free and positive.
:class:`Cyclo` holds elements of Q(zeta_N) as coordinates over the power
basis modulo the N-th cyclotomic polynomial.
"""
from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = [
    "Tower", "Cyclo", "DomainError", "as_scalar", "sqrt", "sign", "is_real",
    "is_rational", "rational_value", "approx", "scalar_op", "to_str",
    "from_str", "cyclotomic_poly", "zeta", "I", "domain_of",
]


class DomainError(TypeError):
    """Raised when scalars from incompatible exact domains are combined."""


# -- integer helpers ---------------------------------------------------------

@lru_cache(maxsize=4096)
def _factor(m: int) -> tuple:
    out = []
    p = 2
    while p * p <= m:
        while m % p == 0:
            out.append(p)
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out.append(m)
    return tuple(out)


def _squarefree_split(m: int) -> tuple[int, int]:
    """Return (s, f) with m = s * f**2 and s square-free (m > 0)."""
    s, f = 1, 1
    counts: dict[int, int] = {}
    for p in _factor(m):
        counts[p] = counts.get(p, 0) + 1
    for p, c in counts.items():
        f *= p ** (c // 2)
        if c % 2:
            s *= p
    return s, f


# -- multi-quadratic tower ---------------------------------------------------

def _key_mul(k1, k2):
    """Product of basis elements; returns (integer factor, key)."""
    (e1, m1), (e2, m2) = k1, k2
    g = math.gcd(m1, m2)
    c = g
    e = e1 + e2
    if e == 2:
        c, e = -c, 0
    return c, (e, (m1 // g) * (m2 // g))


class Tower:
    """Element of a multi-quadratic extension of Q, possibly containing i."""

    __slots__ = ("coords",)

    def __init__(self, coords=None):
        clean = {}
        if coords:
            for k, v in coords.items():
                v = Fraction(v)
                if v:
                    clean[k] = v
        self.coords = clean

    @classmethod
    def rational(cls, r) -> "Tower":
        return cls({(0, 1): Fraction(r)})

    @classmethod
    def sqrt_int(cls, n: int) -> "Tower":
        """sqrt(n) for any integer n (negative gives i*sqrt(|n|))."""
        if n == 0:
            return cls()
        s, f = _squarefree_split(abs(n))
        return cls({(1 if n < 0 else 0, s): Fraction(f)})

    # -- structure
    @property
    def generators(self) -> list[int]:
        gens = set()
        for e, m in self.coords:
            if e:
                gens.add(-1)
            gens.update(_factor(m))
        return sorted(gens)

    def is_zero(self) -> bool:
        return not self.coords

    def is_rational(self) -> bool:
        return all(k == (0, 1) for k in self.coords)

    def is_real(self) -> bool:
        return all(e == 0 for e, _ in self.coords)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords.get((0, 1), Fraction(0))

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, Tower):
            return other
        if isinstance(other, (int, Rational)):
            return Tower.rational(other)
        if isinstance(other, Cyclo):
            raise DomainError("cannot mix tower and cyclotomic scalars")
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coords)
        for k, v in other.coords.items():
            out[k] = out.get(k, 0) + v
        return Tower(out)

    __radd__ = __add__

    def __neg__(self):
        return Tower({k: -v for k, v in self.coords.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, v1 in self.coords.items():
            for k2, v2 in other.coords.items():
                c, k = _key_mul(k1, k2)
                out[k] = out.get(k, 0) + c * v1 * v2
        return Tower(out)

    __rmul__ = __mul__

    def _split(self, g: int):
        """Write self = u + v*sqrt(g) with u, v free of the generator g."""
        u, v = {}, {}
        for (e, m), c in self.coords.items():
            if g == -1:
                if e:
                    v[(0, m)] = c
                else:
                    u[(e, m)] = c
            elif m % g == 0:
                v[(e, m // g)] = c
            else:
                u[(e, m)] = c
        return Tower(u), Tower(v)

    def _conjugate(self, g: int) -> "Tower":
        out = {}
        for (e, m), c in self.coords.items():
            hit = bool(e) if g == -1 else m % g == 0
            out[(e, m)] = -c if hit else c
        return Tower(out)

    def inverse(self) -> "Tower":
        if self.is_zero():
            raise ZeroDivisionError("division by zero tower element")
        if self.is_rational():
            return Tower.rational(1 / self.rational_value())
        g = self.generators[-1]
        conj = self._conjugate(g)
        norm = self * conj
        return conj * norm.inverse()

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Tower.rational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Tower":
        """Complex conjugate (flip the sign of i)."""
        return self._conjugate(-1)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except DomainError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_value())
        return hash(frozenset(self.coords.items()))

    def __bool__(self):
        return bool(self.coords)

    def __complex__(self):
        total = 0j
        for (e, m), c in self.coords.items():
            term = float(c) * math.sqrt(m)
            total += term * 1j if e else term
        return total

    def __repr__(self):
        return f"Tower({to_str(self)!r})"

    def __str__(self):
        return to_str(self)


I = Tower({(1, 1): Fraction(1)})


def _tower_sign(x: Tower) -> int:
    if not x.is_real():
        raise ValueError(f"sign of non-real scalar {x}")
    if x.is_rational():
        v = x.rational_value()
        return (v > 0) - (v < 0)
    g = x.generators[-1]
    u, v = x._split(g)
    su, sv = _tower_sign(u), _tower_sign(v)
    if su == 0 or su == sv:
        return sv
    if sv == 0:
        return su
    # opposite signs: compare u**2 with g*v**2
    d = _tower_sign(u * u - v * v * g)
    return su if d > 0 else (sv if d < 0 else 0)


def _tower_sqrt(x: Tower, depth: int = 0):
    """Square root inside the tower, or None when it would leave the tower."""
    if depth > 16:
        return None
    if x.is_zero():
        return Tower()
    if x.is_rational():
        r = x.rational_value()
        num, den = r.numerator, r.denominator
        root = Tower.sqrt_int(num * den)
        return root * Fraction(1, den)
    if len(x.coords) == 1:
        ((e, m), c), = x.coords.items()
        if m == 1 and e == 1:
            # sqrt(c*i) = sqrt(c/2) * (1 + i), with sign handling for c < 0
            base = _tower_sqrt(Tower.rational(abs(c) / 2), depth + 1)
            return base * (1 + I) if c > 0 else base * (1 - I)
    g = x.generators[-1]
    u, v = x._split(g)
    if v.is_zero():
        return None
    norm = u * u - v * v * g
    n = _tower_sqrt(norm, depth + 1)
    if n is None or not set(n.generators) <= set(x.generators) - {g}:
        # the norm must be a square in the subfield without g
        return None
    for cand in (n, -n):
        half = (u + cand) / 2
        s = _tower_sqrt(half, depth + 1)
        if s is not None and not s.is_zero():
            t = v / (s * 2)
            root = s + t * Tower.sqrt_int(g)
            if root * root == x:
                return root
    return None


# -- cyclotomic fields -------------------------------------------------------

def _poly_divmod(a: list, b: list):
    """Polynomial division over Q; coefficient lists, lowest degree first."""
    a = _poly_trim(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = Fraction(a[-1]) / lead
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] -= c * bc
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _poly_trim(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Coefficients (lowest first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("order must be positive")
    num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod(num, list(cyclotomic_poly(d)))
            assert not _poly_trim(rem)
    return tuple(_poly_trim(num))


class Cyclo:
    """Element of Q(zeta_N) in the power basis modulo Phi_N."""

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords=()):
        phi = cyclotomic_poly(order)
        deg = len(phi) - 1
        c = [Fraction(x) for x in coords]
        if len(c) > deg:
            _, c = _poly_divmod(c, list(phi))
        c = list(c) + [Fraction(0)] * (deg - len(c))
        self.order = order
        self.coords = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def _coerce(self, other):
        if isinstance(other, Cyclo):
            if other.order != self.order:
                raise DomainError(f"cyclotomic orders differ: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Rational)):
            return Cyclo(self.order, [other])
        if isinstance(other, Tower):
            if other.is_rational():
                return Cyclo(self.order, [other.rational_value()])
            raise DomainError("cannot mix tower and cyclotomic scalars")
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclo(self.order, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.order, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prod = [Fraction(0)] * (2 * self.degree)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[i + j] += a * b
        return Cyclo(self.order, prod)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise ZeroDivisionError("division by zero cyclotomic element")
        # extended Euclid: find s with s*self = 1 mod Phi
        r0, r1 = list(cyclotomic_poly(self.order)), _poly_trim(self.coords)
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            qs = _poly_mul(q, s1)
            s2 = _poly_sub(s0, qs)
            r0, r1, s0, s1 = r1, _poly_trim(r), s1, s2
        c = r1[0]
        return Cyclo(self.order, [x / c for x in s1])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyclo(self.order, [1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except DomainError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0])
        return hash((self.order, self.coords))

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.order)
        return sum(float(c) * z ** k for k, c in enumerate(self.coords) if c)

    def __repr__(self):
        return f"Cyclo({to_str(self)!r})"

    def __str__(self):
        return to_str(self)


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


def zeta(order: int, k: int = 1) -> Cyclo:
    """zeta_N ** k."""
    k %= order
    return Cyclo(order, [0] * k + [1])


# -- generic helpers ---------------------------------------------------------

def as_scalar(x):
    if isinstance(x, (Tower, Cyclo, Fraction)):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def domain_of(x) -> str:
    if isinstance(x, Cyclo):
        return f"cyclotomic:{x.order}"
    if isinstance(x, Tower):
        return "tower"
    return "rational"


def is_rational(x) -> bool:
    return not isinstance(x, (Tower, Cyclo)) or x.is_rational()


def rational_value(x) -> Fraction:
    if isinstance(x, (Tower, Cyclo)):
        return x.rational_value()
    return Fraction(x)


def is_real(x) -> bool:
    if isinstance(x, Tower):
        return x.is_real()
    if isinstance(x, Cyclo):
        # exact test: x equals its image under zeta -> zeta**-1
        return x == _cyclo_conj(x)
    return True


def _cyclo_conj(x: Cyclo) -> Cyclo:
    out = Cyclo(x.order)
    for k, c in enumerate(x.coords):
        if c:
            out = out + zeta(x.order, -k) * c
    return out


def sign(x) -> int:
    """Exact sign of a real scalar."""
    if isinstance(x, Tower):
        return _tower_sign(x)
    if isinstance(x, Cyclo):
        if x.is_rational():
            v = x.coords[0]
            return (v > 0) - (v < 0)
        raise ValueError("exact sign is only available for rational cyclotomic values")
    x = Fraction(x)
    return (x > 0) - (x < 0)


def sqrt(x):
    """Exact square root in the multi-quadratic tower.

    Raises ValueError when the root is not expressible in a tower.
    """
    if isinstance(x, Cyclo):
        if x.is_rational():
            return _tower_sqrt(Tower.rational(x.rational_value()))
        raise ValueError("square roots of cyclotomic elements are not supported")
    t = x if isinstance(x, Tower) else Tower.rational(x)
    root = _tower_sqrt(t)
    if root is None:
        raise ValueError(f"sqrt({t}) leaves the multi-quadratic tower")
    return root


def approx(x) -> tuple[float, float]:
    """Floating (re, im) approximation; reporting only."""
    if isinstance(x, (Tower, Cyclo)):
        z = complex(x)
    else:
        z = complex(float(Fraction(x)))
    return (z.real, z.imag)


def scalar_op(a, b, kind: str):
    a, b = as_scalar(a), as_scalar(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b
    raise ValueError(f"unknown operation {kind!r}")


# -- text serialization ------------------------------------------------------

def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _join_terms(terms: list[tuple[Fraction, str]]) -> str:
    if not terms:
        return "0"
    parts = []
    for idx, (c, atom) in enumerate(terms):
        neg = c < 0
        mag = -c if neg else c
        if atom:
            body = atom if mag == 1 else f"{_frac_str(mag)}*{atom}"
        else:
            body = _frac_str(mag)
        if idx == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


def to_str(x) -> str:
    if isinstance(x, Tower):
        terms = []
        for (e, m), c in sorted(x.coords.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            radicand = -m if e else m
            atom = "" if radicand == 1 else f"sqrt({radicand})"
            terms.append((c, atom))
        return _join_terms(terms)
    if isinstance(x, Cyclo):
        terms = []
        for k, c in enumerate(x.coords):
            if c:
                terms.append((c, "" if k == 0 else ("z" if k == 1 else f"z^{k}")))
        return f"[zeta{x.order}] " + _join_terms(terms)
    return _frac_str(Fraction(x))


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(sqrt\((-?\d+)\)|z(?:\^(\d+))?)?\s*"
)


def from_str(text: str):
    """Inverse of :func:`to_str`."""
    text = text.strip()
    order = None
    m = re.match(r"\[zeta(\d+)\]\s*", text)
    if m:
        order = int(m.group(1))
        text = text[m.end():]
    pos = 0
    terms = []
    while pos < len(text):
        tm = _TERM.match(text, pos)
        if not tm or tm.end() == pos:
            raise ValueError(f"cannot parse scalar {text!r} at {pos}")
        sgn, coef, atom, rad, zexp = tm.groups()
        if coef is None and atom is None:
            raise ValueError(f"cannot parse scalar {text!r} at {pos}")
        c = Fraction(coef) if coef else Fraction(1)
        if sgn == "-":
            c = -c
        terms.append((c, atom, rad, zexp))
        pos = tm.end()
    if order is not None:
        out = Cyclo(order)
        for c, atom, rad, zexp in terms:
            if atom and rad is not None:
                raise ValueError("sqrt term inside a cyclotomic scalar")
            k = 0 if atom is None else (int(zexp) if zexp else 1)
            out = out + zeta(order, k) * c
        return out
    if all(atom is None for _, atom, _, _ in terms):
        return sum((c for c, *_ in terms), Fraction(0))
    out = Tower()
    for c, atom, rad, zexp in terms:
        if atom is None:
            out = out + c
        elif rad is not None:
            out = out + Tower.sqrt_int(int(rad)) * c
        else:
            raise ValueError("z term outside a cyclotomic scalar")
    return out
