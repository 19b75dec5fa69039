"""Exact univariate and bivariate polynomials.

Coefficients are exact field elements: :class:`~fractions.Fraction` for Q, or
:class:`eisenkit.numberfield.AlgNum` for a number field.  A :class:`BiPoly`
stores ``{(z_exponent, w_exponent): coefficient}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .arith import LogReal, as_fraction, lcm
from .errors import DomainError, InvariantError


def _norm(c):
    return Fraction(c) if isinstance(c, int) else c


class UniPoly:
    """Dense univariate polynomial, coefficients indexed by degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_norm(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, c, k: int) -> "UniPoly":
        return cls([0] * k + [c])

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    # -- basic data ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def lc(self):
        if not self.coeffs:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def order(self) -> int:
        """Order of vanishing at 0."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        raise DomainError("order of the zero polynomial")

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == UniPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        from .parse import format_unipoly

        return f"UniPoly({format_unipoly(self)})"

    # -- ring operations ------------------------------------------------------
    def __add__(self, other) -> "UniPoly":
        other = _as_uni(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return UniPoly([x + b[i] if i < len(b) else x for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "UniPoly":
        return self + (-_as_uni(other))

    def __rsub__(self, other) -> "UniPoly":
        return _as_uni(other) - self

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            if other == 0:
                return UniPoly()
            return UniPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        result, base = UniPoly([1]), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: "UniPoly"):
        other = _as_uni(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        if len(rem) - 1 < dq:
            return UniPoly(), self
        inv = 1 / other.lc
        quo = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            c = c * inv
            quo[k - dq] = c
            for i, b in enumerate(other.coeffs):
                rem[k - dq + i] = rem[k - dq + i] - c * b
        return UniPoly(quo), UniPoly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "UniPoly":
        q, r = divmod(self, _as_uni(other))
        if not r.is_zero():
            raise InvariantError("inexact polynomial division")
        return q

    # -- calculus and evaluation ----------------------------------------------
    def derivative(self) -> "UniPoly":
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "UniPoly":
        return self * (1 / self.lc)

    def map(self, f) -> "UniPoly":
        return UniPoly([f(c) for c in self.coeffs])

    def shift(self, k: int) -> "UniPoly":
        """Multiply by x^k (k may be negative if divisible)."""
        if k >= 0:
            return UniPoly([0] * k + list(self.coeffs))
        if any(c != 0 for c in self.coeffs[:-k]):
            raise InvariantError("negative shift of a polynomial not divisible by x^k")
        return UniPoly(self.coeffs[-k:])

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd over the coefficient field."""
        a, b = self, _as_uni(other)
        while not b.is_zero():
            a, b = b, a % b
        return a if a.is_zero() else a.monic()


def _as_uni(x) -> UniPoly:
    return x if isinstance(x, UniPoly) else UniPoly([x])


# ---------------------------------------------------------------------------
# integer forms and heights over Q

def integer_coprime_form(coeffs: Sequence) -> list[int]:
    """Scale rationals to coprime integers (sign preserved)."""
    fr = [as_fraction(c) for c in coeffs]
    nz = [c for c in fr if c != 0]
    if not nz:
        raise DomainError("zero coefficient vector")
    den = lcm(*(c.denominator for c in nz))
    ints = [int(c * den) for c in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints]


def height_of_vector(coeffs: Sequence) -> LogReal:
    """Projective height over Q: log max |c_i| of the coprime integer form."""
    ints = integer_coprime_form(coeffs)
    return LogReal.log(max(abs(x) for x in ints))


def height_poly(P) -> LogReal:
    """Projective height h(P) of a nonzero polynomial over Q."""
    if isinstance(P, BiPoly):
        cs = list(P.terms.values())
    elif isinstance(P, UniPoly):
        cs = [c for c in P.coeffs if c != 0]
    else:
        raise TypeError("height_poly expects a UniPoly or BiPoly")
    if not cs:
        raise DomainError("height of the zero polynomial")
    return height_of_vector(cs)


def primitive_integer(poly: UniPoly) -> UniPoly:
    """Coprime integer multiple with positive leading coefficient."""
    ints = integer_coprime_form(poly.coeffs)
    if ints[-1] < 0:
        ints = [-x for x in ints]
    return UniPoly(ints)


# ---------------------------------------------------------------------------
# bivariate polynomials

def _graded_lex_key(mono):
    i, j = mono
    return (-(i + j), -j, -i)


class BiPoly:
    """Sparse polynomial in z and w: ``terms[(i, j)]`` is the coefficient of z^i w^j."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        out = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise DomainError("negative exponent in polynomial")
            c = _norm(c)
            if c != 0:
                out[(i, j)] = out.get((i, j), 0) + c
        self.terms = {k: v for k, v in out.items() if v != 0}

    @classmethod
    def constant(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def z(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def w(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def from_w_coeffs(cls, polys: Sequence[UniPoly]) -> "BiPoly":
        terms = {}
        for j, p in enumerate(polys):
            for i, c in enumerate(p.coeffs):
                if c != 0:
                    terms[(i, j)] = c
        return cls(terms)

    # -- basic data -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def m(self) -> int:
        """deg_z (-1 for the zero polynomial)."""
        return max((i for i, _ in self.terms), default=-1)

    @property
    def n(self) -> int:
        """deg_w (-1 for the zero polynomial)."""
        return max((j for _, j in self.terms), default=-1)

    def coefficients(self) -> list:
        return [self.terms[k] for k in self.monomials()]

    def monomials(self) -> list:
        """Monomials in graded-lex order (leading first)."""
        return sorted(self.terms, key=_graded_lex_key)

    def leading_coefficient(self):
        return self.terms[self.monomials()[0]]

    def __eq__(self, other) -> bool:
        if isinstance(other, BiPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"BiPoly({self})"

    def __str__(self) -> str:
        from .parse import format_bipoly

        return format_bipoly(self)

    def w_coeffs(self) -> list[UniPoly]:
        """[p_0(z), ..., p_n(z)] with P = sum_j p_j(z) w^j."""
        n = self.n
        rows = [[] for _ in range(n + 1)]
        for (i, j), c in self.terms.items():
            row = rows[j]
            if len(row) <= i:
                row.extend([0] * (i + 1 - len(row)))
            row[i] = c
        return [UniPoly(r) for r in rows]

    def z_coeffs(self) -> list[UniPoly]:
        """[q_0(w), ..., q_m(w)] with P = sum_i q_i(w) z^i."""
        m = self.m
        rows = [[] for _ in range(m + 1)]
        for (i, j), c in self.terms.items():
            row = rows[i]
            if len(row) <= j:
                row.extend([0] * (j + 1 - len(row)))
            row[j] = c
        return [UniPoly(r) for r in rows]

    # -- ring operations ------------------------------------------------------
    def __add__(self, other) -> "BiPoly":
        other = _as_bi(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return BiPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "BiPoly":
        return self + (-_as_bi(other))

    def __rsub__(self, other) -> "BiPoly":
        return _as_bi(other) - self

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            return BiPoly({k: c * other for k, c in self.terms.items()})
        terms: dict = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                terms[key] = terms.get(key, 0) + a * b
        return BiPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BiPoly":
        result, base = BiPoly.constant(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def map(self, f) -> "BiPoly":
        return BiPoly({k: f(c) for k, c in self.terms.items()})

    # -- derived polynomials --------------------------------------------------
    def derivative_w(self) -> "BiPoly":
        return BiPoly({(i, j - 1): j * c for (i, j), c in self.terms.items() if j > 0})

    def derivative_z(self) -> "BiPoly":
        return BiPoly({(i - 1, j): i * c for (i, j), c in self.terms.items() if i > 0})

    def at_z0(self) -> UniPoly:
        """P(0, w) as a polynomial in w."""
        cs = [0] * (self.n + 1)
        for (i, j), c in self.terms.items():
            if i == 0:
                cs[j] = c
        return UniPoly(cs)

    def z_order(self) -> int:
        """Largest N with z^N | P."""
        if not self.terms:
            raise DomainError("z-order of the zero polynomial")
        return min(i for i, _ in self.terms)

    def strip_z(self) -> "BiPoly":
        N = self.z_order()
        return BiPoly({(i - N, j): c for (i, j), c in self.terms.items()})

    def translate_w(self, alpha) -> "BiPoly":
        """P(z, w + alpha)."""
        terms: dict = {}
        for (i, j), c in self.terms.items():
            apow = 1
            for l in range(j, -1, -1):
                # coefficient of w^l in (w + alpha)^j is C(j, l) alpha^(j-l)
                key = (i, l)
                terms[key] = terms.get(key, 0) + c * comb(j, l) * apow
                apow = apow * alpha
        return BiPoly(terms)

    def evaluate(self, z, w):
        acc = 0
        for (i, j), c in self.terms.items():
            acc = acc + c * (z**i) * (w**j)
        return acc

    def substitute_z(self, z0) -> UniPoly:
        """P(z0, w) as a polynomial in w."""
        cs = [0] * (self.n + 1)
        for (i, j), c in self.terms.items():
            cs[j] = cs[j] + c * z0**i
        return UniPoly(cs)


def _as_bi(x) -> BiPoly:
    return x if isinstance(x, BiPoly) else BiPoly.constant(x)


# ---------------------------------------------------------------------------
# resultants and discriminants

def _bareiss_det(M: list[list[UniPoly]]) -> UniPoly:
    """Fraction-free determinant over Q[z]."""
    N = len(M)
    if N == 0:
        return UniPoly([1])
    M = [row[:] for row in M]
    sign = 1
    prev = UniPoly([1])
    for k in range(N - 1):
        if M[k][k].is_zero():
            for r in range(k + 1, N):
                if not M[r][k].is_zero():
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return UniPoly()
        pivot = M[k][k]
        for i in range(k + 1, N):
            for j in range(k + 1, N):
                num = M[i][j] * pivot - M[i][k] * M[k][j]
                M[i][j] = num.exact_div(prev)
            M[i][k] = UniPoly()
        prev = pivot
    det = M[N - 1][N - 1]
    return -det if sign < 0 else det


def sylvester_matrix(P: BiPoly, Q: BiPoly) -> list[list[UniPoly]]:
    """Sylvester matrix in w, entries in Q[z] (highest w-degree first)."""
    a = list(reversed(P.w_coeffs()))
    b = list(reversed(Q.w_coeffs()))
    n, k = len(a) - 1, len(b) - 1
    size = n + k
    zero = UniPoly()
    rows = []
    for r in range(k):
        rows.append([zero] * r + a + [zero] * (size - r - len(a)))
    for r in range(n):
        rows.append([zero] * r + b + [zero] * (size - r - len(b)))
    return rows


def resultant_w(P: BiPoly, Q: BiPoly) -> UniPoly:
    """Res_w(P, Q) in Q[z] via Bareiss elimination of the Sylvester matrix."""
    if P.is_zero() or Q.is_zero():
        raise DomainError("resultant with the zero polynomial")
    return _bareiss_det(sylvester_matrix(P, Q))


def discriminant_w(P: BiPoly) -> UniPoly:
    """D(z) = (-1)^(n(n-1)/2) Res_w(P, P'_w) / p_n(z)."""
    n = P.n
    if n < 1:
        raise DomainError("discriminant needs deg_w P >= 1")
    R = resultant_w(P, P.derivative_w())
    pn = P.w_coeffs()[n]
    D = R.exact_div(pn)
    return -D if (n * (n - 1) // 2) % 2 else D


def lowest_term(R: UniPoly) -> tuple[int, Fraction]:
    """(mu, gamma) with R = gamma z^mu + higher powers."""
    if R.is_zero():
        raise DomainError("lowest term of the zero polynomial")
    mu = R.order()
    return mu, R.coeffs[mu]


def resultant_of(P: BiPoly) -> UniPoly:
    """R_P(z) = Res_w(P, P'_w)."""
    return resultant_w(P, P.derivative_w())


def is_w_separable(P: BiPoly) -> bool:
    if P.n < 1:
        return True
    return not resultant_of(P).is_zero()


# ---------------------------------------------------------------------------
# normalization

@dataclass(frozen=True)
class NormalizationRecord:
    """P_k(z, w) = scaling * z^N * P(z, z^k w)."""

    z_power_stripped: int
    k: int
    scaling: Fraction

    def apply(self, P: BiPoly) -> BiPoly:
        N, k = self.z_power_stripped, self.k
        return BiPoly({(i + k * j + N, j): c * self.scaling for (i, j), c in P.terms.items()})

    def as_dict(self) -> dict:
        return {"N": self.z_power_stripped, "k": self.k, "scaling": str(self.scaling)}


def k_normalize(P: BiPoly, k: int) -> tuple[BiPoly, NormalizationRecord]:
    """Moderately normalized P_k = z^N P(z, z^k w) with P_k(0, w) monic."""
    if P.is_zero():
        raise DomainError("cannot normalize the zero polynomial")
    N = -min(i + k * j for (i, j) in P.terms)
    raw = NormalizationRecord(N, k, Fraction(1)).apply(P)
    lead = raw.at_z0().lc
    rec = NormalizationRecord(N, k, 1 / as_fraction(lead))
    return rec.apply(P), rec


# ---------------------------------------------------------------------------
# square-free part via the subresultant PRS over Q[z]

def _content(cs: Sequence[UniPoly]) -> UniPoly:
    g = UniPoly()
    for c in cs:
        g = g.gcd(c) if not g.is_zero() else (c.monic() if not c.is_zero() else g)
    return g


def _trim(cs: list[UniPoly]) -> list[UniPoly]:
    cs = list(cs)
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _prem(A: list[UniPoly], B: list[UniPoly]) -> list[UniPoly]:
    """Pseudo-remainder lc(B)^(deg A - deg B + 1) A mod B over Q[z]."""
    R = list(A)
    dB = len(B) - 1
    lcB = B[-1]
    e = len(A) - len(B) + 1
    while len(R) - 1 >= dB and R:
        dR = len(R) - 1
        lcR = R[-1]
        shift = dR - dB
        R = [c * lcB for c in R]
        for i, b in enumerate(B):
            R[i + shift] = R[i + shift] - lcR * b
        R = _trim(R)
        e -= 1
    if e > 0:
        f = lcB**e
        R = [c * f for c in R]
    return R


def subresultant_gcd_w(P: BiPoly, Q: BiPoly) -> BiPoly:
    """gcd over Q(z)[w], primitive in Q[z][w] (sub-resultant algorithm)."""
    A, B = _trim(P.w_coeffs()), _trim(Q.w_coeffs())
    if len(B) > len(A):
        A, B = B, A
    if not B:
        return BiPoly.from_w_coeffs(A)
    a, b = _content(A), _content(B)
    d = a.gcd(b)
    A = [c.exact_div(a) for c in A]
    B = [c.exact_div(b) for c in B]
    g = h = UniPoly([1])
    while True:
        delta = len(A) - len(B)
        R = _prem(A, B)
        if not R:
            break
        if len(R) == 1:
            B = [UniPoly([1])]
            break
        A = B
        denom = g * h**delta
        B = [c.exact_div(denom) for c in R]
        g = A[-1]
        if delta == 0:
            h = h
        else:
            h = (g**delta).exact_div(h ** (delta - 1))
    cB = _content(B)
    B = [c.exact_div(cB) * d for c in B]
    return BiPoly.from_w_coeffs(B)


def divide_w_exact(P: BiPoly, G: BiPoly) -> BiPoly:
    """P / G in Q[z][w]; raises InvariantError if G does not divide P."""
    A = _trim(P.w_coeffs())
    B = _trim(G.w_coeffs())
    if not B:
        raise ZeroDivisionError("division by zero polynomial")
    dB = len(B) - 1
    quo = [UniPoly()] * max(len(A) - dB, 1)
    A = list(A)
    while len(A) - 1 >= dB and A:
        shift = len(A) - 1 - dB
        c = A[-1].exact_div(B[-1])
        quo[shift] = c
        for i, b in enumerate(B):
            A[i + shift] = A[i + shift] - c * b
        A = _trim(A)
    if A:
        raise InvariantError("inexact division in Q[z][w]")
    return BiPoly.from_w_coeffs(quo)


def canonical_integer(P: BiPoly) -> BiPoly:
    """Coprime integer coefficients, positive leading monomial (graded lex)."""
    monos = P.monomials()
    ints = integer_coprime_form([P.terms[k] for k in monos])
    if ints[0] < 0:
        ints = [-x for x in ints]
    return BiPoly(dict(zip(monos, ints)))


def squarefree_part_w(P: BiPoly) -> BiPoly:
    """Remove repeated factors of positive w-degree."""
    if P.n < 1:
        raise DomainError("square-free part needs deg_w P >= 1")
    G = subresultant_gcd_w(P, P.derivative_w())
    if G.n < 1:
        return canonical_integer(P)
    return canonical_integer(divide_w_exact(P, G))


def yun_squarefree(p: UniPoly) -> list[tuple[UniPoly, int]]:
    """Square-free decomposition over a field of characteristic 0."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = p.gcd(dp)
    b = p.exact_div(a)
    c = dp.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = b.gcd(d)
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        if a.degree > 0:
            out.append((a.monic(), i))
        i += 1
    return out
