"""Arithmetic in a declared number field Q(theta) and algebraic-number data.

A field is given by a monic integer modulus g.  Irreducibility is certified
by a prime p for which g mod p is irreducible (Rabin's test); without such a
witness the field is *unverified* and every inversion checks for zero
divisors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mpc, mpf

from .arith import (
    INFINITE,
    LogReal,
    Place,
    as_fraction,
    factorize,
    is_prime,
    lr_max,
    mpf_to_fraction,
    rat_valuation,
    working_precision,
)
from .errors import DomainError, FieldError, RootFindingError
from .poly import BiPoly, UniPoly, discriminant_w, primitive_integer
from .roots import approximate_roots, complex_roots

WITNESS_PRIMES = 50


# ---------------------------------------------------------------------------
# polynomials over F_p (lists of ints, low -> high)

def _trim_p(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _mulmod(a, b, g, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _reduce_p(out, g, p)


def _reduce_p(a, g, p):
    a = _trim_p([x % p for x in a])
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(a) - 1 >= dg:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dg
        for i, y in enumerate(g):
            a[i + shift] = (a[i + shift] - c * y) % p
        a = _trim_p(a)
    return a


def _powmod(base, e, g, p):
    result = [1]
    while e:
        if e & 1:
            result = _mulmod(result, base, g, p)
        base = _mulmod(base, base, g, p)
        e >>= 1
    return result


def _gcd_p(a, b, p):
    a, b = _trim_p(list(a)), _trim_p(list(b))
    while b:
        a, b = b, _reduce_p(a, b, p)
    return a


def irreducible_mod_p(g: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for g over F_p (g's degree must not drop mod p)."""
    g = [x % p for x in g]
    if g[-1] == 0:
        return False
    d = len(g) - 1
    if d == 1:
        return True
    x = [0, 1]
    if _reduce_p(_sub_p(_powmod(x, p**d, g, p), x, p), g, p):
        return False
    for r in factorize(d):
        h = _sub_p(_powmod(x, p ** (d // r), g, p), x, p)
        if len(_gcd_p(g, h, p)) > 1:
            return False
    return True


def _sub_p(a, b, p):
    n = max(len(a), len(b))
    return _trim_p([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _disc_of(g: UniPoly) -> Fraction:
    P = BiPoly({(0, j): c for j, c in enumerate(g.coeffs)})
    D = discriminant_w(P)
    return D[0]


def find_irreducibility_witness(g: UniPoly, count: int = WITNESS_PRIMES) -> int | None:
    """First prime among ``count`` good primes with g irreducible mod p."""
    if g.degree <= 1:
        return None
    ints = primitive_integer(g)
    disc = _disc_of(ints)
    lead = int(ints.lc)
    tried = 0
    p = 1
    while tried < count:
        p += 1
        if not is_prime(p):
            continue
        if disc.numerator % p == 0 or lead % p == 0:
            continue
        tried += 1
        if irreducible_mod_p([int(c) for c in ints.coeffs], p):
            return p
    return None


# ---------------------------------------------------------------------------
# fields and elements

class NumberField:
    """Q(theta) with theta a root of a monic integer polynomial."""

    def __init__(self, modulus: UniPoly, name: str = "theta"):
        if modulus.degree < 1:
            raise DomainError("field modulus must have degree >= 1")
        if modulus.lc != 1 or any(as_fraction(c).denominator != 1 for c in modulus.coeffs):
            raise DomainError("field modulus must be a monic integer polynomial")
        if modulus.gcd(modulus.derivative()).degree > 0:
            raise DomainError("field modulus must be square-free")
        self.modulus = modulus
        self.name = name
        self.degree = modulus.degree
        self.witness = find_irreducibility_witness(modulus)
        # degree 1 needs no witness
        self.verified = self.degree == 1 or self.witness is not None
        d = self.degree
        # theta^k for k = d .. 2d-2 in the power basis
        self._reduction: list[tuple[Fraction, ...]] = []
        cur = [Fraction(0)] * d
        low = [-as_fraction(c) for c in modulus.coeffs[:d]]
        cur = list(low)
        for _ in range(max(d - 1, 0)):
            self._reduction.append(tuple(cur))
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [cur[i] + top * low[i] for i in range(d)]
        self._embedding_cache: dict[int, list] = {}

    @classmethod
    def rationals(cls) -> "NumberField":
        return _RATIONALS

    @classmethod
    def from_text(cls, text: str) -> "NumberField":
        from .parse import parse_unipoly

        return cls(parse_unipoly(text, "x"))

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash(self.modulus)

    def __repr__(self) -> str:
        from .parse import format_unipoly

        return f"NumberField({format_unipoly(self.modulus)})"

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def __call__(self, x) -> "AlgNum":
        if isinstance(x, AlgNum):
            if x.field is not self and x.field != self:
                raise FieldError("element of a different field")
            return x
        if isinstance(x, (int, Fraction)):
            return AlgNum(self, (Fraction(x),) + (Fraction(0),) * (self.degree - 1))
        return AlgNum(self, tuple(Fraction(c) for c in x))

    @property
    def theta(self) -> "AlgNum":
        if self.degree == 1:
            return self(-self.modulus[0])
        return AlgNum(self, tuple(Fraction(int(i == 1)) for i in range(self.degree)))

    def zero(self) -> "AlgNum":
        return self(0)

    def one(self) -> "AlgNum":
        return self(1)

    def embeddings(self, bits: int | None = None) -> list[mpc]:
        """Approximations of the d complex roots of the modulus at ``bits`` precision."""
        bits = bits or working_precision()
        if bits not in self._embedding_cache:
            with mpmath.workprec(bits):
                roots = complex_roots(self.modulus, tolerance=mpf(2) ** (-(bits // 2)))
            self._embedding_cache[bits] = roots
        return [r.value for r in self._embedding_cache[bits]]

    def certified_embeddings(self):
        self.embeddings()
        return self._embedding_cache[working_precision()]

    def _mul_coords(self, a, b):
        d = self.degree
        if d == 1:
            return (a[0] * b[0],)
        prod = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = prod[:d]
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                red = self._reduction[k - d]
                for i in range(d):
                    out[i] += c * red[i]
        return tuple(out)


_RATIONALS = NumberField(UniPoly([0, 1]), name="q")


class AlgNum:
    """An element of a NumberField in power-basis coordinates."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: tuple):
        if len(coords) != field.degree:
            raise DomainError("coordinate vector has the wrong length")
        self.field = field
        self.coords = coords

    def _lift(self, other) -> "AlgNum | None":
        if isinstance(other, AlgNum):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return AlgNum(self.field, tuple(x + y for x, y in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return AlgNum(self.field, tuple(-x for x in self.coords))

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return AlgNum(self.field, tuple(x - y for x, y in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgNum(self.field, tuple(x * other for x in self.coords))
        if not isinstance(other, AlgNum):
            return NotImplemented
        return AlgNum(self.field, self.field._mul_coords(self.coords, other.coords))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "AlgNum":
        if self.field.degree == 1:
            if self.coords[0] == 0:
                raise ZeroDivisionError("inverse of zero")
            return AlgNum(self.field, (1 / self.coords[0],))
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid of a(x) against the modulus
        g = self.field.modulus
        r0, r1 = g, self.to_poly()
        s0, s1 = UniPoly(), UniPoly([1])
        while r1.degree > 0:
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        if r1.is_zero():
            raise FieldError(
                "zero divisor detected: the declared modulus is reducible"
            )
        inv = s1 * (1 / r1.coeffs[0])
        inv = inv % g
        return self.field([inv[i] for i in range(self.field.degree)])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgNum(self.field, tuple(x / other for x in self.coords))
        if not isinstance(other, AlgNum):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, AlgNum):
            return self.coords == other.coords and self.field == other.field
        if isinstance(other, (int, Fraction)):
            return self.coords[0] == other and not any(self.coords[1:])
        return NotImplemented

    def __hash__(self) -> int:
        if not any(self.coords[1:]):
            return hash(self.coords[0])
        return hash(self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def as_rational(self) -> Fraction | None:
        return None if any(self.coords[1:]) else self.coords[0]

    def to_poly(self) -> UniPoly:
        return UniPoly(self.coords)

    def embed(self, theta) -> mpc:
        acc = mpc(0)
        for c in reversed(self.coords):
            acc = acc * theta + mpf(c.numerator) / c.denominator
        return acc

    def conjugates(self) -> list[mpc]:
        return [self.embed(t) for t in self.field.embeddings()]

    def __repr__(self) -> str:
        q = self.as_rational()
        if q is not None:
            return str(q)
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            mono = "" if i == 0 else (self.field.name if i == 1 else f"{self.field.name}^{i}")
            if i == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")

    __str__ = __repr__


# ---------------------------------------------------------------------------
# minimal and characteristic polynomials

def _solve_dependency(vectors: list[tuple[Fraction, ...]]):
    """Express the last vector in terms of the previous ones, or None."""
    basis: list[tuple[list[Fraction], list[Fraction]]] = []  # (reduced row, combination)
    k = len(vectors)
    for idx, v in enumerate(vectors):
        row = list(v)
        comb = [Fraction(0)] * k
        comb[idx] = Fraction(1)
        for brow, bcomb in basis:
            piv = next(i for i, x in enumerate(brow) if x != 0)
            if row[piv] != 0:
                f = row[piv] / brow[piv]
                row = [a - f * b for a, b in zip(row, brow)]
                comb = [a - f * b for a, b in zip(comb, bcomb)]
        if all(x == 0 for x in row):
            return comb
        basis.append((row, comb))
    return None


def min_poly(alpha: AlgNum) -> UniPoly:
    """Monic minimal polynomial of alpha over Q."""
    F = alpha.field
    q = alpha.as_rational()
    if q is not None:
        return UniPoly([-q, 1])
    powers = [F.one().coords]
    cur = F.one()
    for _ in range(F.degree):
        cur = cur * alpha
        powers.append(cur.coords)
        comb = _solve_dependency(powers)
        if comb is not None:
            poly = UniPoly(comb).monic()
            if not F.verified and find_irreducibility_witness(poly) is None:
                raise FieldError(
                    "field modulus is not certified irreducible; minimal polynomial unavailable"
                )
            return poly
    raise FieldError("no linear dependency found among powers (inconsistent field data)")


def char_poly(alpha: AlgNum) -> UniPoly:
    """Characteristic polynomial of multiplication by alpha (Faddeev-LeVerrier)."""
    F = alpha.field
    d = F.degree
    cols = [(alpha * AlgNum(F, tuple(Fraction(int(i == j)) for i in range(d)))).coords for j in range(d)]
    A = [[cols[j][i] for j in range(d)] for i in range(d)]
    c = [Fraction(0)] * (d + 1)
    c[d] = Fraction(1)
    M = [[Fraction(0)] * d for _ in range(d)]
    for k in range(1, d + 1):
        # M_k = A M_{k-1} + c_{d-k+1} I
        AM = [[sum(A[i][t] * M[t][j] for t in range(d)) for j in range(d)] for i in range(d)]
        M = [[AM[i][j] + (c[d - k + 1] if i == j else 0) for j in range(d)] for i in range(d)]
        tr = sum(sum(A[i][t] * M[t][i] for t in range(d)) for i in range(d))
        c[d - k] = -tr / k
    return UniPoly(c)


# ---------------------------------------------------------------------------
# p-adic Newton polygons

@dataclass(frozen=True)
class NewtonPolygonNP:
    vertices: tuple[tuple[int, Fraction], ...]
    slopes: tuple[tuple[Fraction, int], ...]

    def root_valuations(self) -> list[tuple[Fraction, int]]:
        """(valuation, multiplicity) of the nonzero roots."""
        return [(-s, length) for s, length in self.slopes]

    @property
    def max_slope(self) -> Fraction:
        if not self.slopes:
            raise DomainError("polygon has no edges")
        return self.slopes[-1][0]


def lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    """Lower convex hull of points sorted by abscissa."""
    hull: list[tuple[int, Fraction]] = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon_padic(h: UniPoly, p: int) -> NewtonPolygonNP:
    """Lower hull of (i, v_p(c_i)); slopes increase left to right."""
    if h.is_zero():
        raise DomainError("Newton polygon of the zero polynomial")
    pts = [(i, Fraction(rat_valuation(as_fraction(c), p))) for i, c in enumerate(h.coeffs) if c != 0]
    hull = lower_hull(pts)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes.append((Fraction(y2 - y1) / (x2 - x1), x2 - x1))
    return NewtonPolygonNP(tuple(hull), tuple(slopes))


# ---------------------------------------------------------------------------
# absolute values extended to the algebraic closure

def padic_norm_exponent(alpha: AlgNum, p: int) -> Fraction:
    """max over extensions of log_p |alpha|_p (an exact rational)."""
    if alpha.is_zero():
        raise DomainError("p-adic norm exponent of zero")
    q = alpha.as_rational()
    if q is not None:
        return Fraction(-rat_valuation(q, p))
    cp = char_poly(alpha)
    return newton_polygon_padic(cp, p).max_slope


def _embedding_error(alpha: AlgNum, theta: mpc, radius: mpf) -> mpf:
    t = abs(theta)
    err = mpf(0)
    for i, c in enumerate(alpha.coords):
        if i and c:
            err += abs(mpf(c.numerator) / c.denominator) * ((t + radius) ** i - t**i)
    return err


def archimedean_norms(alpha: AlgNum) -> list[tuple[mpf, mpf]]:
    """(|sigma(alpha)|, error bound) for every embedding sigma."""
    F = alpha.field
    q = alpha.as_rational()
    if q is not None:
        v = abs(mpf(q.numerator) / q.denominator)
        return [(v, v * mpf(2) ** (2 - working_precision()))] * F.degree
    out = []
    for root in F.certified_embeddings():
        val = abs(alpha.embed(root.value))
        err = _embedding_error(alpha, root.value, root.radius) + (val + 1) * mpf(2) ** (
            4 - working_precision()
        )
        out.append((val, err))
    return out


def conjugate_norm_max(alpha: AlgNum, v: Place) -> LogReal:
    """log max |alpha|_w over all extensions w of v."""
    if alpha.is_zero():
        raise DomainError("conjugate norm of zero")
    if not v.is_infinite:
        return LogReal.log_prime_power(v.p, padic_norm_exponent(alpha, v.p))
    q = alpha.as_rational()
    if q is not None:
        return LogReal.log(q)
    vals = []
    for val, err in archimedean_norms(alpha):
        if val <= err:
            raise RootFindingError("embedding too imprecise to bound log |sigma(alpha)|")
        vals.append(LogReal(mpmath.log(val), err / (val - err)))
    return lr_max(*vals)


def _log_plus_root(z: mpc, r: mpf) -> LogReal:
    a = abs(z)
    lo = max(mpf(1), a - r)
    hi = max(mpf(1), a + r)
    val = mpmath.log(max(mpf(1), a))
    return LogReal(val, mpmath.log(hi) - mpmath.log(lo) + mpf(2) ** (4 - working_precision()))


def mahler_measure_log(poly: UniPoly) -> LogReal:
    """log M(P) = log |lead| + sum log+ |alpha_i| for a polynomial over Q."""
    total = LogReal.log(poly.lc)
    for root in complex_roots(poly):
        total = total + _log_plus_root(root.value, root.radius)
    return total


def height_algnum(alpha: AlgNum) -> LogReal:
    """Absolute logarithmic (affine) height via the Mahler measure of the minimal polynomial."""
    q = alpha.as_rational()
    if q is not None:
        return LogReal.log(max(abs(q.numerator), q.denominator))
    mp = primitive_integer(min_poly(alpha))
    return mahler_measure_log(mp).scale(Fraction(1, mp.degree))


# ---------------------------------------------------------------------------
# roots lying in the field

@dataclass
class RootsInField:
    roots: list[AlgNum]
    unresolved: list[mpc] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.unresolved


def _round_rational(x: mpf, bound: int) -> Fraction:
    return mpf_to_fraction(x).limit_denominator(bound)


def _field_poly(h: UniPoly, F: NumberField) -> UniPoly:
    return UniPoly([F(c) for c in h.coeffs])


def _is_root(h: UniPoly, beta: AlgNum) -> bool:
    return h(beta) == 0


def roots_in_field_report(h: UniPoly, F: NumberField) -> RootsInField:
    """All roots of h (coefficients in F) that lie in F, verified exactly."""
    if h.is_zero():
        raise DomainError("roots of the zero polynomial")
    h = _field_poly(h, F)
    found: list[AlgNum] = []
    if h.degree < 1:
        return RootsInField(found)
    if h.coeffs[0] == 0:
        found.append(F.zero())
        h = h.shift(-h.order())
    if h.degree >= 2:
        g = h.gcd(h.derivative())
        if g.degree > 0:
            h = h.exact_div(g)
    if h.degree < 1:
        return RootsInField(found)
    if h.degree == 1:
        found.append(-h.coeffs[0] / h.coeffs[1])
        return RootsInField(found)

    d = F.degree
    base = working_precision()
    unresolved: list[mpc] = []
    nonzero: list[AlgNum] = []
    for bits in (base, 2 * base, 4 * base):
        with mpmath.workprec(bits):
            thetas = F.embeddings(bits)
            per = [approximate_roots([c.embed(t) for c in h.coeffs], bits) for t in thetas]
            bound = 2 ** (bits // 3)
            tol = mpf(2) ** (-(bits // 4))
            cand: list[AlgNum] = []
            if d == 1:
                for r in per[0]:
                    if abs(r.imag) <= tol * (1 + abs(r)):
                        cand.append(F(_round_rational(r.real, bound)))
            else:
                V = mpmath.matrix([[t**i for i in range(d)] for t in thetas])
                for choice in itertools.product(*per):
                    try:
                        x = mpmath.lu_solve(V, mpmath.matrix(list(choice)))
                    except ZeroDivisionError:
                        continue
                    if any(abs(mpmath.im(x[i])) > tol * (1 + abs(x[i])) for i in range(d)):
                        continue
                    cand.append(F([_round_rational(mpmath.re(x[i]), bound) for i in range(d)]))
            for beta in cand:
                if beta not in nonzero and _is_root(h, beta):
                    nonzero.append(beta)
            if len(nonzero) == h.degree:
                break
    with mpmath.workprec(base):
        t0 = F.embeddings()[0]
        images = [b.embed(t0) for b in nonzero]
        for r in approximate_roots([c.embed(t0) for c in h.coeffs]):
            if not any(abs(r - im) <= mpf(2) ** (-(base // 4)) * (1 + abs(r)) for im in images):
                unresolved.append(r)
    return RootsInField(found + nonzero, unresolved)


def roots_in_field(h: UniPoly, F: NumberField) -> list[AlgNum]:
    return roots_in_field_report(h, F).roots
