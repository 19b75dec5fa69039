"""Exact rationals, places of Q, p-adic valuations and a log-scale real type.

Rationals are :class:`fractions.Fraction`.  Every height-type quantity is a
:class:`LogReal`: a high precision value together with an explicit bound on
its absolute error, so that inequalities can be decided as
``lhs <= rhs + combined tolerance``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Union

import mpmath
from mpmath import mpf

from .errors import DomainError

Rational = Fraction
RationalLike = Union[int, Fraction]

DEFAULT_PRECISION = 128
DEFAULT_PRIME_BOUND = 10**6

mpmath.mp.prec = max(mpmath.mp.prec, DEFAULT_PRECISION)


def set_precision(bits: int) -> None:
    """Set the working precision (mantissa bits) for all numerics."""
    if bits < 64:
        raise DomainError("precision must be at least 64 bits")
    mpmath.mp.prec = bits


def working_precision() -> int:
    return mpmath.mp.prec


def prime_bound() -> int:
    """Upper limit for sieving; overridable with EISENKIT_PRIME_BOUND."""
    raw = os.environ.get("EISENKIT_PRIME_BOUND")
    if raw:
        try:
            return max(int(raw), 100)
        except ValueError:
            pass
    return DEFAULT_PRIME_BOUND


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def mpf_to_fraction(x) -> Fraction:
    """The exact binary value of an mpf."""
    x = mpf(x)
    sign, man, exp, _ = x._mpf_
    if not man:
        if exp:
            raise DomainError("cannot convert a non-finite mpf")
        return Fraction(0)
    man = -int(man) if sign else int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


# ---------------------------------------------------------------------------
# primes

def _sieve_segment(lo: int, hi: int, base: list[int]) -> Iterator[int]:
    flags = bytearray([1]) * (hi - lo)
    for p in base:
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        flags[start - lo :: p] = bytes(len(range(start, hi, p)))
    for i, f in enumerate(flags):
        n = lo + i
        if f and n >= 2:
            yield n


@lru_cache(maxsize=8)
def _small_primes(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return tuple(i for i, f in enumerate(flags) if f)


def primes_up_to(n: int, segment: int = 1 << 16) -> list[int]:
    """All primes <= n by a segmented sieve of Eratosthenes."""
    if n < 2:
        return []
    base = _small_primes(math.isqrt(n) + 1)
    out: list[int] = []
    lo = 2
    while lo <= n:
        hi = min(lo + segment, n + 1)
        out.extend(_sieve_segment(lo, hi, list(base)))
        lo = hi
    return out


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24 (covers 2^64)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    # deterministic retry schedule: c = 1, 2, 3, ...
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        x = ys = 2
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed to split {n}")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a nonzero integer (sign ignored)."""
    n = abs(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    out: dict[int, int] = {}
    for p in _small_primes(1000):
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m)
        stack += [d, m // d]
    return dict(sorted(out.items()))


def prime_divisors(*numbers: int) -> set[int]:
    out: set[int] = set()
    for x in numbers:
        if x not in (0, 1, -1):
            out.update(factorize(x))
    return out


# ---------------------------------------------------------------------------
# places and valuations

@dataclass(frozen=True, order=False)
class Place:
    """A place of Q: ``Place(None)`` is the archimedean one, ``Place(p)`` the p-adic one."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    @property
    def is_infinite(self) -> bool:
        return self.p is None

    def sort_key(self):
        return (0, 0) if self.p is None else (1, self.p)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)

    @classmethod
    def parse(cls, text: str) -> "Place":
        text = text.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return INFINITE
        return cls(int(text))


INFINITE = Place(None)


def rat_valuation(q: RationalLike, p: int) -> int:
    """v_p(q), so that |q|_p = p^(-v_p(q))."""
    q = as_fraction(q)
    if q == 0:
        raise DomainError("valuation of zero is undefined")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def int_valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of zero is undefined")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def abs_exact(q: RationalLike, v: Place) -> Fraction:
    """|q|_v as an exact rational."""
    q = as_fraction(q)
    if v.is_infinite:
        return abs(q)
    if q == 0:
        return Fraction(0)
    e = rat_valuation(q, v.p)
    return Fraction(1, v.p**e) if e >= 0 else Fraction(v.p ** (-e))


# ---------------------------------------------------------------------------
# LogReal

def _ulp(x) -> mpf:
    prec = mpmath.mp.prec
    return (abs(x) + 1) * mpf(2) ** (2 - prec)


@lru_cache(maxsize=4096)
def _log_int(n: int, prec: int) -> mpf:
    return mpmath.log(n)


def _log_of_int(n: int) -> mpf:
    return _log_int(n, mpmath.mp.prec)


class LogReal:
    """A real number on log scale with an absolute error bound.

    ``LogReal.NEG_INF`` is the sentinel for ``log 0``; it is a distinct
    state, never a floating infinity.
    """

    __slots__ = ("value", "tol")

    def __init__(self, value, tol=0):
        self.value = None if value is None else mpf(value)
        self.tol = mpf(tol)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "LogReal":
        return cls(0, 0)

    @classmethod
    def log(cls, q: RationalLike) -> "LogReal":
        """log |q| for a rational q (NEG_INF for q = 0)."""
        q = abs(as_fraction(q))
        if q == 0:
            return NEG_INF
        if q == 1:
            return cls.zero()
        a, b = _log_of_int(q.numerator), _log_of_int(q.denominator)
        return cls(a - b, _ulp(a) + _ulp(b))

    @classmethod
    def log_prime_power(cls, p: int, exponent: RationalLike) -> "LogReal":
        """exponent * log p."""
        exponent = as_fraction(exponent)
        if exponent == 0:
            return cls.zero()
        lp = _log_of_int(p)
        val = lp * exponent.numerator / exponent.denominator
        return cls(val, _ulp(val) * (abs(exponent) + 1))

    @classmethod
    def from_mpf(cls, x, tol=None) -> "LogReal":
        x = mpf(x)
        return cls(x, _ulp(x) if tol is None else tol)

    # -- predicates ---------------------------------------------------------
    @property
    def is_neg_inf(self) -> bool:
        return self.value is None

    def __repr__(self) -> str:
        if self.is_neg_inf:
            return "LogReal(-inf)"
        return f"LogReal({mpmath.nstr(self.value, 20)} ± {mpmath.nstr(self.tol, 3)})"

    def __float__(self) -> float:
        return float("-inf") if self.is_neg_inf else float(self.value)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "LogReal":
        other = _coerce(other)
        if self.is_neg_inf or other.is_neg_inf:
            return NEG_INF
        val = self.value + other.value
        return LogReal(val, self.tol + other.tol + _ulp(val))

    __radd__ = __add__

    def __neg__(self) -> "LogReal":
        if self.is_neg_inf:
            raise DomainError("cannot negate log 0")
        return LogReal(-self.value, self.tol)

    def __sub__(self, other) -> "LogReal":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "LogReal":
        return _coerce(other) - self

    def scale(self, c: RationalLike) -> "LogReal":
        """c * self for a rational c >= 0 (log of a power)."""
        c = as_fraction(c)
        if self.is_neg_inf:
            if c < 0:
                raise DomainError("negative power of 0")
            return LogReal.zero() if c == 0 else NEG_INF
        val = self.value * c.numerator / c.denominator
        return LogReal(val, self.tol * abs(c) + _ulp(val))

    def __mul__(self, c) -> "LogReal":
        return self.scale(c)

    __rmul__ = __mul__

    # -- comparisons ----------------------------------------------------------
    def le(self, other) -> bool:
        """self <= other up to the combined tolerance."""
        other = _coerce(other)
        if self.is_neg_inf:
            return True
        if other.is_neg_inf:
            return False
        return self.value <= other.value + self.tol + other.tol

    def ge(self, other) -> bool:
        return _coerce(other).le(self)

    def close_to(self, other, atol=0) -> bool:
        other = _coerce(other)
        if self.is_neg_inf or other.is_neg_inf:
            return self.is_neg_inf and other.is_neg_inf
        return abs(self.value - other.value) <= self.tol + other.tol + mpf(atol)


NEG_INF = LogReal(None, 0)


def _coerce(x) -> LogReal:
    if isinstance(x, LogReal):
        return x
    if isinstance(x, (int, Fraction)):
        return LogReal(mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else x, 0)
    if isinstance(x, (float, mpf)):
        return LogReal.from_mpf(x)
    raise TypeError(f"cannot use {type(x).__name__} as LogReal")


def lr_max(*xs: LogReal) -> LogReal:
    finite = [x for x in xs if not x.is_neg_inf]
    if not finite:
        return NEG_INF
    best = max(finite, key=lambda x: x.value)
    return LogReal(best.value, max(x.tol for x in finite))


def lr_sum(xs: Iterable[LogReal]) -> LogReal:
    total = LogReal.zero()
    for x in xs:
        total = total + x
    return total


def log_plus(x: LogReal) -> LogReal:
    """log+ = max(log, 0)."""
    return lr_max(x, LogReal.zero())


def abs_at_place(q: RationalLike, v: Place) -> LogReal:
    """log |q|_v; exact up to the rounding of log p."""
    q = as_fraction(q)
    if q == 0:
        return NEG_INF
    if v.is_infinite:
        return LogReal.log(q)
    return LogReal.log_prime_power(v.p, -rat_valuation(q, v.p))


@dataclass(frozen=True)
class ProductFormulaResult:
    holds: bool
    exact_product: Fraction
    residual: LogReal


def product_formula_residual(q: RationalLike, prime_support: Iterable[int]) -> ProductFormulaResult:
    """Evaluate prod_v |q|_v over support and the archimedean place.

    The exact product equals 1 iff the support contains every prime dividing q;
    the log residual is the same quantity summed numerically.
    """
    q = as_fraction(q)
    if q == 0:
        raise DomainError("product formula needs q != 0")
    support = sorted(set(prime_support))
    prod = abs(q)
    residual = abs_at_place(q, INFINITE)
    for p in support:
        prod *= abs_exact(q, Place(p))
        residual = residual + abs_at_place(q, Place(p))
    return ProductFormulaResult(prod == 1, prod, residual)


def product_formula_check(q: RationalLike, prime_support: Iterable[int]) -> bool:
    return product_formula_residual(q, prime_support).holds


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out
