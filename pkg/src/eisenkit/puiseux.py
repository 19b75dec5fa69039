"""Power and Puiseux series solutions of P(z, w) = 0.

A branch is stored in the variable T = z^(1/e): ``coeffs[i]`` is the
coefficient of T^(kappa + i), for indices kappa .. K.  Branch enumeration is
the classical Newton-Puiseux algorithm with explicit ramification, followed
by Newton (Hensel) lifting once the remaining root is simple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .arith import LogReal, NEG_INF, as_fraction, lcm, rat_valuation
from .errors import DomainError, InvariantError, PreconditionError
from .numberfield import AlgNum, NumberField, lower_hull, roots_in_field, roots_in_field_report
from .poly import BiPoly, UniPoly, is_w_separable, resultant_of


# ---------------------------------------------------------------------------
# truncated series arithmetic (lists of field elements, low -> high)

def _is_rational_list(*seqs) -> bool:
    return all(type(c) is Fraction for s in seqs for c in s)


def _int_form(a: Sequence[Fraction]) -> tuple[list[int], int]:
    den = lcm(*(c.denominator for c in a)) if a else 1
    return [c.numerator * (den // c.denominator) for c in a], den


def _kron_mul(A: list[int], B: list[int], N: int) -> list[int]:
    """Integer polynomial product by Kronecker substitution, truncated to N terms."""
    A, B = A[:N], B[:N]
    if not A or not B:
        return []
    bound = max(map(abs, A)) * max(map(abs, B)) * min(len(A), len(B))
    if bound == 0:
        return [0] * min(len(A) + len(B) - 1, N)
    bits = bound.bit_length() + 2
    X = 0
    for c in reversed(A):
        X = (X << bits) + c
    Y = 0
    for c in reversed(B):
        Y = (Y << bits) + c
    Z = X * Y
    size = min(len(A) + len(B) - 1, N)
    out = []
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    for _ in range(size):
        low = Z & mask
        if low >= half:
            low -= 1 << bits
        out.append(low)
        Z = (Z - low) >> bits
    return out


def smul(a: list, b: list, N: int) -> list:
    """Product of two series truncated to N terms."""
    if not a or not b or N <= 0:
        return []
    if _is_rational_list(a, b):
        A, da = _int_form(a)
        B, db = _int_form(b)
        den = da * db
        return [Fraction(x, den) for x in _kron_mul(A, B, N)]
    size = min(len(a) + len(b) - 1, N)
    out = [None] * size
    for k in range(size):
        acc = None
        for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
            term = a[i] * b[k - i]
            acc = term if acc is None else acc + term
        out[k] = acc
    return out


def sadd(a: list, b: list) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return out


def ssub(a: list, b: list) -> list:
    return sadd(a, [-c for c in b])


def sinv(a: list, N: int) -> list:
    """Inverse of a series with a[0] != 0, to N terms (Newton iteration)."""
    if not a or a[0] == 0:
        raise DomainError("series is not invertible")
    b = [1 / a[0]]
    L = 1
    while L < N:
        L = min(2 * L, N)
        ab = smul(a, b, L)
        # b <- b + b (1 - a b)
        err = [-c for c in ab]
        err[0] = err[0] + 1
        b = sadd(b, smul(b, err, L))[:L]
    return b[:N]


# ---------------------------------------------------------------------------
# result types

@dataclass(frozen=True)
class Unresolved:
    """A quantity that truncation K cannot decide; re-expand deeper."""

    K: int
    reason: str = ""

    def __str__(self) -> str:
        return f"unresolved(K={self.K})"


@dataclass
class PuiseuxSeries:
    field: NumberField
    e: int
    kappa: int
    coeffs: list
    K: int
    exact: bool = False
    kappa_minimal: bool = True
    multiplicity: int = 1
    source: BiPoly | None = None

    def __post_init__(self):
        if self.e < 1:
            raise DomainError("ramification index must be positive")
        if self.kappa_minimal and self.coeffs and self.coeffs[0] == 0:
            raise InvariantError("kappa declared minimal but a_kappa = 0")

    def coefficient(self, k: int):
        i = k - self.kappa
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        if k > self.K and not self.exact:
            raise DomainError(f"coefficient {k} lies beyond the truncation K={self.K}")
        return self.field.zero()

    def items(self):
        """(k, a_k) for the stored indices."""
        return [(self.kappa + i, c) for i, c in enumerate(self.coeffs)]

    @property
    def is_zero(self) -> bool:
        return self.exact and all(c == 0 for c in self.coeffs)

    def rational_coeffs(self) -> list[Fraction] | None:
        out = []
        for c in self.coeffs:
            q = c.as_rational() if isinstance(c, AlgNum) else as_fraction(c)
            if q is None:
                return None
            out.append(q)
        return out

    def _raw(self) -> list:
        """Coefficients as Fractions when all rational, else AlgNums."""
        rc = self.rational_coeffs()
        return rc if rc is not None else [self.field(c) for c in self.coeffs]

    def leading_exponent(self) -> Fraction:
        return Fraction(self.kappa, self.e)

    def describe(self, count: int = 6) -> str:
        terms = []
        for k, c in self.items()[:count]:
            if c == 0:
                continue
            ex = Fraction(k, self.e)
            terms.append(f"({c})*z^({ex})" if ex != 0 else f"({c})")
        tail = "" if self.exact else " + ..."
        return (" + ".join(terms) or "0") + tail


@dataclass
class UnrealizedBranch:
    """Branches whose characteristic roots are not in the declared field."""

    char_poly: UniPoly
    e_lower: int
    leading_exponent: Fraction
    count: int
    prefix: dict = field(default_factory=dict)


@dataclass
class BranchSet:
    branches: list[PuiseuxSeries]
    unrealized: list[UnrealizedBranch]
    n: int

    @property
    def completeness_flag(self) -> bool:
        return not self.unrealized

    @property
    def realized_count(self) -> int:
        return sum(b.multiplicity for b in self.branches)

    @property
    def max_e(self) -> int:
        es = [b.e for b in self.branches] + [u.e_lower for u in self.unrealized]
        return max(es) if es else 1


# ---------------------------------------------------------------------------
# polynomial helpers over a field (dict {(t_exp, w_exp): element})

def _poly_dict(P: BiPoly, conv) -> dict:
    return {k: conv(c) for k, c in P.terms.items()}


def _w_columns(Q: dict, N: int, zero) -> list[list]:
    """Q as a list over w-degree of dense t-series truncated to N terms."""
    n = max(j for _, j in Q)
    cols = [[zero] * N for _ in range(n + 1)]
    for (i, j), c in Q.items():
        if i < N:
            cols[j][i] = cols[j][i] + c
    return cols


def _eval_w(cols: list[list], g: list, N: int) -> list:
    acc = list(cols[-1][:N])
    for j in range(len(cols) - 2, -1, -1):
        acc = sadd(smul(acc, g, N), cols[j][:N])[:N]
    return acc


def _derivative_cols(cols: list[list]) -> list[list]:
    return [[c * j for c in cols[j]] for j in range(1, len(cols))] or [[]]


def hensel_lift(Q: dict, N: int, zero) -> list:
    """Series g with g(0) = 0 and Q(T, g) = 0 mod T^N, given Q(0,0) = 0 != Q_w(0,0)."""
    if N <= 1:
        return [zero] * max(N, 0)
    cols = _w_columns(Q, N, zero)
    dcols = _derivative_cols(cols)
    g = [zero]
    L = 1
    while L < N:
        L = min(2 * L, N)
        gl = g + [zero] * (L - len(g))
        val = _eval_w([c[:L] for c in cols], gl, L)
        der = _eval_w([c[:L] for c in dcols], gl, L)
        corr = smul(val, sinv(der, L), L)
        g = ssub(gl, corr)[:L]
        g = g + [zero] * (L - len(g))
    return g[:N]


def _strip_w(Q: dict) -> dict:
    """Q / w for Q divisible by w."""
    if any(j == 0 for _, j in Q):
        raise InvariantError("polynomial not divisible by w")
    return {(i, j - 1): c for (i, j), c in Q.items()}


def _substitute(Q: dict, q: int, a: int, c, one) -> dict:
    """Q(t^q, t^a (c + w)) / t^M with M the minimal t-exponent."""
    out: dict = {}
    cpow_cache = {0: one}

    def cpow(k):
        if k not in cpow_cache:
            cpow_cache[k] = cpow(k - 1) * c
        return cpow_cache[k]

    for (i, j), coef in Q.items():
        base = q * i + a * j
        for l in range(j + 1):
            term = coef * comb(j, l) * cpow(j - l)
            key = (base, l)
            out[key] = out[key] + term if key in out else term
    out = {k: v for k, v in out.items() if v != 0}
    M = min(i for i, _ in out)
    return {(i - M, j): v for (i, j), v in out.items()}


def _edges(Q: dict, jmax: int):
    ords: dict[int, int] = {}
    for (i, j) in Q:
        if j <= jmax:
            ords[j] = min(ords.get(j, i), i)
    pts = [(j, Fraction(o)) for j, o in sorted(ords.items())]
    hull = lower_hull(pts)
    return ords, list(zip(hull, hull[1:]))


def _multiplicity(psi: UniPoly, xi) -> int:
    mult = 0
    cur = psi
    while cur.degree >= 0 and cur(xi) == 0:
        mult += 1
        cur = cur.derivative()
    return mult


def _sort_key(x) -> tuple:
    if isinstance(x, AlgNum):
        return tuple(x.coords)
    return (x,)


# ---------------------------------------------------------------------------
# composition orders

def _lowest_exponent_bound(Q: BiPoly, E: int, kappa: int) -> int | None:
    """min over monomials z^i w^j (j >= 1) of E i + (j - 1) kappa."""
    vals = [E * i + (j - 1) * kappa for (i, j) in Q.terms if j >= 1]
    return min(vals) if vals else None


def _compose_laurent(Q: BiPoly, E: int, kappa: int, u: list, cap: int | None, zero):
    """Coefficients of Q(T^E, T^kappa u(T)) for exponents below cap.

    Returns (offset, coefficient list).  cap = None means exact (u finite).
    """
    terms = list(Q.terms.items())
    low = min(E * i + j * kappa for (i, j), _ in terms)
    if cap is not None and cap <= low:
        return low, []
    maxj = max(j for (_, j), _ in terms)
    if cap is None:
        length = max(E * i + j * kappa + j * (len(u) - 1) for (i, j), _ in terms) - low + 1
    else:
        length = cap - low
    powers = [[Fraction(1) if type(zero) is Fraction else zero + 1]]
    for j in range(1, maxj + 1):
        powers.append(smul(powers[-1], u, length))
    out = [zero] * length
    for (i, j), c in terms:
        start = E * i + j * kappa - low
        for idx, v in enumerate(powers[j]):
            pos = start + idx
            if pos >= length:
                break
            out[pos] = out[pos] + c * v
    return low, out


def _first_nonzero(offset: int, coeffs: list):
    for idx, c in enumerate(coeffs):
        if c != 0:
            return offset + idx
    return None


def composition_order_T(Q: BiPoly, f: PuiseuxSeries):
    """ord_T Q(T^e, f) as an integer, Unresolved, or math.inf (identically zero)."""
    zero = f.field.zero() if f.rational_coeffs() is None else Fraction(0)
    raw = f._raw()
    if f.is_zero or not raw:
        Q0 = BiPoly({(i, 0): c for (i, j), c in Q.terms.items() if j == 0})
        if not f.exact:
            B = _lowest_exponent_bound(Q, f.e, 0)
            if B is not None and not Q0.is_zero():
                o = f.e * Q0.z_order()
                if o < f.K + 1 + B:
                    return o
                return Unresolved(f.K)
            if B is not None:
                return Unresolved(f.K)
        return math.inf if Q0.is_zero() else f.e * Q0.z_order()
    if f.exact:
        off, cs = _compose_laurent(Q, f.e, f.kappa, raw, None, zero)
        o = _first_nonzero(off, cs)
        return math.inf if o is None else o
    B = _lowest_exponent_bound(Q, f.e, f.kappa)
    cap = None if B is None else f.K + 1 + B
    if cap is None:
        off, cs = _compose_laurent(Q, f.e, f.kappa, raw, None, zero)
        o = _first_nonzero(off, cs)
        return math.inf if o is None else o
    off, cs = _compose_laurent(Q, f.e, f.kappa, raw, cap, zero)
    o = _first_nonzero(off, cs)
    return Unresolved(f.K) if o is None else o


def ord_z_of_series_composition(Q: BiPoly, f: PuiseuxSeries):
    """ord_z Q(z, f(z)) as a Fraction, Unresolved(K), or math.inf."""
    o = composition_order_T(Q, f)
    if isinstance(o, Unresolved) or o == math.inf:
        return o
    return Fraction(o, f.e)


def residue_check(P: BiPoly, f: PuiseuxSeries) -> bool:
    """ord_T P(T^e, f_trunc) >= K + 1 + B, the order forced by the truncation error."""
    if f.exact:
        return composition_order_T(P, f) == math.inf
    raw = f._raw()
    zero = raw[0] * 0 if raw else Fraction(0)
    B = _lowest_exponent_bound(P, f.e, f.kappa if raw else 0)
    if B is None:
        return True
    cap = f.K + 1 + B
    if not raw:
        return True
    off, cs = _compose_laurent(P, f.e, f.kappa, raw, cap, zero)
    return _first_nonzero(off, cs) is None


# ---------------------------------------------------------------------------
# regular expansion

def expand_regular(P: BiPoly, a0, K: int) -> PuiseuxSeries:
    """The unique power series f with f(0) = a0 and P(z, f) = 0 mod z^(K+1)."""
    if K < 0:
        raise DomainError("truncation K must be non-negative")
    if isinstance(a0, AlgNum):
        F = a0.field
        rational = a0.as_rational()
        elem = rational if rational is not None else a0
    else:
        F = NumberField.rationals()
        elem = as_fraction(a0)
    conv = (lambda c: as_fraction(c)) if type(elem) is Fraction else (lambda c: F(c))
    zero = conv(0)
    Pd = _poly_dict(P, conv)
    at0 = sum((c * elem**j for (i, j), c in Pd.items() if i == 0), zero)
    if at0 != 0:
        raise DomainError("precondition P(0, a0) = 0 fails")
    d0 = sum((c * j * elem ** (j - 1) for (i, j), c in Pd.items() if i == 0 and j >= 1), zero)
    if d0 == 0:
        raise DomainError("precondition P'_w(0, a0) != 0 fails (not the regular case)")
    # P'_w(0, a0) != 0 keeps the t^0 w term, so no t-power is divided out
    Q = _substitute(Pd, 1, 0, elem, conv(1))
    g = hensel_lift(Q, K + 1, zero)
    coeffs = list(g)
    coeffs[0] = coeffs[0] + elem
    out = [F(c) for c in coeffs]
    series = PuiseuxSeries(F, 1, 0, out, K, exact=False, kappa_minimal=False, source=P)
    if not residue_check(P, series):
        raise InvariantError("regular expansion failed its residue check")
    return series


# ---------------------------------------------------------------------------
# Newton-Puiseux

class _Driver:
    def __init__(self, P: BiPoly, F: NumberField, K: int):
        self.F = F
        self.K = K
        self.rational = F.is_rational
        self.conv = (lambda c: as_fraction(c)) if self.rational else (lambda c: F(c))
        self.zero = self.conv(0)
        self.one = self.conv(1)
        self.P = P
        self.branches: list[PuiseuxSeries] = []
        self.unrealized: list[UnrealizedBranch] = []
        R = resultant_of(P)
        self.max_steps = max(P.n, 1) * (2 * max(R.degree, 0) + 1)

    def _roots(self, h: UniPoly):
        rep = roots_in_field_report(UniPoly([self.F(c) for c in h.coeffs]), self.F)
        roots = [r.as_rational() if self.rational else r for r in rep.roots]
        return sorted(roots, key=_sort_key, reverse=True), rep

    def emit(self, E: int, prefix: dict, shift: int, tail: list | None, exact: bool):
        coeffs: dict[int, object] = dict(prefix)
        if tail is not None:
            for k, c in enumerate(tail):
                if c != 0:
                    coeffs[shift + k] = coeffs.get(shift + k, self.zero) + c
        nz = [k for k, c in coeffs.items() if c != 0]
        if not nz:
            self.branches.append(
                PuiseuxSeries(self.F, 1, 0, [], self.K, exact=True, multiplicity=1, source=self.P)
            )
            return
        kappa = min(nz)
        top = max(self.K, kappa)
        dense = [self.F(coeffs.get(k, self.zero)) for k in range(kappa, top + 1)]
        series = PuiseuxSeries(
            self.F, E, kappa, dense, top, exact=exact, multiplicity=E, source=self.P
        )
        if not residue_check(self.P, series):
            raise InvariantError("emitted branch failed its residue check")
        self.branches.append(series)

    def solve(self, Q: dict, jmax: int, E: int, prefix: dict, shift: int, depth: int, top: bool):
        if depth > self.max_steps:
            raise InvariantError("Newton-Puiseux recursion exceeded its termination bound")
        if not any(j == 0 for _, j in Q):
            # w (or the current w1) divides Q: an exact solution
            self.emit(E, prefix, shift, None, exact=True)
            Q = _strip_w(Q)
            jmax -= 1
            if jmax == 0 or not Q:
                return
        ords, edges = _edges(Q, jmax)
        for (j1, o1), (j2, o2) in edges:
            gamma = (o1 - o2) / (j2 - j1)
            a, q = gamma.numerator, gamma.denominator
            if not top and a <= 0:
                continue
            M = q * o1 + a * j1
            psi_coeffs = [self.zero] * ((j2 - j1) // q + 1)
            for j in range(j1, j2 + 1):
                if j in ords and q * ords[j] + a * j == M:
                    psi_coeffs[(j - j1) // q] = Q[(ords[j], j)]
            psi = UniPoly(psi_coeffs)
            roots, rep = self._roots(psi)
            accounted = 0
            new_shift = q * shift + a
            for xi in roots:
                mu = _multiplicity(psi, xi)
                if q == 1:
                    c = xi
                else:
                    cands, _ = self._roots(UniPoly([-xi] + [self.zero] * (q - 1) + [self.one]))
                    if not cands:
                        self.unrealized.append(
                            UnrealizedBranch(
                                UniPoly([-xi] + [0] * (q - 1) + [1]),
                                E * q,
                                Fraction(new_shift, E * q),
                                mu * q,
                                dict(prefix),
                            )
                        )
                        accounted += mu * q
                        continue
                    c = cands[0]
                accounted += mu * q
                Q1 = _substitute(Q, q, a, c, self.one)
                new_prefix = {k * q: v for k, v in prefix.items()}
                new_prefix[new_shift] = c
                self.descend(Q1, mu, E * q, new_prefix, new_shift, depth + 1)
            if accounted < j2 - j1:
                self.unrealized.append(
                    UnrealizedBranch(psi, E * q, Fraction(new_shift, E * q), j2 - j1 - accounted, dict(prefix))
                )

    def descend(self, Q: dict, r: int, E: int, prefix: dict, shift: int, depth: int):
        if r == 1:
            if not any(j == 0 for _, j in Q):
                self.emit(E, prefix, shift, None, exact=True)
                return
            N = self.K - shift + 1
            g = hensel_lift(Q, N, self.zero) if N > 1 else []
            self.emit(E, prefix, shift, g, exact=False)
            return
        self.solve(Q, r, E, prefix, shift, depth, top=False)


def puiseux_branches(P: BiPoly, F: NumberField | None = None, K: int = 32) -> BranchSet:
    """All branches of P(z, w) = 0 at z = 0, one representative per cycle."""
    F = F or NumberField.rationals()
    if P.n < 1:
        raise DomainError("P must have positive w-degree")
    P = P.strip_z()
    if not is_w_separable(P):
        raise PreconditionError("P is not w-separable; use its square-free part")
    drv = _Driver(P, F, K)
    Q = _poly_dict(P, drv.conv)
    drv.solve(Q, P.n, 1, {}, 0, 0, top=True)
    bs = BranchSet(drv.branches, drv.unrealized, P.n)
    total = bs.realized_count + sum(u.count for u in bs.unrealized)
    if total != P.n:
        raise InvariantError(f"branch count {total} does not match deg_w P = {P.n}")
    return bs


# ---------------------------------------------------------------------------
# p-adic sup norm

def _pow_le(lhs: list[tuple[Fraction, Fraction]], rhs: list[tuple[Fraction, Fraction]]) -> bool:
    """prod b^x over lhs <= prod b^x over rhs, exactly (positive bases, rational exponents)."""
    exps = [x for _, x in lhs + rhs]
    D = lcm(*(Fraction(x).denominator for x in exps)) if exps else 1

    def value(side):
        num, den = 1, 1
        for b, x in side:
            b = Fraction(b)
            k = Fraction(x) * D
            assert k.denominator == 1
            k = int(k)
            if k >= 0:
                num *= b.numerator**k
                den *= b.denominator**k
            else:
                num *= b.denominator ** (-k)
                den *= b.numerator ** (-k)
        return Fraction(num, den)

    return value(lhs) <= value(rhs)


def padic_sup_norm(f: PuiseuxSeries, p: int, r: Fraction, tail=None):
    """log M(r) = max_k log(|a_k|_p r^(k/e)) for a rational-coefficient series.

    ``r`` must be an integral power of p.  The stored maximum is the sup on
    the disc only if the tail k > K is dominated; ``tail`` is an exact pair
    (A'_p, A_p) with |a_k|_p <= A'_p A_p^(k/e - floor(kappa/e)).  Without it the
    bound is taken from the Eisenstein certificate of ``f.source``.
    """
    r = as_fraction(r)
    if r <= 0:
        raise DomainError("radius must be positive")
    s = rat_valuation(r, p)  # r = p^s
    if abs(r) != Fraction(p) ** s:
        raise DomainError("radius must be a power of p")
    raw = f.rational_coeffs()
    if raw is None:
        raise DomainError("padic_sup_norm needs rational coefficients")
    best = None
    for k, c in zip(range(f.kappa, f.kappa + len(raw)), raw):
        if c == 0:
            continue
        ex = Fraction(-rat_valuation(c, p)) + Fraction(k, f.e) * s
        best = ex if best is None else max(best, ex)
    if not f.exact:
        if tail is None and f.source is not None:
            from .eisenstein import finite_divisor_exact

            tail = finite_divisor_exact(f.source, p, f.e, f.kappa)
        if tail is None:
            return Unresolved(f.K, "no tail bound available")
        Ap, A = (as_fraction(x) for x in tail)
        fl = f.kappa // f.e
        # tail term k > K: A' A^(k/e - fl) p^(s k / e); monotone in k
        # non-increasing iff A * p^s <= 1
        growth = A * Fraction(p) ** s
        if growth > 1:
            return Unresolved(f.K, "tail bound grows on this disc")
        k = f.K + 1
        tail_side = [(Ap, Fraction(1)), (A, Fraction(k, f.e) - fl), (Fraction(p), Fraction(s * k, f.e))]
        if best is None:
            return Unresolved(f.K, "no nonzero stored coefficient")
        if not _pow_le(tail_side, [(Fraction(p), best)]):
            return Unresolved(f.K, "tail not dominated by the truncation")
    if best is None:
        return NEG_INF
    return LogReal.log_prime_power(p, best)


def padic_sup_exponent(f: PuiseuxSeries, p: int, r: Fraction):
    """Same as padic_sup_norm but as the exact exponent of p (no tail check)."""
    s = rat_valuation(as_fraction(r), p)
    best = None
    for k, c in zip(range(f.kappa, f.kappa + len(f.coeffs)), f.rational_coeffs() or []):
        if c != 0:
            ex = Fraction(-rat_valuation(c, p)) + Fraction(k, f.e) * s
            best = ex if best is None else max(best, ex)
    return best
