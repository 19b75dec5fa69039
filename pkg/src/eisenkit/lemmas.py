"""Numerical checks of the auxiliary height and root estimates."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf

from .arith import LogReal, as_fraction, prime_divisors
from .parse import format_unipoly
from .numberfield import NumberField, height_algnum, mahler_measure_log, newton_polygon_padic, roots_in_field
from .poly import BiPoly, UniPoly, height_poly, primitive_integer, resultant_of
from .roots import complex_roots

TOLERANCE = mpf("1e-9")

LEMMAS = ("root-bounds", "translation", "resultant", "one-root", "all-roots")


@dataclass
class LemmaResult:
    lemma: str
    instance: str
    lhs: LogReal
    rhs: LogReal
    holds: bool

    @property
    def slack(self) -> mpf:
        if self.lhs.is_neg_inf:
            return mpmath.inf
        return self.rhs.value - self.lhs.value

    def as_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "instance": self.instance,
            "lhs": mpmath.nstr(self.lhs.value, 20) if not self.lhs.is_neg_inf else "-inf",
            "rhs": mpmath.nstr(self.rhs.value, 20),
            "holds": self.holds,
        }


def _result(lemma: str, instance: str, lhs: LogReal, rhs: LogReal) -> LemmaResult:
    if lhs.is_neg_inf:
        ok = True
    else:
        ok = lhs.value <= rhs.value + lhs.tol + rhs.tol + TOLERANCE
    return LemmaResult(lemma, instance, lhs, rhs, ok)


def _hq(q) -> LogReal:
    q = as_fraction(q)
    return LogReal.log(max(abs(q.numerator), q.denominator))


# ---------------------------------------------------------------------------
# individual checks

def check_root_bounds(p: UniPoly, label: str = "") -> list[LemmaResult]:
    """|a_m|/(2|P|) <= |alpha| <= 2|P|/|a_n| at infinity, and the sharper p-adic form.

    Results are in log scale; each root contributes a lower and an upper check.
    """
    if p.degree < 1:
        return []
    label = label or format_unipoly(p)
    m = p.order()
    am, an = as_fraction(p.coeffs[m]), as_fraction(p.lc)
    norm = max(abs(as_fraction(c)) for c in p.coeffs)
    out = []
    lo_bound = LogReal.log(am / (2 * norm))
    hi_bound = LogReal.log(2 * norm / an)
    for r in complex_roots(p):
        if r.value == 0 and r.radius == 0:
            continue
        mod_lo, mod_hi = r.modulus_lower, r.modulus_upper
        mid = (mod_lo + mod_hi) / 2
        half = (mod_hi - mod_lo) / 2
        lm = LogReal(mpmath.log(mid), half / max(mod_lo, mpf(2) ** -60) if half else 0)
        out.append(_result("root-bounds", f"{label} lower at inf", lo_bound, lm))
        out.append(_result("root-bounds", f"{label} upper at inf", lm, hi_bound))
    # p-adic: root valuations from the Newton polygon are exact
    nums = [as_fraction(c) for c in p.coeffs if c != 0]
    primes = prime_divisors(*[c.numerator for c in nums], *[c.denominator for c in nums])
    for q in sorted(primes):
        np_ = newton_polygon_padic(p.shift(-m) if m else p, q)
        vals = [as_fraction(c) for c in p.coeffs if c != 0]
        vnorm = min(_val(c, q) for c in vals)
        va_m, va_n = _val(am, q), _val(an, q)
        for rho, _mult in np_.root_valuations():
            # |x|_p = p^(-v(x)); compare exponents of p exactly, then report logs
            lhs_lo = LogReal.log_prime_power(q, -(va_m - vnorm))
            root = LogReal.log_prime_power(q, -rho)
            rhs_hi = LogReal.log_prime_power(q, -(vnorm - va_n))
            ok_lo = -(va_m - vnorm) <= -rho
            ok_hi = -rho <= -(vnorm - va_n)
            out.append(LemmaResult("root-bounds", f"{label} lower at {q}", lhs_lo, root, ok_lo))
            out.append(LemmaResult("root-bounds", f"{label} upper at {q}", root, rhs_hi, ok_hi))
    return out


def _val(q: Fraction, p: int) -> int:
    from .arith import rat_valuation

    return rat_valuation(q, p)


def check_translation(P: BiPoly, alpha, label: str = "") -> LemmaResult:
    """h(P(z, w + alpha)) <= h(P) + n h(alpha) + n log 2 + log(n + 1) for rational alpha."""
    alpha = as_fraction(alpha)
    n = P.n
    lhs = height_poly(P.translate_w(alpha))
    rhs = height_poly(P) + _hq(alpha).scale(n) + LogReal.log(2).scale(n) + LogReal.log(n + 1)
    return _result("translation", label or f"alpha={alpha}", lhs, rhs)


def check_resultant_height(P: BiPoly, label: str = "") -> LemmaResult:
    """h(R_P) <= (2n - 1) h(P) + (2n - 1) log((m + 1)(n + 1) sqrt n)."""
    m, n = P.m, P.n
    R = resultant_of(P)
    if R.is_zero():
        raise ValueError("R_P vanishes identically")
    lhs = height_poly(R)
    inner = LogReal.log((m + 1) * (n + 1)) + LogReal.log(n).scale(Fraction(1, 2))
    rhs = height_poly(P).scale(2 * n - 1) + inner.scale(2 * n - 1)
    return _result("resultant", label or "R_P", lhs, rhs)


def check_one_root(p: UniPoly, F: NumberField | None = None, label: str = "") -> list[LemmaResult]:
    """h(alpha) <= h(P) + log 2 for each root of P lying in F."""
    F = F or NumberField.rationals()
    rhs = height_poly(p) + LogReal.log(2)
    out = []
    for a in roots_in_field(p, F):
        out.append(_result("one-root", f"{label or format_unipoly(p)} root {a}", height_algnum(a), rhs))
    return out


def check_all_roots(p: UniPoly, label: str = "") -> LemmaResult:
    """sum_i h(alpha_i) <= h(P) + log(m + 1) over all roots with multiplicity.

    For a primitive integer polynomial the left side equals log M(P), since
    each irreducible factor contributes its Mahler measure.
    """
    lhs = mahler_measure_log(primitive_integer(p))
    rhs = height_poly(p) + LogReal.log(p.degree + 1)
    return _result("all-roots", label or format_unipoly(p), lhs, rhs)


def check_polynomial(P: BiPoly, alpha=1, F: NumberField | None = None) -> list[LemmaResult]:
    """All estimates applied to P, its resultant R_P(z) and P(0, w)."""
    out: list[LemmaResult] = []
    out.append(check_translation(P, alpha))
    R = resultant_of(P) if P.n >= 1 else UniPoly([0])
    if not R.is_zero():
        out.append(check_resultant_height(P))
    targets = []
    if not R.is_zero() and R.degree >= 1:
        targets.append(("R_P", R))
    p0 = P.at_z0()
    if not p0.is_zero() and p0.degree >= 1:
        targets.append(("P(0,w)", p0))
    for name, poly in targets:
        out.extend(check_root_bounds(poly, name))
        out.extend(check_one_root(poly, F, name))
        out.append(check_all_roots(poly, name))
    return out


# ---------------------------------------------------------------------------
# random instances

def _random_uni(rng: random.Random, deg: int, bound: int) -> UniPoly:
    while True:
        cs = [rng.randint(-bound, bound) for _ in range(deg + 1)]
        if cs[-1] != 0:
            if deg >= 1 and rng.random() < 0.25:
                cs[0] = 0
            if any(cs[:-1]) or deg == 0:
                return UniPoly(cs)


def _random_bi(rng: random.Random, m: int, n: int, bound: int) -> BiPoly:
    while True:
        terms = {}
        for i in range(m + 1):
            for j in range(n + 1):
                if rng.random() < 0.6:
                    c = rng.randint(-bound, bound)
                    if c:
                        terms[(i, j)] = c
        terms[(rng.randint(0, m), n)] = rng.choice([-1, 1]) * rng.randint(1, bound)
        P = BiPoly(terms)
        if P.n == n and P.m >= 1:
            return P


@dataclass
class SuiteReport:
    lemma: str
    instances: int
    checks: int
    violations: list[LemmaResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def random_suite(lemma: str, count: int = 200, seed: int = 0) -> SuiteReport:
    rng = random.Random(f"{lemma}:{seed}")
    report = SuiteReport(lemma, 0, 0)
    while report.instances < count:
        if lemma == "root-bounds":
            res = check_root_bounds(_random_uni(rng, rng.randint(1, 6), 60))
        elif lemma == "translation":
            P = _random_bi(rng, rng.randint(1, 3), rng.randint(1, 4), 30)
            alpha = Fraction(rng.randint(-20, 20), rng.randint(1, 20))
            res = [check_translation(P, alpha)]
        elif lemma == "resultant":
            P = _random_bi(rng, rng.randint(1, 3), rng.randint(1, 4), 30)
            if resultant_of(P).is_zero():
                continue
            res = [check_resultant_height(P)]
        elif lemma == "one-root":
            # plant a rational root so the check is not vacuous
            a = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
            base = _random_uni(rng, rng.randint(0, 4), 40)
            p = base * UniPoly([-a.numerator, a.denominator])
            res = check_one_root(p)
        elif lemma == "all-roots":
            res = [check_all_roots(_random_uni(rng, rng.randint(1, 7), 60))]
        else:
            raise ValueError(f"unknown lemma {lemma!r}")
        report.instances += 1
        report.checks += len(res)
        report.violations.extend(r for r in res if not r.holds)
    return report
