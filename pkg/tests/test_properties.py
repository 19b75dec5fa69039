"""Hypothesis properties for the invariants of each module."""

import math
from fractions import Fraction

import mpmath
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from eisenkit.arith import INFINITE, LogReal, Place, abs_at_place, factorize, product_formula_check, rat_valuation
from eisenkit.discbounds import UnresolvedOrder, actual_partial_discriminant, discriminant_bound, silverman_bound
from eisenkit.eisenstein import exceptional_set_bound, global_divisor, verify_bounds
from eisenkit.numberfield import AlgNum, NumberField, conjugate_norm_max, height_algnum, roots_in_field
from eisenkit.parse import format_bipoly, parse_bipoly
from eisenkit.poly import BiPoly, UniPoly, discriminant_w, height_poly, is_w_separable, resultant_of
from eisenkit.puiseux import Unresolved, expand_regular, puiseux_branches, residue_check

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

nonzero_rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6).filter(lambda q: q != 0)
primes = st.sampled_from([2, 3, 5, 7, 11, 13, 101, 1009])


@st.composite
def bipolys(draw, max_m=3, max_n=3, bound=20):
    m = draw(st.integers(0, max_m))
    n = draw(st.integers(1, max_n))
    terms = {}
    for i in range(m + 1):
        for j in range(n + 1):
            c = draw(st.integers(-bound, bound))
            if c:
                terms[(i, j)] = c
    lead_i = draw(st.integers(0, m))
    terms[(lead_i, n)] = draw(st.integers(1, bound))
    return BiPoly(terms)


@SETTINGS
@given(nonzero_rationals, primes)
def test_abs_at_place_is_exact_valuation(q, p):
    assert abs_at_place(q, Place(p)).close_to(LogReal.log_prime_power(p, -rat_valuation(q, p)))


@SETTINGS
@given(nonzero_rationals)
def test_product_formula(q):
    support = set(factorize(abs(q.numerator))) | set(factorize(q.denominator))
    assert product_formula_check(q, support)
    total = abs_at_place(q, INFINITE)
    for p in support:
        total = total + abs_at_place(q, Place(p))
    assert abs(total.value) < mpmath.mpf("1e-30")


@SETTINGS
@given(st.lists(st.integers(1, 10**9), min_size=1, max_size=30))
def test_logreal_tolerance_accumulates_linearly(xs):
    terms = [LogReal.log(x) for x in xs]
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    ulp = mpmath.mpf(2) ** (-mpmath.mp.prec + 8) * (abs(total.value) + 1)
    assert total.tol <= sum(t.tol for t in terms) + len(xs) * ulp
    assert abs(total.value - mpmath.log(math.prod(xs))) <= total.tol + ulp


@SETTINGS
@given(bipolys())
def test_parse_print_roundtrip(P):
    assert parse_bipoly(format_bipoly(P)) == P


@SETTINGS
@given(bipolys())
def test_discriminant_times_lead_is_resultant(P):
    pn = P.w_coeffs()[P.n]
    D, R = discriminant_w(P), resultant_of(P)
    assert D * pn == R or D * pn == -R


SQRT2 = NumberField.from_text("x^2 - 2")
CUBIC = NumberField.from_text("x^3 - x - 1")
small = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@SETTINGS
@given(st.sampled_from([SQRT2, CUBIC]), st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3), primes)
def test_conjugate_norm_submultiplicative(F, a, b, p):
    x = AlgNum(F, tuple(a[: F.degree]))
    y = AlgNum(F, tuple(b[: F.degree]))
    assume(not x.is_zero() and not y.is_zero())
    for v in (INFINITE, Place(p)):
        assert conjugate_norm_max(x * y, v).le(conjugate_norm_max(x, v) + conjugate_norm_max(y, v))


@SETTINGS
@given(small)
def test_height_of_rationals(q):
    assume(q != 0)
    F = NumberField.rationals()
    assert height_algnum(F(q)).close_to(LogReal.log(max(abs(q.numerator), q.denominator)))
    assert height_algnum(SQRT2(q)).close_to(height_algnum(F(q)))


@SETTINGS
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=3), st.integers(-5, 5), st.integers(-5, 5))
def test_roots_in_field_are_exact(base, a, b):
    assume(any(base))
    t = SQRT2.theta
    root = a + b * t
    mp = UniPoly([a * a - 2 * b * b, -2 * a, 1]) if b else UniPoly([-a, 1])
    h = UniPoly(base) * mp
    assume(not h.is_zero())
    found = roots_in_field(h, SQRT2)
    assert root in found
    for beta in found:
        val = SQRT2.zero()
        for c in reversed(h.coeffs):
            val = val * beta + c
        assert val.is_zero()


@st.composite
def regular_instances(draw, a0s=st.integers(-3, 3)):
    """P with P(0, a0) = 0 and P_w(0, a0) != 0."""
    P = draw(bipolys(max_m=2, max_n=3, bound=9))
    a0 = draw(a0s)
    P = P - BiPoly({(0, 0): P.evaluate(0, a0)})
    if P.derivative_w().evaluate(0, a0) == 0:
        P = P + BiPoly({(0, 1): 1, (0, 0): -a0})
    return P, a0


@SETTINGS
@given(regular_instances())
def test_regular_expansion_residue_and_verification(inst):
    P, a0 = inst
    f = expand_regular(P, a0, 12)
    assert residue_check(P, f)
    if is_w_separable(P):
        for variant in ("regular", "a0regular"):
            cert = global_divisor(P, 1, 0, variant)
            assert verify_bounds(cert, f).ok
            assert all(cert.divisor_A.value(v).log.value >= 0 for v in cert.divisor_A.support)


@SETTINGS
@given(regular_instances(st.just(0)), st.lists(st.fractions(min_value=-1, max_value=1, max_denominator=50), min_size=5, max_size=5))
def test_archimedean_boundedness(inst, samples):
    P, _ = inst
    f = expand_regular(P, 0, 30)
    coeffs = f.rational_coeffs()
    normP = max(abs(c) for c in P.terms.values())
    rho = Fraction(1, int(6 * normP) ** P.n)
    # empirical radius from the coefficient growth
    growth = [float(abs(c)) ** (1.0 / k) for k, c in enumerate(coeffs) if k and c]
    if growth:
        rho = min(rho, Fraction(1 / (2 * max(growth))).limit_denominator(10**6))
    for s in samples:
        zv = s * rho
        val = sum(float(c) * float(zv) ** k for k, c in enumerate(coeffs))
        assert abs(val) <= 3 * float(normP) + 1e-9


@SETTINGS
@given(bipolys(max_m=2, max_n=3, bound=9))
def test_branches_distinct_and_checked(P):
    assume(is_w_separable(P))
    bs = puiseux_branches(P, K=8)
    assert bs.realized_count + sum(u.count for u in bs.unrealized) == P.n
    keys = [(b.e, b.kappa, tuple(str(c) for c in b.coeffs)) for b in bs.branches]
    assert len(set(keys)) == len(keys)
    for b in bs.branches:
        if not b.exact:
            assert residue_check(P.strip_z(), b)


@SETTINGS
@given(bipolys(max_m=2, max_n=2, bound=9))
def test_exceptional_set_monotone_in_K(P):
    assume(is_w_separable(P))
    small_set = set(exceptional_set_bound(P, puiseux_branches(P, K=6)).observed)
    large = exceptional_set_bound(P, puiseux_branches(P, K=24))
    assert small_set <= set(large.observed)
    assert large.holds


@SETTINGS
@given(bipolys(max_m=2, max_n=3, bound=9))
def test_friendly_dominates_exact_order(P):
    P = P.strip_z()
    assume(P.n >= 2 and is_w_separable(P) and P.w_coeffs()[P.n][0] != 0)
    bs = puiseux_branches(P, K=8)
    try:
        integral = discriminant_bound(P, bs, "integral")
    except UnresolvedOrder:
        assume(False)
    friendly = discriminant_bound(P, bs, "friendly")
    # ord_z D <= 2m(n - 1)
    assert integral.bound_sum.le(friendly.bound_sum)
    assert discriminant_bound(P, bs, "general").bound_sum.le(discriminant_bound(P, bs, "general-friendly").bound_sum)
    for rep in (integral, friendly):
        assert rep.holds
    for res in friendly.lsum:
        assert res is True or isinstance(res, Unresolved)


def test_silverman_for_sqrt2():
    assert actual_partial_discriminant(SQRT2).le(silverman_bound(SQRT2.theta))
