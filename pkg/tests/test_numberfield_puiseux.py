import math
from fractions import Fraction

import pytest
import sympy

from eisenkit.arith import LogReal, Place
from eisenkit.errors import DomainError, FieldError, PreconditionError
from eisenkit.numberfield import (
    NumberField,
    char_poly,
    conjugate_norm_max,
    height_algnum,
    min_poly,
    newton_polygon_padic,
    padic_norm_exponent,
    roots_in_field,
)
from eisenkit.parse import parse_bipoly, parse_unipoly
from eisenkit.poly import UniPoly
from eisenkit.puiseux import (
    Unresolved,
    expand_regular,
    ord_z_of_series_composition,
    padic_sup_norm,
    puiseux_branches,
    residue_check,
)

SQRT2 = NumberField.from_text("x^2 - 2")


def test_field_certified():
    assert SQRT2.verified and SQRT2.degree == 2
    assert not NumberField.from_text("x^2 - 1").verified


def test_zero_divisor_raises():
    F = NumberField.from_text("x^2 - 1")
    with pytest.raises(FieldError):
        (F.theta - 1).inverse()


def test_min_and_char_poly():
    t = SQRT2.theta
    assert min_poly(1 + t).coeffs == (-1, -2, 1)
    assert min_poly(SQRT2(Fraction(3, 2))).coeffs == (Fraction(-3, 2), 1)
    F = NumberField.from_text("x^3 - x - 1")
    a = F.theta * F.theta + 2
    x = sympy.symbols("x")
    th = sympy.CRootOf(x**3 - x - 1, 0)
    ref = sympy.Poly(sympy.minimal_polynomial(th**2 + 2, x), x)
    assert [sympy.Rational(c.numerator, c.denominator) for c in char_poly(a).coeffs] == list(reversed(ref.all_coeffs()))


def test_inverse_and_division():
    t = SQRT2.theta
    a = 3 + 2 * t
    assert a * a.inverse() == SQRT2.one()
    assert (a / a) == SQRT2.one()


def test_roots_in_field():
    assert sorted(str(r) for r in roots_in_field(parse_unipoly("x^2 - 8"), SQRT2)) == ["-2*theta", "2*theta"]
    assert roots_in_field(parse_unipoly("x^2 + 1"), SQRT2) == []
    assert [r.as_rational() for r in roots_in_field(parse_unipoly("x^3 - 2*x"), NumberField.rationals())] == [0]


def test_heights_of_algebraic_numbers():
    t = SQRT2.theta
    assert height_algnum(1 + t).close_to(LogReal.log(1) + math.log(1 + math.sqrt(2)) / 2, 1e-15)
    assert height_algnum(SQRT2(Fraction(-7, 3))).close_to(LogReal.log(7))
    assert conjugate_norm_max(t / 2, Place(2)).close_to(LogReal.log(2).scale(Fraction(1, 2)))
    assert padic_norm_exponent(t / 2, 2) == Fraction(1, 2)


def test_newton_polygon_valuations():
    # x^2 - 2 over Q_2: both roots have valuation 1/2
    np_ = newton_polygon_padic(parse_unipoly("x^2 - 2"), 2)
    assert np_.root_valuations() == [(Fraction(1, 2), 2)]


def binom_half(K):
    out, c = [], Fraction(1)
    for k in range(K + 1):
        out.append(c)
        c = c * (Fraction(1, 2) - k) / (k + 1)
    return out


def test_binomial_series():
    f = expand_regular(parse_bipoly("w^2 - z - 1"), 1, 40)
    assert f.rational_coeffs() == binom_half(40)
    assert f.rational_coeffs()[:4] == [1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16)]


def test_catalan_branch():
    bs = puiseux_branches(parse_bipoly("z*w^2 - w + 1"), K=30)
    reg = [b for b in bs.branches if b.kappa == 0][0]
    assert reg.rational_coeffs() == [math.comb(2 * k, k) // (k + 1) for k in range(31)]
    pole = [b for b in bs.branches if b.kappa == -1][0]
    # the two branches sum to 1/z
    assert pole.rational_coeffs()[:4] == [1, -1, -1, -2]


def test_expand_regular_preconditions():
    with pytest.raises(DomainError):
        expand_regular(parse_bipoly("w^2 - z"), 0, 5)
    with pytest.raises(DomainError):
        expand_regular(parse_bipoly("w^2 - z - 1"), 2, 5)


def test_ramified_and_exact():
    bs = puiseux_branches(parse_bipoly("w^2 - z"), K=10)
    (b,) = bs.branches
    assert (b.e, b.kappa, b.multiplicity, b.exact) == (2, 1, 2, True)
    (c,) = puiseux_branches(parse_bipoly("w - z"), K=5).branches
    assert c.exact and c.kappa == 1 and c.coefficient(1) == 1 and c.coefficient(0) == 0


def test_unrealized_and_field_realized():
    bs = puiseux_branches(parse_bipoly("w^2 + z"), K=5)
    assert not bs.completeness_flag
    assert bs.unrealized[0].count == 2
    bs2 = puiseux_branches(parse_bipoly("w^2 - 2 - 2*z"), SQRT2, K=8)
    assert bs2.completeness_flag and len(bs2.branches) == 2
    lead = sorted(str(b.coefficient(0)) for b in bs2.branches)
    assert lead == ["-theta", "theta"]


def test_not_separable():
    with pytest.raises(PreconditionError):
        puiseux_branches(parse_bipoly("(w - z)^2"))


def test_branch_count_matches_degree():
    for text in ["w^3 - z*w - z^2", "z^2*w^3 + w - 1", "w^4 - z^3 + z*w"]:
        bs = puiseux_branches(parse_bipoly(text), K=6)
        assert bs.realized_count + sum(u.count for u in bs.unrealized) == parse_bipoly(text).n


def test_composition_orders():
    P = parse_bipoly("w^2 - z - 1")
    f = expand_regular(P, 1, 20)
    assert residue_check(P, f)
    assert ord_z_of_series_composition(P.derivative_w(), f) == 0
    (g,) = puiseux_branches(parse_bipoly("w^2 - z"), K=6).branches
    assert ord_z_of_series_composition(parse_bipoly("w^2 - z").derivative_w(), g) == Fraction(1, 2)


def test_padic_sup_norm():
    f = expand_regular(parse_bipoly("w^2 - z - 1"), 1, 60)
    # |a_k|_2 r^k with r = 1/8: a_0 dominates
    assert padic_sup_norm(f, 2, Fraction(1, 8)).close_to(0)
    # the Eisenstein bound 4^k grows on |z|_2 = 1, so the tail cannot be controlled
    assert isinstance(padic_sup_norm(f, 2, Fraction(1)), Unresolved)
    with pytest.raises(DomainError):
        padic_sup_norm(f, 2, Fraction(1, 3))
