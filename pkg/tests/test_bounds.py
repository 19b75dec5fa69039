import math
from fractions import Fraction

import pytest

from eisenkit.arith import INFINITE, LogReal, Place
from eisenkit.discbounds import (
    actual_partial_discriminant,
    check_lsum,
    discriminant_bound,
    lambda_chain,
    lsum_lhs,
    quadratic_field_discriminant,
    silverman_bound,
)
from eisenkit.eisenstein import (
    c_factor,
    certificate_for_branch,
    exceptional_set_bound,
    global_divisor,
    prime_sum_c,
    theorem_height_bound,
    verify_bounds,
)
from eisenkit.errors import PreconditionError
from eisenkit.lemmas import check_all_roots, check_polynomial, check_resultant_height, check_root_bounds, check_translation
from eisenkit.numberfield import NumberField
from eisenkit.parse import parse_bipoly, parse_unipoly
from eisenkit.puiseux import puiseux_branches

TOL = 1e-12
SQRT2 = NumberField.from_text("x^2 - 2")


def logs(cert, v):
    ap = cert.divisor_Aprime.value(v) if cert.divisor_Aprime is not None else None
    return (None if ap is None else float(ap.log.value), float(cert.divisor_A.value(v).log.value))


def test_c_factor():
    assert c_factor(2, 2) == 4
    assert c_factor(3, 2) == 1
    assert c_factor(5, 7) == 35


def test_binomial_divisor_values():
    cert = global_divisor(parse_bipoly("w^2 - z - 1"))
    assert logs(cert, INFINITE) == pytest.approx((math.log(3), math.log(36)), abs=TOL)
    assert logs(cert, Place(2)) == pytest.approx((0, math.log(4)), abs=TOL)
    assert cert.divisor_A.is_effective()
    assert set(map(str, cert.divisor_A.places())) == {"inf", "2"}


def test_denominator_prime_in_support():
    # R/gamma has the prime 5 in a denominator: w^2 - z/5 - 1
    cert = global_divisor(parse_bipoly("5*w^2 - z - 5"))
    assert Place(5) in cert.divisor_A.support


def test_theorem_bounds():
    h = LogReal.zero()
    assert float(theorem_height_bound(h, 1, 2, 1, "regular").value) == pytest.approx(6 * math.log(2) + 14)
    assert float(theorem_height_bound(h, 1, 2, 2, "general").value) == pytest.approx(6 * math.log(2) + 14 + 14)
    assert float(theorem_height_bound(h, 1, 2, 1, "a0regular").value) == pytest.approx(6 * math.log(2) + 20)
    assert float(theorem_height_bound(h, 1, 2, 2, "a0general").value) == pytest.approx(6 * math.log(2) + 40)


def test_regular_variant_rejects_ramified():
    with pytest.raises(PreconditionError):
        global_divisor(parse_bipoly("w^2 - z"), 2, 1, "regular")
    with pytest.raises(PreconditionError):
        global_divisor(parse_bipoly("(w - z)^2"))


def test_ramified_certificate():
    P = parse_bipoly("w^2 - z")
    (b,) = puiseux_branches(P, K=10).branches
    cert = certificate_for_branch(P, b, "general")
    assert logs(cert, INFINITE)[1] == pytest.approx(math.log(36))
    assert logs(cert, Place(2))[1] == pytest.approx(math.log(16))
    assert float(cert.theorem_bound.value) == pytest.approx(6 * math.log(2) + 28)
    assert verify_bounds(cert, b).ok


@pytest.mark.parametrize("variant", ["general", "a0general"])
def test_pole_branch_verifies(variant):
    P = parse_bipoly("z*w^2 - w + 1")
    for b in puiseux_branches(P, K=60).branches:
        cert = certificate_for_branch(P, b, variant)
        assert verify_bounds(cert, b).ok
        assert cert.bound_holds


def test_root_mode_agrees_on_binomial():
    P = parse_bipoly("w^2 - z - 1")
    a = global_divisor(P, mode="coefficient")
    b = global_divisor(P, mode="root")
    assert logs(a, INFINITE)[1] == pytest.approx(logs(b, INFINITE)[1], abs=1e-9)
    assert logs(a, Place(2))[1] == pytest.approx(logs(b, Place(2))[1], abs=1e-9)


def test_exceptional_sets():
    P = parse_bipoly("w^2 - z - 1")
    rep = exceptional_set_bound(P, puiseux_branches(P, K=50))
    assert rep.observed == [Place(2)] and rep.holds
    assert float(rep.bound.value) == pytest.approx(6 * (math.log(2) + 1))
    Q = parse_bipoly("3*w - z")
    assert exceptional_set_bound(Q, puiseux_branches(Q, K=5)).observed == [Place(3)]


def test_prime_sum_small():
    # sum_{p <= 10} log(10 p) = log(20 * 30 * 50 * 70)
    assert float(prime_sum_c(10).value) == pytest.approx(math.log(20 * 30 * 50 * 70))


# ---------------------------------------------------------------------------
# fields and discriminants

@pytest.mark.parametrize("mod,disc", [("x^2 - 2", 8), ("x^2 - 5", 5), ("x^2 + 1", -4), ("x^2 - 3", 12), ("x^2 - 12", 12)])
def test_quadratic_discriminants(mod, disc):
    assert quadratic_field_discriminant(parse_unipoly(mod)) == disc
    assert float(actual_partial_discriminant(NumberField.from_text(mod)).value) == pytest.approx(math.log(abs(disc)) / 2)


def test_lambda_chain_sqrt2():
    (b, _) = puiseux_branches(parse_bipoly("w^2 - 2 - 2*z"), SQRT2, K=10).branches
    ch = lambda_chain(b)
    assert ch.resolved and ch.field_degree == 2
    assert ch.degrees[:3] == [2, 1, 1]
    assert lsum_lhs(ch, 1) == 0
    assert check_lsum(b, ch, parse_bipoly("w^2 - 2 - 2*z")) is True


def test_lambda_chain_late_irrationality():
    # a_0 rational, a_1 generates Q(sqrt 2): w = 1 + theta z is a root of (w - 1)^2 - 2 z^2
    P = parse_bipoly("(w - 1)^2 - 2*z^2")
    bs = puiseux_branches(P, SQRT2, K=6)
    b = bs.branches[0]
    ch = lambda_chain(b)
    assert ch.degrees[:3] == [2, 2, 1]
    assert lsum_lhs(ch, 1) == 1
    assert check_lsum(b, ch, P) is True


def test_silverman():
    t = SQRT2.theta
    assert float(silverman_bound(t).value) == pytest.approx(math.log(2) + math.log(2))


def test_discriminant_variants():
    P = parse_bipoly("w^2 - 2 - 2*z")
    bs = puiseux_branches(P, SQRT2, K=16)
    h, n, m = math.log(2), 2, 1
    friendly = discriminant_bound(P, bs, "friendly")
    assert float(friendly.bound_sum.value) == pytest.approx(16 * m * n * (n - 1) * (h + math.log(m * n) + 3))
    gen = discriminant_bound(P, bs, "general-friendly")
    assert float(gen.bound_sum.value) == pytest.approx(16 * m * n * (n - 1) * (h + 5 * n))
    assert float(gen.bound_per_branch[0].value) == pytest.approx(float(gen.bound_sum.value))
    integral = discriminant_bound(P, bs, "integral")
    # ord_z D = 0, so only 2(n-1)(h + log(n+1)) remains
    assert float(integral.bound_sum.value) == pytest.approx(2 * (h + math.log(3)))
    for rep in (friendly, gen, integral):
        assert rep.holds
        assert float(rep.actual_sum.value) == pytest.approx(math.log(8))


def test_integral_per_branch_needs_log_nu():
    """The per-branch estimate without log nu is below the true value for Q(sqrt 2)."""
    P = parse_bipoly("w^2 - 2 - 2*z")
    rep = discriminant_bound(P, puiseux_branches(P, SQRT2, K=16), "integral")
    actual = float(rep.actual[0].value)
    assert float(rep.stated_per_branch[0].value) == pytest.approx(2 * 0.5 * math.log(2))
    assert float(rep.stated_per_branch[0].value) < actual
    assert float(rep.bound_per_branch[0].value) >= actual


def test_integral_requires_pn0():
    P = parse_bipoly("z*w^2 - w + 1")
    with pytest.raises(PreconditionError):
        discriminant_bound(P, puiseux_branches(P, K=8), "integral")
    rep = discriminant_bound(P, puiseux_branches(P, K=8), "general-friendly")
    assert rep.holds


# ---------------------------------------------------------------------------
# auxiliary inequalities

def test_root_bounds_examples():
    res = check_root_bounds(parse_unipoly("x^2 - 8"))
    assert res and all(r.holds for r in res)
    # 2-adic: one segment, both roots with |alpha|_2 = 2^(-3/2), between |a_0|_2/|P|_2 = 1/8 and 1
    two = [r for r in res if r.instance.endswith("at 2")]
    assert len(two) == 2 and all(r.holds for r in two)


def test_translation_and_resultant():
    P = parse_bipoly("w^2 - z - 1")
    r = check_translation(P, Fraction(3))
    assert r.holds and float(r.lhs.value) == pytest.approx(math.log(8))
    assert check_resultant_height(P).holds


def test_mahler_equals_sum_of_heights():
    # x^2 - 2: both roots have height log(2)/2
    r = check_all_roots(parse_unipoly("x^2 - 2"))
    assert float(r.lhs.value) == pytest.approx(math.log(2))


def test_check_polynomial_runs_everything():
    res = check_polynomial(parse_bipoly("z*w^2 - w + 1"), 2)
    assert {r.lemma for r in res} == {"translation", "resultant", "root-bounds", "one-root", "all-roots"}
    assert all(r.holds for r in res)
