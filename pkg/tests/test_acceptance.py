"""Acceptance criteria 1-9; each test prints one PASS/FAIL line."""

import math
import random
import time
from fractions import Fraction

import pytest
import sympy

from eisenkit.arith import INFINITE, LogReal, Place, rat_valuation
from eisenkit.discbounds import discriminant_bound
from eisenkit.eisenstein import (
    certificate_for_branch,
    exceptional_set_bound,
    global_divisor,
    prime_sum_check,
    verify_bounds,
)
from eisenkit.lemmas import random_suite
from eisenkit.numberfield import NumberField
from eisenkit.parse import parse_bipoly
from eisenkit.poly import BiPoly, height_poly, is_w_separable
from eisenkit.puiseux import expand_regular, padic_sup_norm, puiseux_branches

TOL = 1e-9


def report(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")


def binom_half(K):
    out, c = [], Fraction(1)
    for k in range(K + 1):
        out.append(c)
        c = c * (Fraction(1, 2) - k) / (k + 1)
    return out


def abs2(c):
    c = sympy.Rational(c)
    return sympy.Rational(2) ** (sympy.multiplicity(2, c.q) - sympy.multiplicity(2, c.p))


def s2(k):
    return bin(k).count("1")


def test_criterion_1_binomial_golden():
    t0 = time.perf_counter()
    z, w = sympy.symbols("z w")
    P = parse_bipoly("w^2 - z - 1")
    f = expand_regular(P, 1, 200)
    # oracle for the divisor: R = Res_w(P, P_w) by sympy, normalized by its lowest coefficient
    R = sympy.Poly(sympy.resultant(w**2 - z - 1, 2 * w, w), z)
    low = [c for c in reversed(R.all_coeffs()) if c != 0][0]
    Rg = [sympy.Rational(c) / low for c in reversed(R.all_coeffs())]
    A_inf = max(2 * max(abs(c) for c in Rg), 6**2)
    # c(2, 2) = 4, |P|_2 = 1
    A_2 = max(4 * max(abs2(c) for c in Rg if c), 1)
    cert = global_divisor(P)
    rep = verify_bounds(cert, f, keep_slacks=True)
    a2, ainf = cert.divisor_A.value(Place(2)), cert.divisor_A.value(INFINITE)
    ap2, apinf = cert.divisor_Aprime.value(Place(2)), cert.divisor_Aprime.value(INFINITE)
    got = (ap2.log, a2.log, apinf.log, ainf.log)
    want = (0, math.log(int(A_2)), math.log(3), math.log(int(A_inf)))
    divisor_ok = all(abs(float(g) - w_) < TOL for g, w_ in zip(got, want)) and (int(A_2), int(A_inf)) == (4, 36)
    assert f.rational_coeffs() == binom_half(200)
    slacks = rep.slack_by_place[Place(2)]
    kummer = all(rat_valuation(a, 2) == s2(k) - 2 * k for k, a in enumerate(binom_half(200)))
    tight_expected = [k for k in range(201) if s2(k) - 2 * k == -2 * k]
    slack_ok = all(abs(float(slacks[k]) - s2(k) * math.log(2)) < TOL for k in slacks)
    dt = time.perf_counter() - t0
    ok = divisor_ok and not rep.failures and kummer and rep.tight[Place(2)] == tight_expected and slack_ok and dt < 2
    report(1, ok, f"failures={len(rep.failures)} tight2={rep.tight[Place(2)]} time={dt:.2f}s")
    assert divisor_ok and kummer and slack_ok
    assert rep.failures == []
    assert rep.tight[Place(2)] == tight_expected
    assert dt < 2


def test_criterion_2_divisor_height():
    cert = global_divisor(parse_bipoly("w^2 - z - 1"))
    hA = float(cert.h_A.value)
    bound = float(cert.theorem_bound.value)
    ok = abs(hA - math.log(144)) < TOL and abs(bound - (6 * math.log(2) + 14)) < TOL and cert.bound_holds
    report(2, ok, f"h(A)={hA:.6f} bound={bound:.6f} slack={float(cert.slack.value):.6f}")
    assert ok


def _random_separable(rng):
    while True:
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        terms = {}
        for i in range(m + 1):
            for j in range(n + 1):
                if rng.random() < 0.5:
                    c = rng.randint(-50, 50)
                    if c:
                        terms[(i, j)] = c
        terms[(rng.randint(0, m), n)] = rng.choice([-1, 1]) * rng.randint(1, 50)
        P = BiPoly(terms)
        if P.n >= 1 and is_w_separable(P):
            return P


def test_criterion_3_random_corpus():
    t0 = time.perf_counter()
    rng = random.Random(20240603)
    violations = []
    for i in range(200):
        P = _random_separable(rng)
        for variant in ("regular", "a0regular"):
            cert = global_divisor(P, 1, 0, variant)
            if not cert.h_A.le(cert.theorem_bound):
                violations.append((i, variant, "h(A)"))
            if cert.h_Aprime is not None and not cert.h_Aprime.le(height_poly(P.strip_z()) + LogReal.log(3)):
                violations.append((i, variant, "h(A')"))
    dt = time.perf_counter() - t0
    ok = not violations and dt < 60
    report(3, ok, f"violations={len(violations)} time={dt:.1f}s")
    assert violations == []
    assert dt < 60


def test_criterion_4_ramified_and_pole():
    P = parse_bipoly("z*w^2 - w + 1")
    bs = puiseux_branches(P, K=100)
    pole = [b for b in bs.branches if b.kappa == -1]
    assert len(pole) == 1 and pole[0].e == 1
    cert = certificate_for_branch(P, pole[0], "general")
    assert cert.exponent(5) == 5 - math.floor(-1 / 1)
    rep = verify_bounds(cert, pole[0])
    Q = parse_bipoly("w^2 - z")
    (b2,) = puiseux_branches(Q, K=100).branches
    cert2 = certificate_for_branch(Q, b2, "general")
    rep2 = verify_bounds(cert2, b2)
    # bound with +7en, e = 2: (3n-1)h + 3n log(mn) + 14n at h=0, m=1, n=2
    bound2 = 6 * math.log(2) + 28
    ok = (
        not rep.failures
        and rep.max_k == 100
        and (b2.e, b2.kappa) == (2, 1)
        and not rep2.failures
        and abs(float(cert2.theorem_bound.value) - bound2) < TOL
        and cert2.bound_holds
    )
    report(4, ok, f"pole failures={len(rep.failures)} ramified failures={len(rep2.failures)}")
    assert ok


def test_criterion_5_exceptional_set():
    r1 = exceptional_set_bound(parse_bipoly("w^2 - z - 1"), puiseux_branches(parse_bipoly("w^2 - z - 1"), K=200))
    P2 = parse_bipoly("z*w^2 - w + 1")
    r2 = exceptional_set_bound(P2, puiseux_branches(P2, K=200))
    ok = (
        r1.observed == [Place(2)]
        and abs(float(r1.observed_height.value) - math.log(2)) < TOL
        and abs(float(r1.bound.value) - 6 * (math.log(2) + 1)) < TOL
        and r1.holds
        and r2.observed == []
        and r2.K == 200
        and r2.holds
    )
    report(5, ok, f"S1={[str(v) for v in r1.observed]} S2={[str(v) for v in r2.observed]}")
    assert ok


@pytest.mark.parametrize("lemma", ["resultant", "all-roots", "root-bounds", "translation", "one-root"])
def test_criterion_6_lemma_suites(lemma):
    rep = random_suite(lemma, 200, seed=7)
    ok = rep.instances == 200 and not rep.violations
    report(6, ok, f"{lemma}: {rep.instances} instances, {rep.checks} checks, {len(rep.violations)} violations")
    assert ok


def test_criterion_7_discriminant():
    P = parse_bipoly("w^2 - 2 - 2*z")
    F = NumberField.from_text("x^2 - 2")
    bs = puiseux_branches(P, F, K=32)
    rep = discriminant_bound(P, bs, "friendly")
    actual = [float(a.value) for a in rep.actual]
    bound = [float(b.value) for b in rep.bound_per_branch]
    # oracle: disc(Q(sqrt 2)) = 8, and the friendly sum 16mn(n-1)(h + log(mn) + 3E) at h = log 2, m = 1, n = 2, E = 1
    expect_bound = 16 * 2 * (math.log(2) + math.log(2) + 3) / 2
    ok = (
        all(abs(a - 0.5 * math.log(8)) < TOL for a in actual)
        and all(abs(b - expect_bound) < TOL for b in bound)
        and all(a <= b for a, b in zip(actual, bound))
        and rep.lsum == [True, True]
    )
    report(7, ok, f"actual={actual[0]:.4f} bound={bound[0]:.2f} lsum={rep.lsum}")
    assert ok


def test_criterion_8_padic_sup_norm():
    P = parse_bipoly("w^2 - z - 1")
    rng = random.Random(8)
    fails = 0
    samples = 0
    for K in (20, 60, 120):
        f = expand_regular(P, 1, K)
        coeffs = f.rational_coeffs()
        for s in (-2, -3, -5):
            r = Fraction(2) ** s
            M = padic_sup_norm(f, 2, r)
            assert isinstance(M, LogReal)
            # exact exponent of 2 in M(r): max_k (-v(a_k) + k s)
            m_exp = max(-rat_valuation(c, 2) + k * s for k, c in enumerate(coeffs) if c)
            assert abs(float(M.value) - m_exp * math.log(2)) < TOL
            for _ in range(6):
                u = rng.choice([1, -1]) * (2 * rng.randint(0, 500) + 1)
                d = 2 * rng.randint(0, 500) + 1
                zv = Fraction(u, d) * Fraction(2) ** (-s)
                val = sum(c * zv**k for k, c in enumerate(coeffs))
                samples += 1
                # |f(z)|_2 <= 2^m_exp, exactly on valuations
                if val != 0 and -rat_valuation(val, 2) > m_exp:
                    fails += 1
    ok = fails == 0 and samples >= 50
    report(8, ok, f"{samples} samples, {fails} violations")
    assert ok


def test_criterion_9_prime_sum():
    t0 = time.perf_counter()
    rep = prime_sum_check(10**4)
    dt = time.perf_counter() - t0
    ok = not rep.failures and dt < 5
    report(9, ok, f"failures={len(rep.failures)} worst slack {rep.min_slack:.3f} at n={rep.worst_n} time={dt:.2f}s")
    assert ok
