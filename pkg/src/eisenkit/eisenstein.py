"""Explicit Eisenstein divisors, their heights, and the coefficient check.

Every local bound is a product of rational powers of rationals, so finite
places (and the archimedean place in coefficient mode) are decided exactly;
LogReal values are only used for reporting and for archimedean quantities
that depend on root isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath
from mpmath import mpf

from .arith import (
    INFINITE,
    LogReal,
    NEG_INF,
    Place,
    abs_exact,
    as_fraction,
    factorize,
    lcm,
    lr_sum,
    primes_up_to,
    rat_valuation,
    working_precision,
)
from .errors import DomainError, PreconditionError
from .numberfield import AlgNum, archimedean_norms, char_poly, newton_polygon_padic, padic_norm_exponent
from .poly import BiPoly, NormalizationRecord, UniPoly, height_poly, k_normalize, lowest_term, resultant_of
from .roots import smallest_nonzero_root_modulus

VARIANTS = ("regular", "general", "a0regular", "a0general")
DIVISOR_MODES = ("coefficient", "root")


def c_factor(p, n: int) -> int:
    """c(p, n): 1 when n < p <= infinity, n p when p <= n."""
    if isinstance(p, Place):
        p = p.p
    if p is None:
        return 1
    return n * p if p <= n else 1


def _check_variant(variant: str) -> str:
    v = variant.lower().replace("-", "").replace("_", "")
    if v not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r} (choose from {', '.join(VARIANTS)})")
    return v


# ---------------------------------------------------------------------------
# exact power products

PowerProduct = tuple  # tuple of (Fraction base > 0, Fraction exponent)


def pp_le(lhs: Iterable, rhs: Iterable) -> bool:
    """prod b^x (lhs) <= prod b^x (rhs), decided exactly."""
    lhs, rhs = list(lhs), list(rhs)
    for b, _ in lhs + rhs:
        if b <= 0:
            raise DomainError("power products need positive bases")
    D = lcm(*(Fraction(x).denominator for _, x in lhs + rhs)) if lhs or rhs else 1

    def value(side):
        num, den = 1, 1
        for b, x in side:
            b = Fraction(b)
            k = Fraction(x) * D
            k = int(k)
            if k >= 0:
                num *= b.numerator**k
                den *= b.denominator**k
            else:
                num *= b.denominator ** (-k)
                den *= b.numerator ** (-k)
        return Fraction(num, den)

    return value(lhs) <= value(rhs)


def pp_eq(lhs, rhs) -> bool:
    return pp_le(lhs, rhs) and pp_le(rhs, lhs)


def pp_log(pp) -> LogReal:
    return lr_sum(LogReal.log(b).scale(x) if x >= 0 else -(LogReal.log(b).scale(-x)) for b, x in pp)


def pp_max(a, b):
    return b if pp_le(a, b) else a


def pp_str(pp) -> str:
    parts = []
    for b, x in pp:
        if x == 1:
            parts.append(str(b))
        else:
            parts.append(f"{b}^({x})")
    return "*".join(parts) if parts else "1"


def pp_simplify(pp) -> tuple:
    """Merge integral powers into a single rational factor."""
    rational = Fraction(1)
    rest = []
    for b, x in pp:
        x = Fraction(x)
        if x.denominator == 1:
            rational *= Fraction(b) ** int(x)
        else:
            rest.append((Fraction(b), x))
    out = [] if rational == 1 else [(rational, Fraction(1))]
    return tuple(out + rest)


# ---------------------------------------------------------------------------
# divisors

@dataclass
class LocalBound:
    """A local value A_v: exact power product when available, always a LogReal."""

    log: LogReal
    exact: tuple | None = None

    @classmethod
    def of(cls, pp) -> "LocalBound":
        pp = pp_simplify(pp)
        return cls(pp_log(pp), pp)

    @classmethod
    def one(cls) -> "LocalBound":
        return cls(LogReal.zero(), ())

    def is_one(self) -> bool:
        return self.exact is not None and pp_eq(self.exact, ())


@dataclass
class MDivisor:
    support: dict  # Place -> LocalBound

    def value(self, v: Place) -> LocalBound:
        return self.support.get(v, LocalBound.one())

    def places(self) -> list[Place]:
        return sorted(self.support)

    def height(self) -> LogReal:
        """h(A) = sum_v log+ A_v (d = d_v = 1 over Q)."""
        total = LogReal.zero()
        for v in self.places():
            lv = self.support[v].log
            if lv.value is not None and lv.value > 0:
                total = total + lv
            elif lv.value is not None and lv.value + lv.tol > 0:
                total = total + LogReal(0, lv.value + lv.tol)
        return total

    def is_effective(self) -> bool:
        for b in self.support.values():
            if b.exact is not None:
                if not pp_le((), b.exact):
                    return False
            elif not b.log.ge(LogReal.zero()):
                return False
        return True


@dataclass
class DivisorData:
    """Normalized polynomial and resultant data shared by all places."""

    P: BiPoly  # stripped input
    P_norm: BiPoly
    record: NormalizationRecord
    R: UniPoly
    mu: int
    gamma: Fraction
    R_over_gamma: UniPoly
    m: int
    n: int
    e: int
    kappa: int
    k: int  # normalization index
    variant: str


def prepare(P: BiPoly, e: int, kappa: int, variant: str) -> DivisorData:
    variant = _check_variant(variant)
    if e < 1:
        raise DomainError("e must be positive")
    if P.n < 1:
        raise DomainError("P must have positive w-degree")
    P = P.strip_z()
    if variant in ("regular", "a0regular"):
        if e != 1 or kappa < 0:
            raise PreconditionError(
                f"the {variant} variant needs a power series (e = 1, kappa >= 0); use the general variant"
            )
        k = 0
    else:
        k = kappa // e
    Pn, rec = k_normalize(P, k)
    R = resultant_of(Pn)
    if R.is_zero():
        raise PreconditionError("P is not w-separable; use its square-free part (--squarefree)")
    mu, gamma = lowest_term(R)
    return DivisorData(P, Pn, rec, R, mu, gamma, R * (1 / gamma), P.m, P.n, e, kappa, k, variant)


def _poly_norm(P, v: Place) -> Fraction:
    cs = P.terms.values() if isinstance(P, BiPoly) else [c for c in P.coeffs if c != 0]
    return max(abs_exact(c, v) for c in cs)


def _root_inverse_sigma_padic(R: UniPoly, p: int) -> tuple:
    """sigma(R)^(-1) at p as a power product: p^(max root valuation)."""
    mu = R.order()
    Rs = R.shift(-mu)
    if Rs.degree < 1:
        return None
    npoly = newton_polygon_padic(Rs, p)
    vmax = max(-s for s, _ in npoly.slopes)
    return ((Fraction(p), vmax),)


def _inner(data: DivisorData, v: Place, mode: str):
    """The max{...} factor: Xi_e (coefficient mode) or Sigma_e (root mode)."""
    n = data.n
    Pn = _poly_norm(data.P_norm, v)
    ee = data.e if data.variant in ("general", "a0general") else 1
    if v.is_infinite:
        second = ((Fraction(6) * Pn, Fraction(n)),)
        if mode == "coefficient":
            first = ((2 * _poly_norm(data.R_over_gamma, v), Fraction(1)),)
            return LocalBound.of(pp_max(first, second))
        # root mode at infinity: sigma(R)^(-1) from certified roots
        try:
            lo, hi = smallest_nonzero_root_modulus(data.R)
        except DomainError:
            return LocalBound.of(second)
        if lo <= 0:
            raise DomainError("root isolation too coarse to bound sigma(R_P)")
        val = -mpmath.log((lo + hi) / 2)
        tol = mpmath.log(hi) - mpmath.log(lo) + mpf(2) ** (4 - working_precision())
        inv_sigma = LogReal(val, tol)
        sec = pp_log(second)
        if sec.value >= inv_sigma.value + inv_sigma.tol:
            return LocalBound.of(second)
        if inv_sigma.value >= sec.value + sec.tol:
            return LocalBound(inv_sigma, None)
        return LocalBound(LogReal(max(sec.value, inv_sigma.value), max(sec.tol, inv_sigma.tol) * 2), None)
    c = Fraction(c_factor(v, n)) ** ee
    second = ((Pn, Fraction(n)),)
    if mode == "coefficient":
        first = ((c * _poly_norm(data.R_over_gamma, v), Fraction(1)),)
    else:
        inv = _root_inverse_sigma_padic(data.R, v.p)
        if inv is None:
            return LocalBound.of(second)
        first = ((c, Fraction(1)),) + inv
    return LocalBound.of(pp_max(first, second))


def local_divisor(data: DivisorData, v: Place, mode: str = "coefficient") -> tuple[LocalBound | None, LocalBound]:
    """(A'_v, A_v).  A'_v is None for the A0 variants (the prefactor depends on the branch)."""
    if mode not in DIVISOR_MODES:
        raise DomainError(f"unknown divisor mode {mode!r}")
    inner = _inner(data, v, mode)
    Pn = _poly_norm(data.P_norm, v)
    variant = data.variant
    if variant in ("regular", "general"):
        Ap = ((Fraction(3) * Pn, Fraction(1)),) if v.is_infinite else ((Pn, Fraction(1)),)
        return LocalBound.of(Ap), inner
    # A0 variants: an extra |P| factor (8|P| at infinity), to the power e in the general case
    ee = data.e if variant == "a0general" else 1
    factor = ((Fraction(8) * Pn if v.is_infinite else Pn, Fraction(ee)),)
    if inner.exact is not None:
        return None, LocalBound.of(factor + inner.exact)
    return None, LocalBound(inner.log + pp_log(factor), None)


def support_places(data: DivisorData) -> list[Place]:
    """Every place where A_v or A'_v may exceed 1."""
    dens = [as_fraction(c).denominator for c in data.P_norm.terms.values()]
    dens += [as_fraction(c).denominator for c in data.R_over_gamma.coeffs if c != 0]
    primes = set(primes_up_to(data.n))
    for d in set(dens):
        if d > 1:
            primes.update(factorize(d))
    return [INFINITE] + [Place(p) for p in sorted(primes)]


def finite_divisor_exact(P: BiPoly, p: int, e: int, kappa: int) -> tuple[Fraction, Fraction]:
    """Exact (A'_p, A_p) of the general-variant coefficient divisor."""
    data = prepare(P, e, kappa, "general")
    Ap, A = local_divisor(data, Place(p))
    out = []
    for b in (Ap, A):
        pp = b.exact
        val = Fraction(1)
        for base, x in pp:
            if Fraction(x).denominator != 1:
                raise DomainError("non-rational local value")
            val *= Fraction(base) ** int(x)
        out.append(val)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# certificates

@dataclass
class Failure:
    place: Place
    k: int
    lhs: LogReal
    rhs: LogReal


@dataclass
class VerificationReport:
    checked_places: list[Place] = field(default_factory=list)
    max_k: int = -1
    failures: list[Failure] = field(default_factory=list)
    slack_min: LogReal = field(default_factory=lambda: LogReal(None))
    tight: dict = field(default_factory=dict)  # Place -> list of k with exact equality
    checks: int = 0
    slack_by_place: dict = field(default_factory=dict)  # Place -> {k: LogReal}

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class EisensteinCertificate:
    data: DivisorData
    normalization: NormalizationRecord
    divisor_A: MDivisor
    divisor_Aprime: MDivisor | None
    e: int
    kappa: int
    variant: str
    mode: str
    h_P: LogReal
    h_A: LogReal
    h_Aprime: LogReal | None
    theorem_bound: LogReal
    aprime_bound: LogReal | None
    verification: VerificationReport | None = None

    @property
    def bound_holds(self) -> bool:
        ok = self.h_A.le(self.theorem_bound)
        if self.h_Aprime is not None:
            ok = ok and self.h_Aprime.le(self.aprime_bound)
        return ok

    @property
    def slack(self) -> LogReal:
        return self.theorem_bound - self.h_A

    def exponent(self, k: int) -> Fraction:
        """k/e - floor(kappa/e) (just k in the regular variants)."""
        return Fraction(k, self.e) - self.data.k


def theorem_height_bound(h_P: LogReal, m: int, n: int, e: int, variant: str) -> LogReal:
    """Right-hand side of the height estimate for h(A)."""
    variant = _check_variant(variant)
    if m < 1 or n < 1 or e < 1:
        raise DomainError("theorem bound needs m, n, e >= 1")
    lmn = LogReal.log(m * n).scale(3 * n)
    if variant == "regular":
        return h_P.scale(3 * n - 1) + lmn + 7 * n
    if variant == "general":
        return h_P.scale(3 * n - 1) + lmn + 7 * e * n
    if variant == "a0regular":
        return h_P.scale(3 * n) + lmn + 10 * n
    return h_P.scale(3 * n + e - 1) + lmn + 10 * e * n


def aprime_height_bound(h_P: LogReal) -> LogReal:
    return h_P + LogReal.log(3)


def global_divisor(
    P: BiPoly, e: int = 1, kappa: int = 0, variant: str = "regular", mode: str = "coefficient"
) -> EisensteinCertificate:
    data = prepare(P, e, kappa, variant)
    A: dict = {}
    Ap: dict = {}
    for v in support_places(data):
        aprime, a = local_divisor(data, v, mode)
        if not a.is_one():
            A[v] = a
        if aprime is not None and not aprime.is_one():
            Ap[v] = aprime
    dA = MDivisor(A)
    dAp = None if data.variant.startswith("a0") else MDivisor(Ap)
    hP = height_poly(data.P)
    m_eff = max(data.m, 1)
    bound = theorem_height_bound(hP, m_eff, data.n, e, data.variant)
    return EisensteinCertificate(
        data=data,
        normalization=data.record,
        divisor_A=dA,
        divisor_Aprime=dAp,
        e=e,
        kappa=kappa,
        variant=data.variant,
        mode=mode,
        h_P=hP,
        h_A=dA.height(),
        h_Aprime=None if dAp is None else dAp.height(),
        theorem_bound=bound,
        aprime_bound=None if dAp is None else aprime_height_bound(hP),
    )


def certificate_for_branch(P: BiPoly, branch, variant: str = "general", mode: str = "coefficient"):
    return global_divisor(P, branch.e, branch.kappa, variant, mode)


# ---------------------------------------------------------------------------
# verification

def _coeff_denominator(c) -> int:
    """An integer whose prime divisors include every p with |c|_p > 1 for some extension."""
    if isinstance(c, AlgNum):
        q = c.as_rational()
        if q is None:
            cp = char_poly(c)
            return lcm(*(as_fraction(x).denominator for x in cp.coeffs))
        c = q
    return as_fraction(c).denominator


def _prefactor(cert: EisensteinCertificate, branch, v: Place):
    """max{1, |a_idx|_v} for the A0 variants, as (power product or None, LogReal)."""
    idx = 0 if cert.variant == "a0regular" else cert.e * cert.data.k
    try:
        c = branch.coefficient(idx)
    except DomainError:
        c = 0
    if c == 0:
        return (), LogReal.zero()
    return _abs_max(c, v)


def _abs_max(c, v: Place):
    """(exact power product or None, LogReal) of max over extensions |c|_v."""
    if isinstance(c, AlgNum):
        q = c.as_rational()
    else:
        q = as_fraction(c)
    if q is not None:
        a = abs_exact(q, v)
        return ((a, Fraction(1)),), LogReal.log(a)
    if not v.is_infinite:
        rho = padic_norm_exponent(c, v.p)
        return ((Fraction(v.p), rho),), LogReal.log_prime_power(v.p, rho)
    norms = archimedean_norms(c)
    val, err = max(norms, key=lambda t: t[0])
    err = max(e for _, e in norms)
    return None, LogReal(mpmath.log(val), err / (val - err))


def verify_bounds(cert: EisensteinCertificate, branch, keep_slacks: bool = False) -> VerificationReport:
    """Check |a_k|_v <= A'_v A_v^x for every stored coefficient and relevant place."""
    rep = VerificationReport()
    items = [(k, c) for k, c in branch.items() if c != 0]
    rep.max_k = branch.kappa + len(branch.coeffs) - 1 if branch.coeffs else -1
    places = set(cert.divisor_A.support)
    if cert.divisor_Aprime is not None:
        places |= set(cert.divisor_Aprime.support)
    places.add(INFINITE)
    support_primes = {v.p for v in places if not v.is_infinite}
    # any prime outside the support where a coefficient is large is a failure (A_v = A'_v = 1)
    extra = set()
    for _, c in items:
        d = _coeff_denominator(c)
        for p in support_primes:
            while d % p == 0:
                d //= p
        if d > 1:
            extra.update(factorize(d))
    places |= {Place(p) for p in extra}
    rep.checked_places = sorted(places)
    slack_min = None
    for v in rep.checked_places:
        A = cert.divisor_A.value(v)
        if cert.divisor_Aprime is not None:
            pre_exact, pre_log = cert.divisor_Aprime.value(v).exact, cert.divisor_Aprime.value(v).log
        else:
            pre_exact, pre_log = _prefactor(cert, branch, v)
            if pre_exact is not None:
                pre_exact = pp_max((), pre_exact)
            pre_log = LogReal(max(pre_log.value, mpf(0)), pre_log.tol)
        tight = []
        slacks = {}
        for k, c in items:
            x = cert.exponent(k)
            lhs_exact, lhs_log = _abs_max(c, v)
            rhs_log = pre_log + A.log.scale(x)
            slack = rhs_log - lhs_log
            rep.checks += 1
            if lhs_exact is not None and A.exact is not None and pre_exact is not None:
                rhs_exact = tuple(pre_exact) + tuple((b, y * x) for b, y in A.exact)
                ok = pp_le(lhs_exact, rhs_exact)
                if ok and pp_le(rhs_exact, lhs_exact):
                    tight.append(k)
                    slack = LogReal.zero()
            else:
                ok = lhs_log.le(rhs_log)
            if not ok:
                rep.failures.append(Failure(v, k, lhs_log, rhs_log))
            if keep_slacks:
                slacks[k] = slack
            if slack_min is None or slack.value < slack_min.value:
                slack_min = slack
        rep.tight[v] = tight
        if keep_slacks:
            rep.slack_by_place[v] = slacks
    rep.failures.sort(key=lambda f: (f.place.sort_key(), f.k))
    rep.slack_min = slack_min if slack_min is not None else LogReal(None)
    cert.verification = rep
    return rep


# ---------------------------------------------------------------------------
# exceptional set

@dataclass
class ExceptionalReport:
    bound: LogReal
    observed: list[Place]
    observed_height: LogReal
    K: int
    complete_branches: bool

    @property
    def holds(self) -> bool:
        return self.observed_height.le(self.bound)


def exceptional_bound(h_P: LogReal, m: int, n: int) -> LogReal:
    """3n (h(P) + log(mn) + 1)."""
    return (h_P + LogReal.log(max(m, 1) * n) + 1).scale(3 * n)


def exceptional_set_bound(P: BiPoly, branches) -> ExceptionalReport:
    P = P.strip_z()
    bound = exceptional_bound(height_poly(P), P.m, P.n)
    den = 1
    for b in branches.branches:
        for _, c in b.items():
            if c != 0:
                den = lcm(den, _coeff_denominator(c))
    observed = []
    if den > 1:
        for p in factorize(den):
            v = Place(p)
            if any(c != 0 and _abs_max(c, v)[1].value > 0 for b in branches.branches for _, c in b.items()):
                observed.append(v)
    h = lr_sum(LogReal.log(v.p) for v in observed)
    K = min((b.K for b in branches.branches), default=0)
    return ExceptionalReport(bound, observed, h, K, branches.completeness_flag)


# ---------------------------------------------------------------------------
# prime sum used in the height estimate

@dataclass
class PrimeSumReport:
    n_max: int
    failures: list[int]
    min_slack: float
    worst_n: int


def prime_sum_c(n: int) -> LogReal:
    """sum_{p <= n} log c(p, n) = pi(n) log n + theta(n)."""
    ps = primes_up_to(n)
    return lr_sum(LogReal.log(n * p) for p in ps)


def prime_sum_check(n_max: int = 10**4, ratio: Fraction = Fraction(23, 10)) -> PrimeSumReport:
    """Check sum_{p<=n} log(np) <= ratio * n for every 1 <= n <= n_max."""
    ps = primes_up_to(n_max)
    r = mpf(ratio.numerator) / ratio.denominator
    theta = mpf(0)
    count = 0
    idx = 0
    failures = []
    worst = None
    worst_n = 0
    tol = mpf(2) ** (10 - working_precision())
    for n in range(1, n_max + 1):
        while idx < len(ps) and ps[idx] <= n:
            theta += mpmath.log(ps[idx])
            count += 1
            idx += 1
        total = count * mpmath.log(n) + theta if count else mpf(0)
        slack = r * n - total
        if slack < -tol * (n + 1):
            failures.append(n)
        if worst is None or slack < worst:
            worst, worst_n = slack, n
    return PrimeSumReport(n_max, failures, float(worst), worst_n)


# ---------------------------------------------------------------------------
# serialization

def fmt_log(x: LogReal, digits: int = 25) -> dict:
    if x.is_neg_inf:
        return {"value": "-inf", "tol": "0"}
    return {"value": mpmath.nstr(x.value, digits), "tol": mpmath.nstr(x.tol, 3)}


def certificate_to_dict(cert: EisensteinCertificate) -> dict:
    places = set(cert.divisor_A.support)
    if cert.divisor_Aprime is not None:
        places |= set(cert.divisor_Aprime.support)
    places.add(INFINITE)
    divisor = []
    for v in sorted(places):
        a = cert.divisor_A.value(v)
        entry = {"place": str(v), "logA": fmt_log(a.log)}
        if a.exact is not None:
            entry["A"] = pp_str(a.exact)
        if cert.divisor_Aprime is not None:
            ap = cert.divisor_Aprime.value(v)
            entry["logAprime"] = fmt_log(ap.log)
            if ap.exact is not None:
                entry["Aprime"] = pp_str(ap.exact)
        else:
            entry["logAprime"] = None
        divisor.append(entry)
    out = {
        "variant": cert.variant,
        "divisor_mode": cert.mode,
        "e": cert.e,
        "kappa": cert.kappa,
        "normalization": cert.normalization.as_dict(),
        "divisor": divisor,
        "heights": {
            "hP": fmt_log(cert.h_P),
            "hA": fmt_log(cert.h_A),
            "hAprime": None if cert.h_Aprime is None else fmt_log(cert.h_Aprime),
        },
        "theorem_bound": {
            "hA": fmt_log(cert.theorem_bound),
            "hAprime": None if cert.aprime_bound is None else fmt_log(cert.aprime_bound),
            "slack": fmt_log(cert.slack),
            "holds": cert.bound_holds,
        },
    }
    rep = cert.verification
    if rep is not None:
        out["verification"] = {
            "max_k": rep.max_k,
            "checked_places": [str(v) for v in rep.checked_places],
            "checks": rep.checks,
            "failures": [
                {"place": str(f.place), "k": f.k, "lhs": fmt_log(f.lhs), "rhs": fmt_log(f.rhs)}
                for f in rep.failures
            ],
            "slack_min": fmt_log(rep.slack_min),
        }
    else:
        out["verification"] = None
    return out
