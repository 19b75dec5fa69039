"""Fields generated by branch coefficients: the lambda chain and discriminant bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import LogReal, as_fraction, factorize
from .errors import DomainError, FieldError, PreconditionError
from .numberfield import AlgNum, NumberField, height_algnum, min_poly
from .poly import BiPoly, UniPoly, discriminant_w, height_poly
from .puiseux import BranchSet, PuiseuxSeries, Unresolved, ord_z_of_series_composition

DISC_VARIANTS = ("integral", "friendly", "general", "general-friendly")


# ---------------------------------------------------------------------------
# subfields generated by coefficients

class _Subalgebra:
    """Q-span of an algebra inside F, kept in echelon form."""

    def __init__(self, F: NumberField):
        self.F = F
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []
        self.add(F.one())

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _reduce(self, v: list[Fraction]) -> list[Fraction]:
        v = list(v)
        for row, piv in zip(self.rows, self.pivots):
            if v[piv] != 0:
                f = v[piv] / row[piv]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def add(self, x: AlgNum) -> bool:
        v = self._reduce(x.coords)
        for i, c in enumerate(v):
            if c != 0:
                self.rows.append(v)
                self.pivots.append(i)
                return True
        return False

    def basis(self) -> list[AlgNum]:
        return [AlgNum(self.F, tuple(r)) for r in self.rows]

    def adjoin(self, a: AlgNum) -> None:
        """Replace the algebra by the one generated together with a."""
        if self._reduce(a.coords) == [0] * self.F.degree:
            return
        frontier = self.basis()
        while True:
            grew = False
            nxt = []
            for b in frontier:
                prod = b * a
                if self.add(prod):
                    grew = True
                    nxt.append(prod)
            if not grew:
                break
            frontier = nxt
        # close under products of basis elements (the span of V a^i is already closed)


@dataclass
class LambdaChain:
    degrees: list[int]  # lambda_0, lambda_1, ... (lambda_k = [L : Lambda_k])
    resolved_up_to: int
    resolved: bool
    field_degree: int  # [L : Q]
    subfield_degrees: list[int] = field(default_factory=list)  # [Lambda_k : Q]

    def __getitem__(self, k: int) -> int:
        if k < len(self.degrees):
            return self.degrees[k]
        return 1


def lambda_chain(branch: PuiseuxSeries) -> LambdaChain:
    """lambda_k = [L : Q(a_0, ..., a_{k-1})] for the stored coefficients.

    L is taken to be the field generated by the stored coefficients; the chain
    is marked resolved when that field is the whole declared field, when the
    branch is exact, or when the declared field is Q.
    """
    F = branch.field
    if not F.verified and F.degree > 1:
        raise FieldError("declared field is not certified irreducible; subfield degrees unavailable")
    sub = _Subalgebra(F)
    dims = [1]
    top = max(branch.K, branch.kappa)
    for k in range(0, top + 1):
        a = branch.coefficient(k) if k >= branch.kappa else F.zero()
        if not isinstance(a, AlgNum):
            a = F(a)
        if a.as_rational() is None:
            sub.adjoin(a)
        dims.append(sub.dim)
    L = dims[-1]
    resolved = branch.exact or F.degree == 1 or L == F.degree
    return LambdaChain([L // d for d in dims], top, resolved, L, dims)


def check_lsum(branch: PuiseuxSeries, chain: LambdaChain, P: BiPoly):
    """sum_k (k/e)(lambda_k - lambda_{k+1}) <= ord_z P'_w(z, f(z)); bool or Unresolved."""
    if branch.kappa < 0:
        raise PreconditionError("the lambda-sum inequality concerns branches without a pole")
    if not chain.resolved:
        return Unresolved(chain.resolved_up_to, "lambda chain not resolved")
    rhs = ord_z_of_series_composition(P.derivative_w(), branch)
    if isinstance(rhs, Unresolved):
        return rhs
    return lsum_lhs(chain, branch.e) <= rhs


def lsum_lhs(chain: LambdaChain, e: int) -> Fraction:
    total = Fraction(0)
    for k in range(len(chain.degrees) - 1):
        total += Fraction(k, e) * (chain.degrees[k] - chain.degrees[k + 1])
    return total


# ---------------------------------------------------------------------------
# exact discriminants in degree <= 2

def _squarefree_kernel(n: int) -> int:
    if n == 0:
        raise DomainError("zero discriminant")
    out = -1 if n < 0 else 1
    for p, k in factorize(abs(n)).items():
        if k % 2:
            out *= p
    return out


def quadratic_field_discriminant(poly: UniPoly) -> int:
    """Discriminant of Q(alpha) for an irreducible quadratic with root alpha."""
    if poly.degree != 2:
        raise DomainError("not a quadratic")
    a, b, c = (as_fraction(poly[i]) for i in (2, 1, 0))
    D = b * b - 4 * a * c
    d = _squarefree_kernel(D.numerator * D.denominator)
    if d == 1:
        raise DomainError("polynomial is reducible over Q")
    return d if d % 4 == 1 else 4 * d


def actual_partial_discriminant(F: NumberField) -> LogReal:
    """log |disc(F)| / [F : Q] for fields of degree at most 2."""
    if F.degree == 1:
        return LogReal.zero()
    if F.degree == 2:
        return LogReal.log(abs(quadratic_field_discriminant(F.modulus))).scale(Fraction(1, 2))
    raise DomainError("exact discriminants are only supported in degree <= 2")


def branch_field_discriminant(branch: PuiseuxSeries, chain: LambdaChain | None = None) -> LogReal | None:
    """Actual partial discriminant of the field generated by the coefficients, if degree <= 2."""
    chain = chain or lambda_chain(branch)
    if not chain.resolved:
        return None
    if chain.field_degree == 1:
        return LogReal.zero()
    if chain.field_degree != 2:
        return None
    for _, c in branch.items():
        if isinstance(c, AlgNum) and c.as_rational() is None:
            mp = min_poly(c)
            if mp.degree == 2:
                d = quadratic_field_discriminant(mp)
                return LogReal.log(abs(d)).scale(Fraction(1, 2))
    return None


def silverman_bound(a: AlgNum) -> LogReal:
    """2 (nu - 1) h(a) + log nu with nu = [Q(a) : Q]."""
    q = a.as_rational() if isinstance(a, AlgNum) else as_fraction(a)
    nu = 1 if q is not None else min_poly(a).degree
    h = height_algnum(a) if isinstance(a, AlgNum) else LogReal.log(max(abs(q.numerator), q.denominator))
    return h.scale(2 * (nu - 1)) + LogReal.log(nu)


# ---------------------------------------------------------------------------
# bounds

@dataclass
class DiscriminantReport:
    formula_used: str
    bound_sum: LogReal
    bound_per_branch: list[LogReal]
    stated_per_branch: list[LogReal]
    actual: list[LogReal | None]
    actual_sum: LogReal | None
    inputs: dict
    nu_source: list[str]
    lsum: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        ok = all(a is None or a.le(b) for a, b in zip(self.actual, self.bound_per_branch))
        if self.actual_sum is not None:
            ok = ok and self.actual_sum.le(self.bound_sum)
        return ok


def _log(x) -> LogReal:
    return LogReal.log(x)


def _ord_D(P: BiPoly) -> int:
    D = discriminant_w(P)
    return D.order()


def discriminant_bound(P: BiPoly, branches: BranchSet, variant: str = "friendly") -> DiscriminantReport:
    variant = variant.lower()
    if variant not in DISC_VARIANTS:
        raise DomainError(f"unknown discriminant variant {variant!r}")
    P = P.strip_z()
    m, n = P.m, P.n
    if n < 1:
        raise DomainError("P must have positive w-degree")
    pn0 = P.w_coeffs()[n][0]
    if variant in ("integral", "friendly") and pn0 == 0:
        raise PreconditionError("p_n(0) = 0: the integral bounds do not apply; use the general variant")
    hP = height_poly(P)
    E = branches.max_e
    m_eff = max(m, 1)
    ordD = _ord_D(P)
    lmn = _log(m_eff * n)
    inputs = {"m": m, "n": n, "E": E, "h(P)": hP, "ord_z D": ordD}

    if variant == "integral":
        total = (hP + _log(n + 1)).scale(2 * (n - 1)) + (hP + lmn + 3 * E).scale((8 * n - 1) * ordD)
    elif variant == "friendly":
        total = (hP + lmn + 3 * E).scale(16 * m_eff * n * (n - 1))
    elif variant == "general":
        total = (hP + 4 * n).scale(2 * (n - 1)) + (hP + 5 * n + _log(m_eff)).scale((8 * n - 1) * ordD)
    else:
        total = (hP + 5 * n + _log(m_eff)).scale(16 * m_eff * n * (n - 1))

    per, stated, actual, nu_src, ords, lsums = [], [], [], [], [], []
    for b in branches.branches:
        try:
            chain = lambda_chain(b)
        except FieldError:
            chain = None
        if chain is not None and chain.resolved:
            nu, src = chain.field_degree, "lambda chain"
        else:
            nu, src = n, "upper bound n"
        nu_src.append(src)
        if pn0 != 0 and chain is not None:
            # every branch is a power series here, so the lambda-sum inequality applies
            lsums.append(check_lsum(b, chain, P))
        act = branch_field_discriminant(b, chain) if chain is not None else None
        actual.append(act)
        if variant == "integral":
            ordf = ord_z_of_series_composition(P.derivative_w(), b)
            if isinstance(ordf, Unresolved):
                raise UnresolvedOrder(ordf)
            ords.append(ordf)
            a0 = b.coefficient(0)
            ha0 = height_algnum(a0) if isinstance(a0, AlgNum) else LogReal.log(max(abs(as_fraction(a0).numerator), as_fraction(a0).denominator))
            s = ha0.scale(2 * (nu - 1)) + (hP + lmn + 3 * b.e).scale((8 * n - 1) * ordf)
            stated.append(s)
            # the estimate carries log nu from the Silverman step
            per.append(s + _log(nu))
        elif variant == "general-friendly":
            s = total.scale(Fraction(2, nu))
            stated.append(s)
            per.append(s)
        else:
            s = total.scale(Fraction(1, nu))
            stated.append(s)
            per.append(s)
    if ords:
        inputs["ord_z P'_w(z,f)"] = ords
    actual_sum = None
    if branches.completeness_flag and all(b.e == 1 for b in branches.branches) and all(
        a is not None for a in actual
    ):
        actual_sum = sum(actual[1:], actual[0]) if actual else LogReal.zero()
    return DiscriminantReport(variant, total, per, stated, actual, actual_sum, inputs, nu_src, lsums)


class UnresolvedOrder(Exception):
    def __init__(self, value: Unresolved):
        super().__init__(f"ord_z P'_w(z, f) is unresolved at K={value.K}; increase --terms")
        self.value = value
