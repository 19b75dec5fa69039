"""Certified complex roots of rational polynomials.

Approximations come from simultaneous (Durand-Kerner) iteration; each is
then certified a posteriori: with Weierstrass corrections
``W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`` every root lies in the
union of the disks ``|z - z_i| <= deg * |W_i|``, and a disk disjoint from
the others contains exactly one root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf

from .arith import working_precision
from .errors import DomainError, RootFindingError
from .poly import UniPoly, yun_squarefree

MAX_PRECISION = 8192


@dataclass(frozen=True)
class CertifiedRoot:
    value: mpc
    radius: mpf
    multiplicity: int = 1

    @property
    def modulus_lower(self) -> mpf:
        return max(abs(self.value) - self.radius, mpf(0))

    @property
    def modulus_upper(self) -> mpf:
        return abs(self.value) + self.radius


def _to_mpf(c: Fraction) -> mpf:
    return mpf(c.numerator) / c.denominator


def _horner_with_bound(coeffs, z):
    """p(z) and a bound on its floating evaluation error."""
    acc = mpc(0)
    mag = mpf(0)
    az = abs(z)
    for c in reversed(coeffs):
        acc = acc * z + c
        mag = mag * az + abs(c)
    n = len(coeffs)
    err = mag * (4 * n + 4) * mpf(2) ** (-mpmath.mp.prec)
    return acc, err


def _isolate(coeffs: list[Fraction], tolerance) -> list[tuple[mpc, mpf]]:
    """Certified simple roots of a square-free polynomial (coefficients low -> high)."""
    deg = len(coeffs) - 1
    if deg < 1:
        return []
    base = working_precision()
    bits = base
    while bits <= MAX_PRECISION:
        with mpmath.workprec(bits):
            cs = [_to_mpf(c) for c in coeffs]
            if deg == 1:
                z = -cs[0] / cs[1]
                return [(mpc(z), abs(z) * mpf(2) ** (4 - bits) + mpf(2) ** (-bits))]
            try:
                approx = mpmath.polyroots(
                    list(reversed(cs)), maxsteps=200 + 20 * deg, extraprec=bits
                )
            except mpmath.libmp.NoConvergence:
                bits *= 2
                continue
            approx = [mpc(a) for a in approx]
            radii = []
            ok = True
            for i, zi in enumerate(approx):
                val, err = _horner_with_bound(cs, zi)
                denom = abs(cs[-1])
                for j, zj in enumerate(approx):
                    if j != i:
                        denom *= abs(zi - zj)
                if denom == 0:
                    ok = False
                    break
                radii.append(deg * (abs(val) + err) / denom * (1 + mpf(2) ** -30))
            if ok:
                for i in range(deg):
                    for j in range(i + 1, deg):
                        if abs(approx[i] - approx[j]) <= radii[i] + radii[j]:
                            ok = False
                if ok and all(r <= tolerance for r in radii):
                    return list(zip(approx, radii))
        bits *= 2
    raise RootFindingError(f"could not isolate the roots of a degree {deg} polynomial")


def complex_roots(R: UniPoly, tolerance=None) -> list[CertifiedRoot]:
    """All complex roots of R (over Q) with certified error radii.

    Multiple roots are listed once per multiplicity; the radius of a root of
    the square-free factor applies to each copy.
    """
    if R.is_zero():
        raise DomainError("roots of the zero polynomial")
    if tolerance is None:
        tolerance = mpf(2) ** (-(working_precision() // 2))
    tolerance = mpf(tolerance)
    out: list[CertifiedRoot] = []
    mu = R.order()
    if mu:
        out.extend(CertifiedRoot(mpc(0), mpf(0), mu) for _ in range(mu))
        R = R.shift(-mu)
    for factor, mult in yun_squarefree(R):
        for z, r in _isolate([Fraction(c) for c in factor.coeffs], tolerance):
            out.extend(CertifiedRoot(z, r, mult) for _ in range(mult))
    return out


def approximate_roots(coeffs: list, bits: int | None = None) -> list[mpc]:
    """Uncertified roots of a polynomial with complex coefficients (low -> high)."""
    cs = [mpc(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) < 2:
        return []
    bits = bits or working_precision()
    with mpmath.workprec(bits):
        if len(cs) == 2:
            return [-cs[0] / cs[1]]
        try:
            rts = mpmath.polyroots(
                list(reversed(cs)), maxsteps=400 + 40 * len(cs), extraprec=2 * bits
            )
        except mpmath.libmp.NoConvergence as exc:
            raise RootFindingError(str(exc)) from exc
        return [mpc(r) for r in rts]


def smallest_nonzero_root_modulus(R: UniPoly) -> tuple[mpf, mpf]:
    """sigma(R): (lower, upper) bounds for the smallest |alpha| over roots alpha != 0."""
    roots = [r for r in complex_roots(R) if r.value != 0 or r.radius != 0]
    if not roots:
        raise DomainError("polynomial has no nonzero root")
    lo = min(r.modulus_lower for r in roots)
    hi = min(r.modulus_upper for r in roots)
    return lo, hi
