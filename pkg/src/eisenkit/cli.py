"""Command-line front end: ``eisenkit <command> POLY [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath

from . import __version__
from .arith import INFINITE, LogReal, set_precision
from .discbounds import DISC_VARIANTS, UnresolvedOrder, discriminant_bound, lambda_chain, lsum_lhs
from .eisenstein import (
    DIVISOR_MODES,
    VARIANTS,
    certificate_for_branch,
    certificate_to_dict,
    exceptional_set_bound,
    fmt_log,
    global_divisor,
    verify_bounds,
)
from .errors import EisenkitError, FieldError, ParseError, PreconditionError, TheoremViolation
from .lemmas import check_polynomial
from .numberfield import NumberField
from .parse import format_bipoly, format_unipoly, parse_bipoly
from .poly import BiPoly, height_poly, squarefree_part_w
from .puiseux import BranchSet, Unresolved, puiseux_branches

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_UNRESOLVED, EXIT_VIOLATION = 0, 2, 3, 4, 5

COMMANDS = ("expand", "bounds", "verify", "exceptional", "disc", "lemmas")


class Unresolvable(EisenkitError):
    """A requested quantity needs more terms than were computed."""


@dataclass(frozen=True)
class JobConfig:
    polynomial: str
    field: str | None = None
    terms: int = 128
    precision_bits: int = 128
    variant: str | None = None
    divisor_mode: str = "coefficient"
    squarefree: bool = False
    output: str = "text"
    alpha: str = "1"

    def validate(self) -> None:
        if self.terms < 1:
            raise PreconditionError("--terms must be at least 1")
        if self.precision_bits < 64:
            raise PreconditionError("--precision must be at least 64 bits")


# ---------------------------------------------------------------------------
# helpers

def _log_json(x: LogReal | None):
    return None if x is None else fmt_log(x)


def _num(x: LogReal) -> str:
    return "-inf" if x.is_neg_inf else mpmath.nstr(x.value, 12)


def _load(config: JobConfig) -> tuple[BiPoly, NumberField]:
    P = parse_bipoly(config.polynomial)
    if P.is_zero():
        raise ParseError("the zero polynomial has no branches")
    if config.squarefree:
        P = squarefree_part_w(P)
    F = NumberField.from_text(config.field) if config.field else NumberField.rationals()
    return P, F


def _branches(P: BiPoly, F: NumberField, K: int) -> BranchSet:
    return puiseux_branches(P, F, K=K)


def _coeff_str(c) -> str:
    return str(c)


def _branch_dict(b, count: int = 8) -> dict:
    return {
        "e": b.e,
        "kappa": b.kappa,
        "leading_exponent": str(b.leading_exponent()),
        "multiplicity": b.multiplicity,
        "exact": b.exact,
        "K": b.K,
        "coefficients": [[k, _coeff_str(c)] for k, c in b.items()[:count]],
    }


# ---------------------------------------------------------------------------
# commands; each returns (payload, text lines, exit code)

def cmd_expand(config: JobConfig):
    P, F = _load(config)
    bs = _branches(P, F, config.terms)
    payload = {
        "polynomial": format_bipoly(P),
        "field": format_unipoly(F.modulus) if F.degree > 1 else None,
        "complete": bs.completeness_flag,
        "branches": [_branch_dict(b) for b in bs.branches],
        "unrealized": [
            {
                "char_poly": format_unipoly(u.char_poly),
                "e_lower": u.e_lower,
                "leading_exponent": str(u.leading_exponent),
                "count": u.count,
            }
            for u in bs.unrealized
        ],
    }
    lines = [f"P = {payload['polynomial']}   ({len(bs.branches)} realized cycle(s), complete: {bs.completeness_flag})"]
    for i, b in enumerate(bs.branches):
        lines.append(f"  branch {i}: e={b.e} kappa={b.kappa} mult={b.multiplicity}  f = {b.describe()}")
    for u in bs.unrealized:
        lines.append(
            f"  unrealized: {u.count} branch(es), char poly {format_unipoly(u.char_poly)},"
            f" e >= {u.e_lower}, leading exponent {u.leading_exponent}"
        )
    return payload, lines, EXIT_OK


def _certificates(config: JobConfig, P: BiPoly, F: NumberField, with_branches: bool):
    """(certificate, branch or None) pairs for the requested variant."""
    variant = config.variant
    if variant is not None and variant not in VARIANTS:
        raise PreconditionError(f"variant must be one of {', '.join(VARIANTS)}")
    if not with_branches and variant in (None, "regular", "a0regular"):
        cert = global_divisor(P, 1, 0, variant or "regular", config.divisor_mode)
        return [(cert, None)], None
    bs = _branches(P, F, config.terms)
    out = []
    for b in bs.branches:
        if b.is_zero:
            continue
        v = variant
        if v is None:
            v = "regular" if b.e == 1 and b.kappa >= 0 else "general"
        out.append((certificate_for_branch(P, b, v, config.divisor_mode), b))
    return out, bs


def _comparison(P: BiPoly) -> dict:
    """Leading term of the classical bound (valid only together with A^(m+k)), for side-by-side output."""
    Ps = P.strip_z()
    h = height_poly(Ps)
    return {"classical_leading_term": fmt_log(h.scale(2 * Ps.n - 1)), "note": "(2n-1)h(P) + O(n log(2mn)), exponent m+k"}


def cmd_bounds(config: JobConfig):
    P, F = _load(config)
    pairs, _ = _certificates(config, P, F, with_branches=False)
    certs, lines, code = [], [], EXIT_OK
    for cert, b in pairs:
        d = certificate_to_dict(cert)
        if b is not None:
            d["branch"] = _branch_dict(b, 4)
        certs.append(d)
        verdict = "PASS" if cert.bound_holds else "FAIL"
        lines.append(f"variant {cert.variant} (e={cert.e}, kappa={cert.kappa}, mode {cert.mode})")
        for entry in d["divisor"]:
            a = entry.get("A", _num_entry(entry["logA"]))
            ap = entry.get("Aprime", "-" if entry["logAprime"] is None else _num_entry(entry["logAprime"]))
            lines.append(f"  {entry['place']:>6}: A' = {ap}   A = {a}")
        lines.append(
            f"  h(A) = {_num(cert.h_A)} <= {_num(cert.theorem_bound)}  slack {_num(cert.slack)}  {verdict}"
        )
        if cert.h_Aprime is not None:
            lines.append(f"  h(A') = {_num(cert.h_Aprime)} <= {_num(cert.aprime_bound)}")
        if not cert.bound_holds:
            code = EXIT_VIOLATION
    comp = _comparison(P)
    lines.append(f"  classical bound for comparison: {comp['note']}, leading term {comp['classical_leading_term']['value'][:14]}")
    return {"polynomial": format_bipoly(P), "certificates": certs, "comparison": comp}, lines, code


def _num_entry(d: dict) -> str:
    return "exp(" + d["value"][:14] + ")"


def cmd_verify(config: JobConfig):
    P, F = _load(config)
    pairs, bs = _certificates(config, P, F, with_branches=True)
    certs, lines, code = [], [], EXIT_OK
    for cert, b in pairs:
        rep = verify_bounds(cert, b)
        cert.verification = rep
        d = certificate_to_dict(cert)
        d["branch"] = _branch_dict(b, 4)
        certs.append(d)
        lines.append(
            f"branch e={b.e} kappa={b.kappa} [{cert.variant}]: {rep.checks} checks up to k={rep.max_k},"
            f" {len(rep.failures)} failure(s), min slack {_num(rep.slack_min)}"
        )
        for f in rep.failures[:10]:
            lines.append(f"  FAIL at {f.place}, k={f.k}: {_num(f.lhs)} > {_num(f.rhs)}")
        if rep.failures or not cert.bound_holds:
            code = EXIT_VIOLATION
    if bs is not None and bs.unrealized:
        lines.append(f"  {sum(u.count for u in bs.unrealized)} branch(es) not realized over the declared field; not verified")
    payload = {
        "polynomial": format_bipoly(P),
        "certificates": certs,
        "unrealized": sum(u.count for u in bs.unrealized) if bs else 0,
    }
    return payload, lines, code


def cmd_exceptional(config: JobConfig):
    P, F = _load(config)
    bs = _branches(P, F, config.terms)
    rep = exceptional_set_bound(P, bs)
    payload = {
        "polynomial": format_bipoly(P),
        "observed": [str(v) for v in rep.observed],
        "observed_height": fmt_log(rep.observed_height),
        "bound": fmt_log(rep.bound),
        "K": rep.K,
        "complete": rep.complete_branches,
        "holds": rep.holds,
    }
    obs = "{" + ", ".join(payload["observed"]) + "}"
    lines = [
        f"observed S = {obs} (K={rep.K}, complete: {rep.complete_branches})",
        f"h(S) = {_num(rep.observed_height)} <= {_num(rep.bound)}  {'PASS' if rep.holds else 'FAIL'}",
    ]
    return payload, lines, EXIT_OK if rep.holds else EXIT_VIOLATION


def cmd_disc(config: JobConfig):
    P, F = _load(config)
    variant = config.variant
    if variant is None:
        pn0 = P.strip_z().w_coeffs()[P.n][0]
        variant = "friendly" if pn0 != 0 else "general-friendly"
    if variant not in DISC_VARIANTS:
        raise PreconditionError(f"disc variant must be one of {', '.join(DISC_VARIANTS)}")
    bs = _branches(P, F, config.terms)
    try:
        rep = discriminant_bound(P, bs, variant)
    except UnresolvedOrder as exc:
        raise Unresolvable(str(exc)) from exc
    code = EXIT_OK if rep.holds else EXIT_VIOLATION
    lsum = []
    for b, res in zip(bs.branches, rep.lsum):
        if isinstance(res, Unresolved):
            lsum.append("unresolved")
            code = max(code, EXIT_UNRESOLVED) if code != EXIT_VIOLATION else code
        else:
            lsum.append(bool(res))
            if not res:
                code = EXIT_VIOLATION
    inputs = {k: (fmt_log(v) if isinstance(v, LogReal) else [str(x) for x in v] if isinstance(v, list) else v)
              for k, v in rep.inputs.items()}
    payload = {
        "polynomial": format_bipoly(P),
        "formula_used": rep.formula_used,
        "bound_sum": fmt_log(rep.bound_sum),
        "bound_per_branch": [fmt_log(x) for x in rep.bound_per_branch],
        "stated_per_branch": [fmt_log(x) for x in rep.stated_per_branch],
        "actual": [_log_json(x) for x in rep.actual],
        "actual_sum": _log_json(rep.actual_sum),
        "nu_source": rep.nu_source,
        "lsum": lsum,
        "inputs": inputs,
        "holds": rep.holds,
    }
    lines = [f"formula {rep.formula_used}: sum bound {_num(rep.bound_sum)}"]
    for i, b in enumerate(bs.branches):
        act = rep.actual[i]
        lines.append(
            f"  branch {i} (e={b.e}, kappa={b.kappa}): actual {'n/a' if act is None else _num(act)}"
            f" <= bound {_num(rep.bound_per_branch[i])}   [nu from {rep.nu_source[i]}]"
        )
        if i < len(lsum):
            lines.append(f"    lambda-sum check: {lsum[i]}")
    if rep.actual_sum is not None:
        lines.append(f"  sum of actual: {_num(rep.actual_sum)}")
    lines.append("PASS" if rep.holds else "FAIL")
    return payload, lines, code


def cmd_lemmas(config: JobConfig):
    P, F = _load(config)
    results = check_polynomial(P, Fraction(config.alpha), F)
    bad = [r for r in results if not r.holds]
    payload = {"polynomial": format_bipoly(P), "results": [r.as_dict() for r in results], "violations": len(bad)}
    lines = [
        f"{r.lemma:>12} {r.instance}: {_num(r.lhs)} <= {_num(r.rhs)}  {'ok' if r.holds else 'VIOLATED'}" for r in results
    ]
    lines.append(f"{len(results)} checks, {len(bad)} violation(s)")
    return payload, lines, EXIT_VIOLATION if bad else EXIT_OK


HANDLERS = {
    "expand": cmd_expand,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "exceptional": cmd_exceptional,
    "disc": cmd_disc,
    "lemmas": cmd_lemmas,
}


def run_job(command: str, config: JobConfig) -> tuple[dict, list[str], int]:
    """Run one job, mapping errors to exit codes; never raises for eisenkit errors."""
    try:
        config.validate()
        set_precision(config.precision_bits)
        payload, lines, code = HANDLERS[command](config)
    except (ParseError, FieldError) as exc:
        return {"error": str(exc), "kind": "parse"}, [f"error: {exc}"], EXIT_PARSE
    except PreconditionError as exc:
        return {"error": str(exc), "kind": "precondition"}, [f"error: {exc}"], EXIT_PRECONDITION
    except Unresolvable as exc:
        return {"error": str(exc), "kind": "unresolved"}, [f"unresolved: {exc}"], EXIT_UNRESOLVED
    except TheoremViolation as exc:
        return {"error": str(exc), "kind": "violation"}, [f"violation: {exc}"], EXIT_VIOLATION
    payload = {"command": command, "version": __version__, "exit_code": code, **payload}
    return payload, lines, code


# ---------------------------------------------------------------------------
# input handling

def parse_job_text(text: str, base: JobConfig) -> JobConfig:
    """A job is a polynomial, optionally followed by ``; field: ...`` or given as ``key: value`` lines."""
    fields: dict = {}
    parts = [p.strip() for chunk in text.splitlines() for p in chunk.split(";")]
    for part in parts:
        if not part or part.startswith("#"):
            continue
        key, sep, value = part.partition(":")
        key = key.strip().lower()
        if sep and key in ("poly", "polynomial", "p"):
            fields["polynomial"] = value.strip()
        elif sep and key == "field":
            fields["field"] = value.strip()
        elif sep and key in ("terms", "k"):
            fields["terms"] = int(value)
        elif sep and key == "variant":
            fields["variant"] = value.strip()
        elif sep:
            raise ParseError(f"unknown key {key!r} in job description")
        elif "polynomial" not in fields:
            fields["polynomial"] = part
        else:
            raise ParseError("more than one polynomial in a job")
    if "polynomial" not in fields:
        raise ParseError("job has no polynomial")
    return replace(base, **fields)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eisenkit", description="Explicit coefficient bounds for algebraic power series.")
    ap.add_argument("--version", action="version", version=f"eisenkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("polynomial", nargs="?", help="P(z, w), e.g. 'w^2 - z - 1'")
        p.add_argument("--input", help="read one job (key: value lines) from a file")
        p.add_argument("--batch", help="read one job per line from a file ('-' for stdin)")
        p.add_argument("--terms", "-K", type=int, default=128)
        p.add_argument("--precision", type=int, default=128, help="working precision in bits")
        p.add_argument("--variant", help=f"one of {', '.join(VARIANTS)}; for disc one of {', '.join(DISC_VARIANTS)}")
        p.add_argument("--divisor-mode", choices=DIVISOR_MODES, default="coefficient")
        p.add_argument("--squarefree", action="store_true", help="replace P by its w-squarefree part")
        p.add_argument("--field", help="monic integer modulus in x, e.g. 'x^2 - 2'")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if name == "lemmas":
            p.add_argument("--alpha", default="1", help="rational shift for the translation estimate")
    return ap


def _emit(payload: dict, lines: list[str], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    base = JobConfig(
        polynomial=args.polynomial or "",
        field=args.field,
        terms=args.terms,
        precision_bits=args.precision,
        variant=args.variant.lower() if args.variant else None,
        divisor_mode=args.divisor_mode,
        squarefree=args.squarefree,
        output=args.format,
        alpha=getattr(args, "alpha", "1"),
    )
    jobs: list = []
    try:
        if args.batch:
            stream = sys.stdin if args.batch == "-" else open(args.batch, encoding="utf-8")
            with stream:
                for line in stream:
                    if line.strip() and not line.lstrip().startswith("#"):
                        jobs.append(line)
        elif args.input:
            with open(args.input, encoding="utf-8") as fh:
                jobs.append(fh.read())
        elif args.polynomial:
            jobs.append(None)
        else:
            raise ParseError("no polynomial given (positional argument, --input or --batch)")
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    worst = EXIT_OK
    for job in jobs:
        try:
            config = base if job is None else parse_job_text(job, base)
        except (ParseError, ValueError) as exc:
            payload, lines, code = {"error": str(exc), "kind": "parse"}, [f"error: {exc}"], EXIT_PARSE
        else:
            payload, lines, code = run_job(args.command, config)
        _emit(payload, lines, args.format, sys.stdout if code == EXIT_OK or args.format == "json" else sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
