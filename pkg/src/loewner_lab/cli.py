"""Command-line front end: ``loewner-lab {table,check,scan,counterexample,critexp}``.

Every command prints (or writes under ``--out``) a canonical JSON report
echoing the command line, parameters, seed and package version.

Exit codes: 0 when results agree with the closed-form classification,
2 when a disagreement (or an inconclusive experiment) is found, 1 for
usage and input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import constructions as cx
from .analysis import superadd_integral_residual
from .classifier import Cone, Membership, critical_exponent, power_set, table_rows
from .exceptions import InconclusiveError, LoewnerLabError, SearchFailure
from .io import canonical_json, write_json, write_matrix
from .linalg import DEFAULT_TOL, numeric_rank, pad_to
from .powers import PowerMap
from .properties import LoewnerProperty
from .verifier import check_property, empirical_critical_exponent, sample_pair, scan_alpha

EXIT_OK, EXIT_USAGE, EXIT_DISAGREE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with exit code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty integer list")
    return out


def _alpha_list(text: str) -> list[float]:
    """``0.25:5:0.25`` (start:stop:step, inclusive) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _power_map(text: str) -> PowerMap:
    try:
        return PowerMap.parse(text)
    except LoewnerLabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _property(text: str) -> LoewnerProperty:
    try:
        return LoewnerProperty.parse(text)
    except LoewnerLabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(args, record: dict) -> None:
    record = {
        "command": ["loewner-lab"] + list(args.argv),
        "version": __version__,
        "seed": getattr(args, "seed", None),
        **record,
    }
    if getattr(args, "out", None):
        out = Path(args.out)
        target = out if out.suffix == ".json" else out / f"{args.command}.json"
        write_json(target, record)
        print(f"wrote {target}")
    else:
        sys.stdout.write(canonical_json(record))


def _cone(args, family: str) -> Cone:
    return Cone(args.n, args.k if args.k is not None else args.n, "nonneg" if family == "plain" else "real")


# ---------------------------------------------------------------------------
# table


def _markdown_table(rows) -> str:
    lines = ["| property | family | n | k | set | critical exponent |", "|---|---|---|---|---|---|"]
    for r in rows:
        ce = "n/a" if r["critical_exponent"] is None else f"{r['critical_exponent']:g}"
        lines.append(f"| {r['property']} | {r['family']} | {r['n']} | {r['k']} | {r['set']} | {ce} |")
    return "\n".join(lines) + "\n"


def cmd_table(args) -> int:
    ks = args.k if args.k else sorted({k for n in args.n for k in range(1, n + 1)})
    props = args.property or [p.value for p in LoewnerProperty]
    rows = table_rows(args.n, ks, args.family or ["plain", "even", "odd"], props, args.blend_lambda)
    if args.format == "markdown":
        text = _markdown_table(rows)
        if args.out:
            out = Path(args.out)
            target = out if out.suffix == ".md" else out / "table.md"
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
            print(f"wrote {target}")
        else:
            sys.stdout.write(text)
    else:
        _emit(args, {"parameters": {"n": args.n, "k": ks, "properties": props}, "results": rows})
    return EXIT_OK


# ---------------------------------------------------------------------------
# check / scan / critexp


def _print_certificate(cert) -> None:
    err = sys.stderr
    print(f"violation ({cert.source.get('kind')}): x^T M x = {cert.quadratic_form_value:.6g}", file=err)
    for role, M in cert.matrices.items():
        print(f"{role} =", file=err)
        print(np.array2string(np.asarray(M), precision=6, suppress_small=True), file=err)


def cmd_check(args) -> int:
    p = args.map
    cone = _cone(args, p.family)
    verdict = check_property(args.property, p, cone, args.budget, args.tol, args.seed)
    membership = power_set(args.property, p.family, cone, p.blend_lambda).contains(p.alpha)
    result = {"verdict": verdict.to_dict(), "membership": membership.value}
    if args.identity:
        A, B = sample_pair(cone, args.seed, 0)
        result["integral_identity_residual"] = superadd_integral_residual(p, A, B)
    params = {"property": args.property.value, "map": str(p), "n": cone.n, "k": cone.k,
              "domain": cone.domain, "budget": args.budget, "tol": args.tol}
    _emit(args, {"parameters": params, "results": result})
    if verdict.violation_found:
        _print_certificate(verdict.certificate)
        if membership is Membership.IN:
            print("disagreement: violation at an exponent classified as preserving", file=sys.stderr)
            return EXIT_DISAGREE
    elif membership is Membership.OUT:
        print("warning: no violation found at an exponent classified as failing "
              "(sampling is not proof)", file=sys.stderr)
    return EXIT_OK


def cmd_scan(args) -> int:
    cone = _cone(args, args.family)
    rows = scan_alpha(args.property, args.family, cone, args.alphas, args.budget, args.tol, args.seed,
                      args.blend_lambda)
    params = {"property": args.property.value, "family": args.family, "n": cone.n, "k": cone.k,
              "alphas": args.alphas, "budget": args.budget, "tol": args.tol}
    _emit(args, {"parameters": params, "results": [r.to_dict() for r in rows]})
    for r in rows:
        print(f"alpha={r.alpha:g}\t{r.verdict.outcome}\t{r.membership.value}\t{r.status}", file=sys.stderr)
    return EXIT_DISAGREE if any(r.status == "disagree" for r in rows) else EXIT_OK


def cmd_critexp(args) -> int:
    cone = _cone(args, args.family)
    closed = critical_exponent(args.property, args.family, cone)
    params = {"property": args.property.value, "family": args.family, "n": cone.n, "k": cone.k,
              "resolution": args.res, "budget": args.budget, "tol": args.tol}
    try:
        lo, hi = empirical_critical_exponent(args.property, args.family, cone, args.res, args.budget,
                                             args.seed, args.tol)
    except InconclusiveError as exc:
        _emit(args, {"parameters": params, "results": {"closed_form": closed, "error": str(exc)}})
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    inside = lo <= closed <= hi + 1e-12
    _emit(args, {"parameters": params,
                 "results": {"bracket": [lo, hi], "closed_form": closed, "inside": inside}})
    print(f"bracket [{lo:.6g}, {hi:.6g}]  closed form {closed:g}", file=sys.stderr)
    return EXIT_OK if inside else EXIT_DISAGREE


# ---------------------------------------------------------------------------
# counterexample


def _ce_fh(a):
    A = cx.fh_matrix(a.n, a.eps)
    return {"A": A}, {"rank": numeric_rank(A)}


def _ce_cosine(a):
    A = cx.cosine_matrix(a.r)
    return {"A": A}, {"rank": numeric_rank(A)}


def _ce_alternating(a):
    r = int(a.alpha) + 3
    A = cx.cosine_matrix(r)
    p = a.p if a.p is not None else float(a.alpha)
    return {"A": A}, {"eigenvalue": cx.alternating_eigenvalue(int(a.alpha), p), "p": p,
                      "eigenvector": cx.alternating_vector(r)}


def _from_output(out: cx.ConstructionOutput, with_defect: bool = True):
    mats = dict(out.matrices)
    if with_defect and out.prop is not None and out.power_map is not None:
        mats["C"] = out.defect()
    cert = {
        "certificate_kind": out.certificate_kind,
        "certificate_value": out.certificate_value,
        "recomputed": out.recompute() if out.certificate_kind else None,
        "params": out.params,
    }
    if out.witness is not None:
        cert["witness"] = out.witness
    return mats, cert


def _ce_mono_phi(a):
    return _from_output(cx.mono_phi_family(a.a, a.b, a.c))


def _ce_convex_psi2(a):
    return _from_output(cx.convex_psi2_family(a.a, a.b, a.c))


def _ce_subadd_psi(a):
    mats, cert = _from_output(cx.subadd_psi_2x2(a.alpha))
    cert["closed_form"] = cx.subadd_psi_2x2_closed_form(a.alpha)
    return mats, cert


def _ce_subadd_psi0(a):
    return _from_output(cx.subadd_psi0_family(a.a, a.b, a.c, a.n))


def _ce_blend_subadd(a):
    return _from_output(cx.blend_subadd_counterexample(a.n, a.blend_lambda, a.alpha))


def _ce_superadd(a):
    return _from_output(cx.superadd_witness(a.map, a.n))


def _ce_subadd_witness(a):
    return _from_output(cx.subadd_witness(a.map, a.n))


def _ce_rank_lift(a):
    base = cx.ConstructionOutput(
        "cosine", {"A": pad_to(cx.cosine_matrix(a.r), a.n)},
        prop=LoewnerProperty.POSITIVITY, power_map=a.map,
    )
    out = cx.rank_lift(base, a.k, a.map, LoewnerProperty.POSITIVITY)
    mats, cert = _from_output(out)
    cert["rank"] = numeric_rank(out.matrices["A"])
    return mats, cert


COUNTEREXAMPLES = {
    "fh": _ce_fh,
    "cosine": _ce_cosine,
    "alternating": _ce_alternating,
    "mono-phi": _ce_mono_phi,
    "convex-psi2": _ce_convex_psi2,
    "subadd-psi": _ce_subadd_psi,
    "subadd-psi0": _ce_subadd_psi0,
    "blend-subadd": _ce_blend_subadd,
    "superadd-witness": _ce_superadd,
    "subadd-witness": _ce_subadd_witness,
    "rank-lift": _ce_rank_lift,
}


#: parameters each construction reads, echoed into its report
COUNTEREXAMPLE_PARAMS = {
    "fh": ("n", "eps"),
    "cosine": ("r",),
    "alternating": ("alpha", "p"),
    "mono-phi": ("a", "b", "c"),
    "convex-psi2": ("a", "b", "c"),
    "subadd-psi": ("alpha",),
    "subadd-psi0": ("a", "b", "c", "n"),
    "blend-subadd": ("n", "blend_lambda", "alpha"),
    "superadd-witness": ("map", "n"),
    "subadd-witness": ("map", "n"),
    "rank-lift": ("map", "r", "n", "k"),
}


def cmd_counterexample(args) -> int:
    mats, cert = COUNTEREXAMPLES[args.name](args)
    params = {k: getattr(args, k) for k in COUNTEREXAMPLE_PARAMS[args.name] if getattr(args, k) is not None}
    params = {k: str(v) if isinstance(v, PowerMap) else v for k, v in params.items()}
    record = {"name": args.name, "parameters": params, "certificate": cert}
    if args.out:
        out = Path(args.out)
        for role, M in mats.items():
            write_matrix(out / f"{args.name}_{role}.{args.format}", M, args.format)
        write_json(out / f"{args.name}_certificate.json",
                   {"command": ["loewner-lab"] + list(args.argv), "version": __version__, **record})
        print(f"wrote {len(mats)} matrices and a certificate under {out}")
    else:
        record["matrices"] = {role: np.asarray(M) for role, M in mats.items()}
        _emit(args, record)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(sp, budget=True):
    sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    if budget:
        sp.add_argument("--budget", type=int, default=500, help="random samples per check (default 500)")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative PSD tolerance (default 1e-9)")
    sp.add_argument("--out", help="directory (or .json file) for the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loewner-lab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("table", help="closed-form classification table")
    t.add_argument("--n", type=_int_list, required=True, help="e.g. 5, 2-6 or 3,5")
    t.add_argument("--k", type=_int_list, help="ranks (default: all 1..n)")
    t.add_argument("--property", action="append", type=lambda s: _property(s).value)
    t.add_argument("--family", action="append", choices=["plain", "even", "odd", "blend"])
    t.add_argument("--lambda", dest="blend_lambda", type=float, default=0.5)
    t.add_argument("--format", choices=["markdown", "json"], default="markdown")
    t.add_argument("--out")
    t.set_defaults(func=cmd_table)

    c = sub.add_parser("check", help="search for a violation of one property by one power")
    c.add_argument("property", type=_property)
    c.add_argument("map", type=_power_map, help="plain:1.5, even:3, odd:2 or blend:LAMBDA:ALPHA")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int)
    c.add_argument("--identity", action="store_true", help="also report the integral identity residual")
    _common(c)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("scan", help="check a grid of exponents against the classification")
    s.add_argument("property", type=_property)
    s.add_argument("family", choices=["plain", "even", "odd", "blend"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--alphas", type=_alpha_list, default=_alpha_list("0.25:5:0.25"),
                   help="start:stop:step or comma list (default 0.25:5:0.25)")
    s.add_argument("--lambda", dest="blend_lambda", type=float, default=0.5)
    _common(s)
    s.set_defaults(func=cmd_scan)

    e = sub.add_parser("critexp", help="bisect for the critical exponent")
    e.add_argument("property", type=_property)
    e.add_argument("family", choices=["plain", "even", "odd", "blend"])
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int)
    e.add_argument("--res", type=float, default=0.25, help="bracket width (default 0.25)")
    _common(e)
    e.set_defaults(func=cmd_critexp)

    x = sub.add_parser("counterexample", help="emit an explicit construction")
    x.add_argument("name", choices=sorted(COUNTEREXAMPLES))
    x.add_argument("--n", type=int, default=3)
    x.add_argument("--k", type=int, default=3)
    x.add_argument("--r", type=int, default=4)
    x.add_argument("--eps", type=float, default=0.01)
    x.add_argument("--a", type=float, default=2.0)
    x.add_argument("--b", type=float, default=1.0)
    x.add_argument("--c", type=float, default=0.75)
    x.add_argument("--alpha", type=float, default=-1.0)
    x.add_argument("--p", type=float)
    x.add_argument("--lambda", dest="blend_lambda", type=float, default=0.5)
    x.add_argument("--map", type=_power_map, default=PowerMap("even", 1.0))
    x.add_argument("--format", choices=["csv", "json"], default="csv")
    x.add_argument("--out")
    x.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except SearchFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    except LoewnerLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
