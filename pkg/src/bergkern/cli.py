"""Command-line interface: ``bergkern <subcommand> [flags]``.

Exit codes: 0 success, 1 failed verification, 2 usage error. JSON goes to
stdout with a top-level ``"schema": "bergkern/1"`` key; floats are decimal
strings at ``--precision`` significant digits and exact rationals are
``"p/q"`` strings. Negative coordinate pairs need the ``--flag=-0.3,0.1``
spelling.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Sequence

from . import bergman, luqikeng, omega, oracle, verify
from .errors import BergkernError
from .exactpoly import rat_str

SCHEMA = "bergkern/1"


class UsageError(Exception):
    """A flag value violates the target operation's preconditions."""


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 2, 7/2 or 3.5, got {text!r}")


def _complex_pair(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected re,im (e.g. 0.3,-0.1), got {text!r}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("multi-index entries must be >= 0")
    return vals


class Emitter:
    def __init__(self, precision: int):
        self.precision = precision

    def num(self, x: float) -> str:
        return format(float(x), f".{self.precision}g")

    def cnum(self, z: complex) -> dict:
        z = complex(z)
        return {"re": self.num(z.real), "im": self.num(z.imag)}


def _require(cond: bool, flag: str, valid: str, got) -> None:
    if not cond:
        raise UsageError(f"{flag}: got {got}, valid range is {valid}")


def _check_nqr(args, need_q=True) -> None:
    _require(args.n >= 1, "--n", "integer >= 1", args.n)
    if need_q:
        _require(args.q > 0, "--q", "q > 0", args.q)
    _require(args.r > 0, "--r", "r > 0", args.r)


def _write(payload: dict) -> None:
    sys.stdout.write(json.dumps({"schema": SCHEMA, **payload}, indent=2) + "\n")


def cmd_ln(args, em: Emitter) -> int:
    _check_nqr(args)
    L = bergman.build_L(args.n, args.q, args.r)
    if args.format == "latex":
        sys.stdout.write(f"L_{{{args.n}}}^{{{rat_str(args.q)},{rat_str(args.r)}}}(x,y) = {L.to_latex()}\n")
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["i", "j", "coeff"])
        for (i, j), c in L.numerator.terms:
            w.writerow([i, j, rat_str(c)])
        sys.stdout.write(f"# scale={rat_str(L.scale)} pow_x={L.pow_x} pow_y={L.pow_y}\n" + buf.getvalue())
    else:
        _write({"command": "ln", "n": args.n, "q": rat_str(args.q), "r": rat_str(args.r), "L": L.to_dict()})
    return 0


def cmd_eval_kernel(args, em: Emitter) -> int:
    if args.format != "json":
        raise UsageError(f"--format: got {args.format}, valid values are json")
    if args.domain == "dnqr":
        _check_nqr(args)
        zs = args.z or [0j] * args.n
        etas = args.eta or [0j] * args.n
        _require(len(zs) == args.n and len(etas) == args.n, "--z/--eta", f"exactly n = {args.n} pairs each",
                 f"{len(zs)} and {len(etas)}")
        params = bergman.KernelParams(args.n, args.q, args.r)
        p = bergman.DomainPoint(zs, args.w1, args.w2)
        p2 = bergman.DomainPoint(etas, args.xi1, args.xi2)
        _require(p.in_domain(params) and p2.in_domain(params), "--z/--w1/--w2/--eta/--xi1/--xi2",
                 "points strictly inside D_n^{q,r}", "a point outside")
        value = bergman.kernel_D(params, p, p2)
    elif args.domain == "dinv":
        _check_nqr(args)
        nu1, nu2 = args.w1 * args.xi1.conjugate(), args.w2 * args.xi2.conjugate()
        _require(abs(nu1) < 1 and abs(nu2) < 1, "--w1/--xi1/--w2/--xi2", "|w_k conj(xi_k)| < 1", (abs(nu1), abs(nu2)))
        value = bergman.kernel_Dinv_origin(args.n, args.q, args.r, nu1, nu2)
    else:
        _check_nqr(args, need_q=False)
        ws = args.w or [0j] * args.n
        zetas = args.zeta or [0j] * args.n
        _require(len(ws) == args.n and len(zetas) == args.n, "--w/--zeta", f"exactly n = {args.n} pairs each",
                 f"{len(ws)} and {len(zetas)}")
        nus = [a * b.conjugate() for a, b in zip(ws, zetas)]
        _require(all(abs(v) < 1 for v in nus), "--w/--zeta", "|w_k conj(zeta_k)| < 1", [abs(v) for v in nus])
        value = omega.kernel_omega(omega.OmegaParams(args.n, float(args.r)), nus)
    _write({"command": "eval-kernel", "domain": args.domain, "n": args.n, "kernel": em.cnum(value)})
    return 0


def cmd_verify(args, em: Emitter) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    results = verify.run_suites(names)
    ok = all(c.passed for checks in results.values() for c in checks)
    for name, checks in results.items():
        for c in checks:
            print(f"[{'PASS' if c.passed else 'FAIL'}] {name}: {c.name} {c.detail}".rstrip(), file=sys.stderr)
    _write({
        "command": "verify",
        "passed": ok,
        "suites": {
            name: {"passed": all(c.passed for c in checks),
                   "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]}
            for name, checks in results.items()
        },
    })
    return 0 if ok else 1


def cmd_lqk_scan(args, em: Emitter) -> int:
    _require(args.r > 0, "--r", "r > 0", args.r)
    _require(args.grid >= 16, "--grid", "integer >= 16", args.grid)
    if args.format == "latex":
        raise UsageError("--format: got latex, valid values are json, csv")
    r = float(args.r)
    if args.format == "csv":
        etas, dets = luqikeng.det_scan(r, args.grid)
        w = csv.writer(sys.stdout)
        w.writerow(["eta", "det_m"])
        for e, d in zip(etas, dets):
            w.writerow([em.num(e), em.num(d)])
        return 0
    rep = luqikeng.lqk_scan(r, args.grid)
    _write({"command": "lqk-scan", "r": em.num(rep.r), "grid": rep.grid_size, "min_det": em.num(rep.min_det),
            "argmin_eta": em.num(rep.argmin_eta), "witness_found": rep.witness_found})
    return 0


def cmd_mc_norm(args, em: Emitter) -> int:
    if args.format != "json":
        raise UsageError(f"--format: got {args.format}, valid values are json")
    _require(args.samples >= 1000, "--samples", "integer >= 1000", args.samples)
    _require(0 <= args.seed < 2**64, "--seed", "0 <= seed < 2^64", args.seed)
    cfg = oracle.McConfig(args.samples, args.seed)
    if args.domain == "dnqr":
        _check_nqr(args)
        alpha = args.alpha if args.alpha is not None else (0,) * args.n
        _require(len(alpha) == args.n, "--alpha", f"n = {args.n} comma-separated entries", len(alpha))
        params = bergman.KernelParams(args.n, args.q, args.r)
        idx = bergman.MultiIndex(alpha, args.gamma1, args.gamma2)
        est = oracle.mc_norm(oracle.DnQR(params), idx, cfg)
        closed = bergman.monomial_norm_D(params, idx)
    elif args.domain == "dinv":
        _check_nqr(args)
        alpha = args.alpha if args.alpha is not None else (0,)
        _require(len(alpha) == 1, "--alpha", "a single entry", len(alpha))
        idx = bergman.MultiIndex(alpha, args.gamma1, args.gamma2)
        est = oracle.mc_norm(oracle.DInv(args.n, args.q, args.r), idx, cfg)
        closed = bergman.monomial_norm_Dinv(args.n, args.q, args.r, idx)
    else:
        _check_nqr(args, need_q=False)
        beta = args.beta if args.beta is not None else (0,) * args.n
        _require(len(beta) == args.n, "--beta", f"n = {args.n} comma-separated entries", len(beta))
        alpha = args.alpha if args.alpha is not None else (0,)
        _require(len(alpha) == 1, "--alpha", "a single entry", len(alpha))
        p = omega.OmegaParams(args.n, float(args.r))
        idx = omega.OmegaMultiIndex(alpha[0], beta)
        est = oracle.mc_norm(oracle.Omega(p), idx, cfg)
        closed = omega.norm_omega(p, idx)
    _write({"command": "mc-norm", "domain": args.domain, "mean": em.num(est.mean), "std_error": em.num(est.std_error),
            "accepted_fraction": em.num(est.accepted_fraction), "closed_form": em.num(closed),
            "within_3_sigma": est.within(closed)})
    return 0


def cmd_zeros(args, em: Emitter) -> int:
    _require(args.n >= 4, "--n", "integer >= 4", args.n)
    p, p2 = luqikeng.diagonal_zero_witness(args.n)
    params = bergman.KernelParams(args.n, 2, 2)
    origin = bergman.DomainPoint.origin(args.n)
    k_wit = bergman.kernel_D(params, p, p2)
    k0 = bergman.kernel_D(params, origin, origin)
    _write({"command": "zeros", "n": args.n,
            "point": {"w1": em.cnum(p.w1), "w2": em.cnum(p.w2)},
            "point2": {"w1": em.cnum(p2.w1), "w2": em.cnum(p2.w2)},
            "kernel": em.cnum(k_wit), "kernel_origin": em.cnum(k0),
            "relative_magnitude": em.num(abs(k_wit) / abs(k0))})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bergkern", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "latex"), default="json")
    common.add_argument("--precision", type=int, default=15, help="significant decimal digits (default 15)")
    sub = parser.add_subparsers(dest="command", required=True)

    def nqr(p, q=True):
        p.add_argument("--n", type=int, required=True)
        if q:
            p.add_argument("--q", type=_rational, default=Fraction(2))
        p.add_argument("--r", type=_rational, default=Fraction(2))

    p = sub.add_parser("ln", parents=[common], help="exact L_n^{q,r}")
    nqr(p)
    p.set_defaults(func=cmd_ln)

    p = sub.add_parser("eval-kernel", parents=[common], help="evaluate a Bergman kernel")
    p.add_argument("--domain", choices=("dnqr", "dinv", "omega"), default="dnqr")
    nqr(p)
    for flag in ("--z", "--eta", "--w", "--zeta"):
        p.add_argument(flag, type=_complex_pair, action="append", help="re,im (repeat per coordinate)")
    for flag in ("--w1", "--w2", "--xi1", "--xi2"):
        p.add_argument(flag, type=_complex_pair, default=0j, help="re,im")
    p.set_defaults(func=cmd_eval_kernel)

    p = sub.add_parser("verify", parents=[common], help="run self-check suites")
    p.add_argument("--suite", choices=(*verify.SUITES, "all"), default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lqk-scan", parents=[common], help="scan det M(e^{i eta}) for a negative value")
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--grid", type=int, default=4096)
    p.set_defaults(func=cmd_lqk_scan)

    p = sub.add_parser("mc-norm", parents=[common], help="Monte Carlo monomial norm")
    p.add_argument("--domain", choices=("dnqr", "dinv", "omega"), default="dnqr")
    nqr(p)
    p.add_argument("--alpha", type=_int_list)
    p.add_argument("--beta", type=_int_list)
    p.add_argument("--gamma1", type=int, default=0)
    p.add_argument("--gamma2", type=int, default=0)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mc_norm)

    p = sub.add_parser("zeros", parents=[common], help="diagonal zero witness of K_{D_n^{2,2}}")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_zeros)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision < 1 or args.precision > 17:
        print("bergkern: error: --precision: valid range is 1..17", file=sys.stderr)
        return 2
    if (args.gamma1 < 0 or args.gamma2 < 0) if hasattr(args, "gamma1") else False:
        print("bergkern: error: --gamma1/--gamma2: valid range is integers >= 0", file=sys.stderr)
        return 2
    try:
        return args.func(args, Emitter(args.precision))
    except UsageError as exc:
        print(f"bergkern: error: {exc}", file=sys.stderr)
        return 2
    except BergkernError as exc:
        print(f"bergkern: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
