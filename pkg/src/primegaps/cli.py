"""Command-line interface.

Subcommand groups:

  tuple find|verify|hsmall     admissible tuple construction and checking
  mk krylov|basis              certified plain-variant lower bounds
  mkeps basis                  certified enlarged-variant lower bounds
  verify-cert FILE             exact re-check of a certificate file
  asympt / m2exact / m2eps / m4eps / bessel
                               closed-form and asymptotic bound evaluators
  cutoff3d verify|eval         exact piecewise-cutoff verification
  chain hm                     build a gap claim from a rule + certificate + tuple
  report FILE...               re-audit emitted reports (exit 0 iff all valid)
"""

from __future__ import annotations

import argparse
import hashlib
import sys

import mpmath as mp

from . import admissible, bounds, cutoff3d, pipeline, sieves, varprob
from .rational import parse_rational, rational_str


def _cmd_tuple(args) -> int:
    if args.tuple_cmd == "find":
        cfg = sieves.SieveConfig(
            method=args.method,
            shift="search" if args.shift == "search" else int(args.shift),
            batch_size=args.batch_size,
            threads=args.threads,
        )
        t = sieves.find_tuple(args.k, cfg)
        print(f"method={args.method} k={t.k} diameter={t.diameter}")
        if args.out:
            admissible.write_tuple_file(args.out, t, header=f"method={args.method}")
            print(f"wrote {args.out}")
        else:
            print(" ".join(str(h) for h in t.offsets))
        return 0
    if args.tuple_cmd == "verify":
        t = admissible.read_tuple_file(args.file)
        ok = admissible.is_admissible(t)
        print(f"k={t.k} diameter={t.diameter} admissible={'yes' if ok else 'no'}")
        return 0 if ok else 1
    if args.tuple_cmd == "hsmall":
        d = admissible.h_exact_small(args.k, args.dmax)
        print(f"minimal diameter for k={args.k}: {d}")
        return 0
    raise AssertionError


def _print_certificate(cert, d, basis_kind, out):
    status = "verified" if cert.verified else "NOT VERIFIED"
    print(f"variant={cert.variant} n={len(cert.a)} C={rational_str(cert.C)} ({float(cert.C):.8f}) {status}")
    if out:
        varprob.write_certificate(out, cert, d=d, basis_kind=basis_kind)
        print(f"wrote {out}")


def _cmd_mk(args) -> int:
    if args.mk_cmd == "krylov":
        cert = varprob.krylov_lower_bound(args.k, args.n)
        _print_certificate(cert, d=0, basis_kind="krylov", out=args.out)
        return 0 if cert.verified else 1
    pair = varprob.assemble_plain(args.k, args.d, even_only=not args.full_signatures)
    cert = varprob.gram_lower_bound(pair)
    _print_certificate(cert, d=args.d, basis_kind="full" if args.full_signatures else "even", out=args.out)
    return 0 if cert.verified else 1


def _cmd_mkeps(args) -> int:
    eps = parse_rational(args.eps)
    pair = varprob.assemble_eps(args.k, args.d, eps, even_only=not args.full_signatures)
    cert = varprob.gram_lower_bound(pair)
    _print_certificate(cert, d=args.d, basis_kind="full" if args.full_signatures else "even", out=args.out)
    return 0 if cert.verified else 1


def _cmd_verify_cert(args) -> int:
    cert, margin = varprob.verify_certificate_file(args.file)
    print(
        f"variant={cert.variant} C={rational_str(cert.C)} margin={rational_str(margin)} "
        f"{'verified' if cert.verified else 'NOT VERIFIED'}"
    )
    return 0 if cert.verified else 1


def _cmd_asympt(args) -> int:
    p = bounds.AsymptoticParams.from_scaled(args.k, args.theta, args.beta, tau=args.tau)
    r = bounds.asymptotic_lower(p)
    for name in ("m2", "mu", "sigma2", "Z", "Z3", "W", "X", "V", "U"):
        print(f"{name} = {mp.nstr(getattr(r, name), 15)}")
    print(f"error_budget = {mp.nstr(r.error_budget, 5)}")
    print(f"lower_bound = {mp.nstr(r.lower_bound, 15)}")
    return 0


def _cmd_cutoff3d(args) -> int:
    if args.cutoff_cmd == "verify":
        f = cutoff3d.builtin_cutoff()
        I = cutoff3d.integrate_I(f)
        J = cutoff3d.integrate_J(f)
        print(f"I = {rational_str(I)}")
        print(f"J = {rational_str(J)}")
        print(f"J/I = 2 + {rational_str(J / I - 2)}")
        ok = True
        for label, residual in cutoff3d.check_marginals(f):
            zero = residual.is_zero()
            ok &= zero
            print(f"marginal {label}: {'vanishes' if zero else f'NONZERO {residual}'}")
        print(f"ratio exceeds 2: {'yes' if J > 2 * I else 'no'}")
        return 0 if ok and J > 2 * I else 1
    # eval
    name, _, word = args.piece.partition("_")
    word = word or "xyz"
    f = cutoff3d.builtin_cutoff()
    poly = cutoff3d.piece_polynomial(f, name, word)
    x, y, z = (parse_rational(v) for v in args.at.split(","))
    value = poly.eval(x, y, z)
    print(f"{args.piece}({rational_str(x)},{rational_str(y)},{rational_str(z)}) = {rational_str(value)}")
    return 0


def _hypothesis_from_args(args) -> pipeline.Hypothesis:
    if args.hyp == "BV":
        return pipeline.Hypothesis.bv()
    theta = parse_rational(args.theta) if args.theta else pipeline.THETA_NEAR_ONE
    if args.hyp == "GEH":
        return pipeline.Hypothesis.geh(theta)
    return pipeline.Hypothesis.eh(theta)


def _cmd_chain(args) -> int:
    t = admissible.read_tuple_file(args.tuple)
    provenance = {}
    if args.cert:
        cert, _ = varprob.verify_certificate_file(args.cert)
        if not cert.verified:
            print("certificate failed exact verification", file=sys.stderr)
            return 1
        bound_input = cert
        with open(args.cert, "rb") as fh:
            provenance["cert_sha256"] = hashlib.sha256(fh.read()).hexdigest()
    elif args.cert_value:
        bound_input = pipeline.ExternalBound(parse_rational(args.cert_value), args.cert_source)
    else:
        bound_input = None

    rule = args.dhl_rule
    if rule == "mk":
        hyp = _hypothesis_from_args(args)
        dhl = pipeline.dhl_from_mk(args.k, bound_input, hyp, args.m, provenance=provenance)
    elif rule == "trunc":
        dhl = pipeline.dhl_from_trunc(
            args.k, bound_input, parse_rational(args.varpi), parse_rational(args.delta), args.m,
            provenance=provenance,
        )
    elif rule == "eps":
        hyp = _hypothesis_from_args(args)
        dhl = pipeline.dhl_from_eps(
            args.k, parse_rational(args.eps), bound_input, hyp, args.m,
            nonstrict=args.nonstrict, provenance=provenance,
        )
    else:  # marginal: run the built-in exact cutoff verification
        f = cutoff3d.builtin_cutoff()
        for label, residual in cutoff3d.check_marginals(f):
            if not residual.is_zero():
                print(f"marginal {label} failed", file=sys.stderr)
                return 1
        ratio = cutoff3d.integrate_J(f) / cutoff3d.integrate_I(f)
        evidence = pipeline.MarginalEvidence(3, f.eps, ratio, True, True)
        theta = parse_rational(args.theta) if args.theta else pipeline.THETA_NEAR_ONE
        dhl = pipeline.dhl_from_marginal(3, f.eps, evidence, pipeline.Hypothesis.geh(theta), args.m)
    claim = pipeline.hm_from_dhl(dhl, t)
    report = pipeline.emit_report([claim])
    print(report, end="")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report)
    return 0 if pipeline.audit_report(report) else 1


def _cmd_report(args) -> int:
    all_ok = True
    for path in args.files:
        with open(path) as fh:
            text = fh.read()
        ok = pipeline.audit_report(text)
        all_ok &= ok
        print(f"{path}: {'valid' if ok else 'INVALID'}")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="primegaps", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    t = sub.add_parser("tuple", help="admissible tuple operations")
    tsub = t.add_subparsers(dest="tuple_cmd", required=True)
    tf = tsub.add_parser("find")
    tf.add_argument("--k", type=int, required=True)
    tf.add_argument("--method", default="shifted-schinzel", choices=sieves.METHODS)
    tf.add_argument("--shift", default="search")
    tf.add_argument("--threads", type=int, default=1)
    tf.add_argument("--batch-size", type=int, default=1)
    tf.add_argument("--out")
    tv = tsub.add_parser("verify")
    tv.add_argument("file")
    th = tsub.add_parser("hsmall")
    th.add_argument("--k", type=int, required=True)
    th.add_argument("--dmax", type=int, required=True)

    mk = sub.add_parser("mk", help="plain-variant lower bounds")
    mksub = mk.add_subparsers(dest="mk_cmd", required=True)
    mkk = mksub.add_parser("krylov")
    mkk.add_argument("--k", type=int, required=True)
    mkk.add_argument("--n", type=int, required=True)
    mkk.add_argument("--out")
    mkb = mksub.add_parser("basis")
    mkb.add_argument("--k", type=int, required=True)
    mkb.add_argument("--d", type=int, required=True)
    mkb.add_argument("--full-signatures", action="store_true")
    mkb.add_argument("--out")

    mke = sub.add_parser("mkeps", help="enlarged-variant lower bounds")
    mkesub = mke.add_subparsers(dest="mkeps_cmd", required=True)
    mkeb = mkesub.add_parser("basis")
    mkeb.add_argument("--k", type=int, required=True)
    mkeb.add_argument("--d", type=int, required=True)
    mkeb.add_argument("--eps", required=True)
    mkeb.add_argument("--full-signatures", action="store_true")
    mkeb.add_argument("--out")

    vc = sub.add_parser("verify-cert", help="exactly re-check a certificate file")
    vc.add_argument("file")

    asy = sub.add_parser("asympt", help="explicit truncated-variant lower bound")
    asy.add_argument("--k", type=int, required=True)
    asy.add_argument("--theta", required=True)
    asy.add_argument("--beta", required=True)
    asy.add_argument("--tau", default=None)

    sub.add_parser("m2exact", help="exact two-variable optimum")
    m2e = sub.add_parser("m2eps", help="enlarged two-variable optimum")
    m2e.add_argument("--eps", required=True)
    m4 = sub.add_parser("m4eps", help="exact four-variable cross-check")
    m4.add_argument("--eps", required=True)
    m4.add_argument("--alpha", required=True)
    be = sub.add_parser("bessel", help="Bessel-zero lower bound")
    be.add_argument("--k", type=int, required=True)

    c3 = sub.add_parser("cutoff3d", help="piecewise-cutoff verification")
    c3sub = c3.add_subparsers(dest="cutoff_cmd", required=True)
    c3sub.add_parser("verify")
    c3e = c3sub.add_parser("eval")
    c3e.add_argument("--piece", required=True, help="for instance A_xyz or G_yzx")
    c3e.add_argument("--at", required=True, help="x,y,z with rational entries")

    ch = sub.add_parser("chain", help="derive gap claims")
    chsub = ch.add_subparsers(dest="chain_cmd", required=True)
    chm = chsub.add_parser("hm")
    chm.add_argument("--dhl-rule", required=True, choices=("mk", "trunc", "eps", "marginal"))
    chm.add_argument("--k", type=int, required=True)
    chm.add_argument("--m", type=int, required=True)
    chm.add_argument("--eps")
    chm.add_argument("--theta")
    chm.add_argument("--varpi")
    chm.add_argument("--delta")
    chm.add_argument("--hyp", default="EH", choices=("EH", "GEH", "BV"))
    chm.add_argument("--cert")
    chm.add_argument("--cert-value")
    chm.add_argument("--cert-source", default="published-value")
    chm.add_argument("--nonstrict", action="store_true")
    chm.add_argument("--tuple", required=True)
    chm.add_argument("--out")

    rp = sub.add_parser("report", help="re-audit report files")
    rp.add_argument("files", nargs="+")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "tuple":
            return _cmd_tuple(args)
        if args.cmd == "mk":
            return _cmd_mk(args)
        if args.cmd == "mkeps":
            return _cmd_mkeps(args)
        if args.cmd == "verify-cert":
            return _cmd_verify_cert(args)
        if args.cmd == "asympt":
            return _cmd_asympt(args)
        if args.cmd == "m2exact":
            print(mp.nstr(bounds.m2_exact(), 15))
            return 0
        if args.cmd == "m2eps":
            print(mp.nstr(bounds.m2_eps(parse_rational(args.eps)), 15))
            return 0
        if args.cmd == "m4eps":
            I, J, ok = bounds.m4eps_check(parse_rational(args.eps), parse_rational(args.alpha))
            print(f"I = {rational_str(I)} ({float(I):.12g})")
            print(f"J = {rational_str(J)} ({float(J):.12g})")
            print(f"4J/I = {rational_str(4 * J / I)} ({float(4 * J / I):.12g})")
            print(f"exceeds 2.00558: {'yes' if ok else 'no'}")
            return 0
        if args.cmd == "bessel":
            print(mp.nstr(bounds.bessel_lower(args.k), 15))
            return 0
        if args.cmd == "cutoff3d":
            return _cmd_cutoff3d(args)
        if args.cmd == "chain":
            return _cmd_chain(args)
        if args.cmd == "report":
            return _cmd_report(args)
        raise AssertionError
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
