"""Command line front end.

    swcalc xi --at 1 --order 1
    swcalc factor H --m 5 --at 0
    swcalc const c --m 4 --r 1
    swcalc verify boundary-constant-2 --r 2 --format json
    swcalc grid first-term-step

Exit status: 0 success or pass, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import emit as E
from .constants import beta_h_identity, c_mr_all, c_mr, c_r, d_mr, golden_table, relations_check, transfer_const
from .errors import SwcalcError, UsageError
from .factors import dnorm_series, factor_series, lambda_closed, lambda_m, make_factor, pz_eval
from .precision import DIGITS_ENV, PrecisionContext, default_context, rat_str, to_rational
from .special import archimedean_series, zeta_series
from .terms.derivations import IDENTITIES, gamma_rows, verify_identity
from .xi import xi_conv, xi_series

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text):
    return to_rational(text)


def _primes(text):
    if text is None or text.strip() == "":
        return []
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError("--S takes comma-separated primes", "S") from exc


def _common(p):
    p.add_argument("--digits", type=int, default=None,
                   help=f"decimal digits (default 50 or ${DIGITS_ENV})")
    p.add_argument("--format", choices=E.FORMATS, default="text")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="swcalc", description="Siegel-Weil constants and identity checks.")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("xi", help="Laurent series of xi, zeta or the archimedean factor")
    p.add_argument("--at", type=_rational, required=True)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--fn", choices=("xi", "zeta", "gamma"), default="xi")
    _common(p)

    p = sub.add_parser("factor", help="named factor: F G H beta sph, or lambda pz dnorm")
    p.add_argument("kind", choices=("F", "G", "H", "beta", "sph", "lambda", "pz", "dnorm"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--at", type=_rational)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--S", default="")
    _common(p)

    p = sub.add_parser("const", help="named constant: c c_r d a b kappa, or beta-h")
    p.add_argument("name", choices=("c", "c_r", "d", "a", "b", "kappa", "beta-h"))
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--variant", choices=("corrected", "printed"), default="corrected")
    p.add_argument("--engine", action="store_true", help="also derive the value with the term engine")
    _common(p)

    p = sub.add_parser("verify", help="run one derivation")
    p.add_argument("id", choices=IDENTITIES)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--seed", type=int)
    _common(p)

    p = sub.add_parser("grid", help="run a derivation, the relations or the golden table over a grid")
    p.add_argument("id", choices=IDENTITIES + ("relations", "golden"))
    p.add_argument("--rmax", type=int, default=5)
    p.add_argument("--mmax", type=int, default=12)
    _common(p)
    return top


def _ctx(args) -> PrecisionContext:
    if args.digits is None:
        return default_context()
    return PrecisionContext(args.digits)


def _cmd_xi(args, ctx):
    if args.order < 0:
        raise UsageError("--order must be non-negative", "order")
    fn = {"xi": xi_series, "zeta": zeta_series, "gamma": archimedean_series}[args.fn]
    ls = fn(args.at, args.order, ctx)
    doc = E.series_doc(ls, ctx.decimal_digits, function=args.fn)
    if args.fn == "xi":
        doc["conv"] = E.dec(xi_conv(args.at, ctx), ctx.decimal_digits)
    return doc, True


def _cmd_factor(args, ctx):
    d = ctx.decimal_digits
    if args.kind == "lambda":
        lam, closed = lambda_m(args.m, ctx), lambda_closed(args.m, ctx)
        return {"name": "lambda", "m": args.m, "value": E.dec(lam, d), "closed": E.dec(closed, d)}, True
    if args.kind == "pz":
        if args.r is None or args.at is None:
            raise UsageError("pz needs --r and --at", "r")
        return {"name": "pz", "m": args.m, "r": args.r, "at": rat_str(args.at),
                "value": rat_str(pz_eval(args.m, args.r, args.at))}, True
    if args.kind == "dnorm":
        if args.at is None:
            raise UsageError("dnorm needs --at", "at")
        ls = dnorm_series(args.m, args.at, _primes(args.S), ctx, args.order)
        return E.series_doc(ls, d, name="dnorm", m=args.m, S=",".join(map(str, _primes(args.S)))), True
    f = make_factor(args.kind, args.m, args.r)
    a, b = f.d_exponent
    doc = {"name": args.kind, "m": args.m, "r": args.r, "expr": f.render(),
           "d_exponent": {"s": rat_str(a), "const": rat_str(b)}}
    if args.at is not None:
        ls = factor_series(f, args.at, args.order, ctx)
        doc.update(E.series_doc(ls, d))
    return doc, True


def _cmd_const(args, ctx):
    d = ctx.decimal_digits
    name, m, r = args.name, args.m, args.r
    if name == "beta-h":
        res = beta_h_identity(r, ctx)
        doc = {"name": name, "r": r, "digits": d}
        doc.update({k: (E.dec(v, d) if not isinstance(v, int) else v) for k, v in res.items() if k != "r"})
        with ctx.working():
            err = abs(res["value"] - 2) / 2
        doc["error"] = E.dec(err, E.RESIDUAL_DIGITS)
        doc["pass"] = bool(err < ctx.tolerance)
        return doc, doc["pass"]
    if name != "c_r" and m is None:
        raise UsageError(f"{name} needs --m", "m")
    routes = {}
    if name == "c":
        k = c_mr_all(m, r, ctx)
        routes = dict(k.routes)
        if args.engine:
            routes["engine"] = c_mr(m, r, "engine", ctx).value
    elif name == "c_r":
        k = c_r(r, ctx)
        routes = dict(k.routes)
        if args.engine:
            routes["engine"] = verify_identity("boundary-first-term", {"r": r}, ctx).solved["c_r"]
    elif name == "d":
        k = d_mr(m, r, ctx, args.variant)
        if args.engine:
            ident = "second-range-first-term-base" if m == 2 * r else "second-range-first-term-step"
            routes = {"closed": k.value, "engine": verify_identity(ident, {"m": m, "r": r}, ctx).solved["d"]}
    else:
        k = transfer_const(name, m, r, ctx, args.variant)
    doc = {"name": name, "m": k.params[0], "r": k.params[1], "digits": d,
           "value": E.dec(k.value, d), "d_power": rat_str(k.d_power)}
    ok = True
    if routes:
        with ctx.working():
            spread = max(abs(v - k.value) for v in routes.values()) / (abs(k.value) or 1)
        ok = bool(spread < ctx.tolerance)
        doc["routes"] = {kk: E.dec(v, d) for kk, v in routes.items()}
        doc["agreement"] = E.dec(spread, E.RESIDUAL_DIGITS)
        doc["routes_agree"] = ok
    return doc, ok


def _verify_params(ident, m, r, j):
    return {k: v for k, v in (("m", m), ("r", r), ("j", j)) if v is not None}


def _cmd_verify(args, ctx):
    rep = verify_identity(args.id, _verify_params(args.id, args.m, args.r, args.j), ctx, seed=args.seed)
    return E.report_doc(rep), rep.passed


def grid_points(ident: str, rmax: int = 5, mmax: int = 12) -> list:
    """(m, r, j) points of one identity, ordered by (m, r)."""
    pts = []
    for r in range(1, rmax + 1):
        if ident in ("no-pole-i", "no-pole-ii", "no-pole-iii", "boundary-first-term",
                     "second-range-first-term-base", "second-term-base", "weak-coefficient",
                     "boundary-constant-2"):
            pts.append((None, r, None))
        elif ident == "second-range-first-term-step":
            pts += [(m, r, None) for m in range(r + 1, 2 * r)]
        elif ident == "second-term-step":
            pts += [(None, r, j) for j in range(1, r)]
    if ident == "first-term-base":
        pts = [(m, 1, None) for m in range(4, mmax + 1)]
    elif ident == "first-term-step":
        pts = [(m, r, None) for m in range(4, mmax + 1) for r in range(2, m) if m > 2 * r + 1]
    return sorted(pts, key=lambda p: (p[0] or 0, p[1], p[2] or 0))


def _cmd_grid(args, ctx):
    d = ctx.decimal_digits
    if args.id == "relations":
        res = relations_check(ctx)
        rows = [{"relation": x["relation"], "m": x["m"], "r": x["r"], "lhs": E.dec(x["lhs"], d),
                 "rhs": E.dec(x["rhs"], d), "error": E.dec(x["error"], E.RESIDUAL_DIGITS), "pass": x["pass"]}
                for x in res["rows"]]
        return {"id": "relations", "pass": res["pass"], "rows": rows}, res["pass"]
    if args.id == "golden":
        rows = golden_table(ctx, args.mmax, min(args.rmax, 6)) + gamma_rows(ctx, min(args.rmax, 4))
        return {"id": "golden", "digits": d, "rows": rows}, True
    rows, ok = [], True
    for m, r, j in grid_points(args.id, args.rmax, args.mmax):
        rep = verify_identity(args.id, _verify_params(args.id, m, r, j), ctx)
        ok = ok and rep.passed
        doc = E.report_doc(rep)
        rows.append({"id": args.id, "m": m, "r": r, "j": j, "pass": rep.passed,
                     "max_residual": E.dec(rep.max_residual, E.RESIDUAL_DIGITS),
                     "buckets": len(doc["buckets"]), "open": doc["open"],
                     "derived": doc["derived"]})
    return {"id": args.id, "pass": ok, "rows": rows}, ok


_COMMANDS = {"xi": _cmd_xi, "factor": _cmd_factor, "const": _cmd_const,
             "verify": _cmd_verify, "grid": _cmd_grid}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    # errors raised while parsing still honour --format json
    pairs = zip(argv, argv[1:])
    fmt = "json" if "--format=json" in argv or ("--format", "json") in pairs else "text"
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: xi, factor, const, verify, grid")
        fmt = args.format
        ctx = _ctx(args)
        doc, ok = _COMMANDS[args.command](args, ctx)
        out.write(E.emit(doc, fmt))
        return EXIT_OK if ok else EXIT_FAIL
    except SwcalcError as exc:
        err = {"error": {"code": exc.code, "message": exc.message, "param": exc.param}}
        if fmt == "json":
            out.write(E.to_json(err))
        else:
            sys.stderr.write(f"swcalc: {exc.code} error: {exc.message}\n")
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
