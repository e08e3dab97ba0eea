"""Re-running the induction arguments for the spherical identities.

Each identity is checked the same way: build the constant terms of both
sides, substitute what earlier steps established, read off one
(exponent, log) bucket and solve it for the constant or atom the argument
determines. Every other bucket must vanish, either directly or after full
expansion by the vanishing prover.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from ..constants import (c_mr, c_r, d_mr, f_value_printed, g_value_printed,
                         g_value_series, transfer_const)
from ..errors import DerivationError, UsageError
from ..factors import lambda_m
from ..precision import PrecisionContext, default_context, format_decimal
from ..xi import XiConventionTable
from .atoms import UNIT, SymbolicCoeff, atom
from .expansion import atom_constant_term
from .knowledge import KnowledgeBase, VanishingProver
from .report import VerificationReport

IDENTITIES = (
    "no-pole-i", "no-pole-ii", "no-pole-iii",
    "first-term-base", "first-term-step", "boundary-first-term",
    "second-range-first-term-base", "second-range-first-term-step",
    "second-term-base", "second-term-step",
    "weak-coefficient", "boundary-constant-2",
)

half = Fraction(1, 2)


def _int_param(params, name, required=True, default=None):
    v = params.get(name)
    if v is None:
        if required:
            raise UsageError(f"parameter {name} is required", name)
        return default
    try:
        iv = int(v)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"parameter {name} must be an integer", name) from exc
    if iv != v and not isinstance(v, str):
        raise UsageError(f"parameter {name} must be an integer", name)
    return iv


class _Run:
    """Shared state of one verification run."""

    def __init__(self, ident, params, ctx, kb, seed=None):
        self.ctx = ctx
        self.kb = kb
        self.seed = seed
        self.prover = VanishingProver(kb, ctx)
        self.rep = VerificationReport(ident, dict(params), ctx.decimal_digits, ctx.tolerance)
        self.rules: list = []

    def ct(self, sides) -> dict:
        """sum of coef * constant term over the given (coef, atom) sides."""
        out: dict = {}
        for coef, a in sides:
            parts = {(Fraction(0), 0): SymbolicCoeff.of(UNIT)} if a.is_unit else atom_constant_term(a, self.kb, self.ctx)
            for key, sc in parts.items():
                term = sc.scaled(coef)
                out[key] = term if key not in out else out[key] + term
        self.rep.step("constant-term", [a for _, a in sides], sorted(out))
        return out

    def subst(self, sc, protected=frozenset()):
        log: list = []
        out = self.kb.substitute(sc, protected, seed=self.seed, log=log)
        self.rules.extend(log)
        return out

    def check_buckets(self, rel: dict, skip=(), protected=frozenset(), label=None):
        """Every bucket outside ``skip`` must vanish."""
        for key in sorted(rel):
            if key in skip:
                continue
            sc = self.subst(rel[key], protected)
            res = sc.residual()
            status = "closed"
            if res >= self.rep.tolerance or self.kb.unresolved(sc):
                ok, res = self.prover.combination(sc)
                status = "expanded" if ok else "fail"
            self.rep.add_bucket(key, res, status)
            if label:
                self.rep.buckets[-1]["atom"] = label

    def finish(self):
        counts: dict = {}
        for name, _ in self.rules:
            counts[name] = counts.get(name, 0) + 1
        if counts:
            self.rep.step("substitute", [f"{k} x{v}" for k, v in sorted(counts.items())])
        return self.rep


def _fit(expr: SymbolicCoeff, basis: SymbolicCoeff):
    """Scalar X with expr = X * basis, and the relative residual."""
    if not basis.terms:
        raise DerivationError("the comparison side reduced to zero")
    pivot = max(basis.terms, key=lambda a: abs(basis.terms[a]))
    x = expr.get(pivot) / basis.terms[pivot]
    rem = expr - basis.scaled(x)
    rem.scale = max(expr.scale, abs(x) * basis.scale)
    return x, rem.residual()


def _solve_atom(sc: SymbolicCoeff, target):
    """target = -(sc - a*target)/a, where a is the coefficient of target."""
    a = sc.get(target)
    if a == 0 or abs(a) <= sc.scale * mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
        raise DerivationError(f"{target} does not appear in the solving bucket")
    rest = SymbolicCoeff({b: v for b, v in sc.terms.items() if b != target}, sc.scale)
    out = rest.scaled(-1 / a)
    out.scale = sc.scale / abs(a)
    return out


# vanishing lemmas

def _prove(run, a, label):
    """Record the constant-term buckets of ``a`` checked by the prover."""
    if run.kb.resolve(a) is not None and run.kb.resolve(a)[0] == "pole-table":
        run.rep.add_bucket((a.s0, 0), 0, "table")
        run.rep.buckets[-1]["atom"] = label
        return True
    parts = atom_constant_term(a, run.kb, run.ctx)
    run.rep.step("constant-term", [a], sorted(parts))
    run.check_buckets(parts, label=label)
    ok = all(b["status"] != "fail" for b in run.rep.buckets if b.get("atom") == label)
    run.rep.derived[f"vanishes {label}"] = ok
    return ok


def _no_pole_i(params, ctx, seed):
    r = _int_param(params, "r")
    if r < 1:
        raise UsageError("no-pole-i needs r >= 1", "r")
    kb = KnowledgeBase(ctx, disable={"no-pole-i"})
    run = _Run("no-pole-i", {"r": r}, ctx, kb, seed)
    for m in range(r + 1, 2 * r + 3):
        for s0 in (Fraction(r + 2, 2), Fraction(r + 3, 2)):
            a = atom(m, r, -2, s0)
            _prove(run, a, str(a))
    return run.finish()


def _no_pole_ii(params, ctx, seed):
    r = _int_param(params, "r")
    if r < 1:
        raise UsageError("no-pole-ii needs r >= 1", "r")
    p = Fraction(r + 1, 2)
    target = atom(2 * r + 1, r, -2, p)
    kb = KnowledgeBase(ctx, exclude={("no-pole-ii", target)})
    run = _Run("no-pole-ii", {"r": r}, ctx, kb, seed)
    # the left side vanishes: no double pole in the first term range
    rel = run.ct([(1, atom(2 * r + 2, r, -2, p))])
    key = (Fraction(r), 0)
    sc = run.subst(rel.get(key, SymbolicCoeff()), frozenset({target}))
    value = _solve_atom(sc, target)
    run.rep.step("solve", [target], [key])
    res = value.residual()
    run.rep.add_bucket(key, res, "solved")
    run.rep.solved["value"] = max((abs(v) for v in value.terms.values()), default=mpmath.mpf(0))
    run.check_buckets(rel, skip={key}, protected=frozenset({target}))
    return run.finish()


def _no_pole_iii(params, ctx, seed):
    r = _int_param(params, "r")
    m = _int_param(params, "m", required=False, default=2 * r + 2)
    if r < 1 or m < r + 1:
        raise UsageError("no-pole-iii needs r >= 1 and m >= r+1", "m")
    kb = KnowledgeBase(ctx, disable={"no-pole-iii"})
    run = _Run("no-pole-iii", {"m": m, "r": r}, ctx, kb, seed)
    a = atom(m, r, -1, Fraction(r + 3, 2))
    ok = _prove(run, a, str(a))
    if r + 2 <= m <= 2 * r + 1:
        run.rep.notes.append("the vanishing holds only for m >= 2r+2 or m = r+1; "
                             "here the expansion finds a nonzero coefficient")
    if not ok:
        run.rep.comparisons.append({"name": "vanishing", "engine": mpmath.mpf(1), "reference": mpmath.mpf(0),
                                    "rel_err": mpmath.mpf(1), "pass": False, "advisory": False})
    return run.finish()


# first term identities

def _first_term(ident, m, r, ctx, seed):
    T = atom(m, r, -1, Fraction(r + 1, 2))
    S = atom(m, m, -1, Fraction(m - 2 * r - 1, 2))
    kb = KnowledgeBase(ctx, exclude={("first-term", T)})
    run = _Run(ident, {"m": m, "r": r}, ctx, kb, seed)
    lhs = run.ct([(1, T)])
    rhs = run.ct([(1, S)])
    key = (Fraction(m - r - 1), 0)
    t = run.subst(lhs.get(key, SymbolicCoeff()))
    s = run.subst(rhs.get(key, SymbolicCoeff()))
    x, res = _fit(t, s)
    run.rep.step("solve", ["c"], [key])
    run.rep.add_bucket(key, res, "solved")
    run.rep.solved["c"] = x
    run.rep.derived["c"] = x
    run.rep.compare("c closed", x, c_mr(m, r, "closed", ctx).value)
    run.rep.compare("c recursive", x, c_mr(m, r, "recursive", ctx).value)
    rel = {k: lhs.get(k, SymbolicCoeff()) - rhs.get(k, SymbolicCoeff()).scaled(x)
           for k in set(lhs) | set(rhs)}
    run.check_buckets(rel, skip={key})
    return run.finish()


def _first_term_base(params, ctx, seed):
    m = _int_param(params, "m")
    r = _int_param(params, "r", required=False, default=1)
    if r != 1 or m < 4:
        raise UsageError("first-term-base needs r = 1 and m >= 4", "m")
    return _first_term("first-term-base", m, 1, ctx, seed)


def _first_term_step(params, ctx, seed):
    m = _int_param(params, "m")
    r = _int_param(params, "r")
    if r < 2 or m <= 2 * r + 1:
        raise UsageError("first-term-step needs r >= 2 and m > 2r+1", "m")
    return _first_term("first-term-step", m, r, ctx, seed)


def _boundary_first_term(params, ctx, seed):
    r = _int_param(params, "r")
    if r < 1:
        raise UsageError("boundary-first-term needs r >= 1", "r")
    p = Fraction(r + 1, 2)
    target = atom(2 * r + 1, r, -1, p)
    S = atom(2 * r + 1, 2 * r + 1, 0, Fraction(0))
    kb = KnowledgeBase(ctx, exclude={("boundary", target)})
    run = _Run("boundary-first-term", {"r": r}, ctx, kb, seed)
    c_next = c_mr(2 * r + 2, r, "closed", ctx).value
    rel = run.ct([(1, atom(2 * r + 2, r, -1, p)), (-c_next, atom(2 * r + 2, 2 * r + 2, -1, half))])
    key = (Fraction(r), 0)
    prot = frozenset({target})
    value = _solve_atom(run.subst(rel[key], prot), target)
    x, res = _fit(value, run.subst(SymbolicCoeff.of(S)))
    run.rep.step("solve", [target], [key])
    run.rep.add_bucket(key, res, "solved")
    run.rep.solved["c_r"] = x
    run.rep.derived["c_r"] = x
    ref = c_r(r, ctx)
    run.rep.compare("c_r closed", x, ref.routes["closed"])
    run.rep.compare("c_r composite", x, ref.routes["composite"])
    run.check_buckets(rel, skip={key}, protected=prot)
    return run.finish()


def _second_range(ident, m, r, ctx, seed):
    p = Fraction(r + 1, 2)
    target = atom(m, r, -2, p)
    S = atom(m, m, -1, Fraction(2 * r - m + 1, 2))
    kb = KnowledgeBase(ctx, exclude={("second-range", target)})
    run = _Run(ident, {"m": m, "r": r}, ctx, kb, seed)
    if m == 2 * r:
        # premise: no double pole on the boundary
        rel = run.ct([(1, atom(2 * r + 1, r, -2, p))])
    else:
        d_next = d_mr(m + 1, r, ctx).value
        rel = run.ct([(1, atom(m + 1, r, -2, p)),
                      (-d_next, atom(m + 1, m + 1, -1, Fraction(2 * r - m, 2)))])
    key = (Fraction(r), 0)
    prot = frozenset({target})
    value = _solve_atom(run.subst(rel[key], prot), target)
    x, res = _fit(value, run.subst(SymbolicCoeff.of(S)))
    run.rep.step("solve", [target], [key])
    run.rep.add_bucket(key, res, "solved")
    run.rep.solved["d"] = x
    run.rep.derived["d"] = x
    run.rep.compare("d corrected", x, d_mr(m, r, ctx, "corrected").value)
    run.rep.compare("d printed", x, d_mr(m, r, ctx, "printed").value, advisory=True,
                    note="printed seed has xi(r) and xi(2r) swapped")
    run.check_buckets(rel, skip={key}, protected=prot)
    return run.finish()


def _second_range_base(params, ctx, seed):
    r = _int_param(params, "r")
    if r < 1:
        raise UsageError("second-range-first-term-base needs r >= 1", "r")
    return _second_range("second-range-first-term-base", 2 * r, r, ctx, seed)


def _second_range_step(params, ctx, seed):
    r = _int_param(params, "r")
    m = _int_param(params, "m")
    if r < 2 or not r + 1 <= m <= 2 * r - 1:
        raise UsageError("second-range-first-term-step needs r+1 <= m <= 2r-1", "m")
    return _second_range("second-range-first-term-step", m, r, ctx, seed)


# second term identities

def _level_atoms(r, j):
    """T1, T2, S0, S1 of the level-j identity on O(2r-j, 2r-j)."""
    m = 2 * r - j
    t2 = atom(m, r - j - 1, 0, Fraction(r - j, 2))
    return (atom(m, r, -1, Fraction(r + 1, 2)), t2,
            atom(m, m, 0, Fraction(1 + j, 2)), atom(m, m, -1, Fraction(1 + j, 2)))


def _second_term_level(run, r, j, prev):
    """Derive the level-j identity  A T1 + B T2 = X S0 + gamma S1."""
    ctx = run.ctx
    T1, T2, S0, S1 = _level_atoms(r, j)
    m = 2 * r - j
    if prev is None:
        cr = c_r(r, ctx).value
        rel = run.ct([(1, atom(2 * r + 1, r, -1, Fraction(r + 1, 2))),
                      (-cr, atom(2 * r + 1, 2 * r + 1, 0, Fraction(0)))])
    else:
        pT1, pT2, pS0, pS1 = _level_atoms(r, j - 1)
        rel = run.ct([(prev["A"], pT1), (prev["B"], pT2), (-prev["X"], pS0), (-prev["gamma"], pS1)])
    prot = frozenset({T1, T2, S0, S1})
    key = (Fraction(r), 0)
    sc = run.subst(rel[key], prot)
    known = {T1, T2, S0, S1}
    rest = SymbolicCoeff({a: v for a, v in sc.terms.items() if a not in known}, sc.scale)
    A, B, X, gamma = sc.get(T1), sc.get(T2), -sc.get(S0), -sc.get(S1)
    glead, gord = g_value_series(r, j, ctx)
    b_conv = glead if prev is None else prev["B"] * glead
    out = {"A": A, "B": B, "X": X, "gamma": gamma, "G_lead": glead, "G_order": gord}
    if T2.is_unit:
        lam = lambda_m(m, ctx)
        out["B"] = b_conv
        out["gamma"] = gamma - (B - b_conv) / lam
        run.rep.notes.append(f"level {j}: T2 is the unit and S1 = lambda_{m} * 1, so B is fixed to the "
                             "product of leading G coefficients and gamma absorbs the rest")
    run.rep.step("solve", ["A", "B", "X", "gamma"], [key])
    res = rest.residual()
    if rest.terms and res >= run.rep.tolerance:
        ok, res = run.prover.combination(rest)
    run.rep.add_bucket(key, res, "solved")
    return out, rel, key, prot, b_conv


def _second_term_chain(run, r, jmax):
    prev = None
    levels = []
    for j in range(0, jmax + 1):
        out, rel, key, prot, b_conv = _second_term_level(run, r, j, prev)
        levels.append((out, rel, key, prot, b_conv, prev))
        prev = out
    return levels


def _second_term_compare(run, r, j, out, b_conv, prev):
    ctx = run.ctx
    a_ref = mpmath.fprod([f_value_printed(r, i, ctx) for i in range(j + 1)])
    run.rep.compare("A vs product of F values", out["A"], a_ref)
    run.rep.compare("X vs 2 c_r", out["X"], 2 * c_r(r, ctx).value)
    if not _level_atoms(r, j)[1].is_unit:
        run.rep.compare("B vs product of series G leads", out["B"], b_conv)
    b_printed = mpmath.fprod([g_value_printed(r, i, ctx) for i in range(j + 1)])
    run.rep.compare("B vs product of printed G values", out["B"], b_printed, advisory=True,
                    note="printed G values use xi(i) where the factor gives xi(-i) = xi(i+1)")


def _second_term_base(params, ctx, seed):
    r = _int_param(params, "r")
    if r < 1:
        raise UsageError("second-term-base needs r >= 1", "r")
    run = _Run("second-term-base", {"r": r}, ctx, KnowledgeBase(ctx), seed)
    (out, rel, key, prot, b_conv, prev), = _second_term_chain(run, r, 0)
    _second_term_compare(run, r, 0, out, b_conv, prev)
    _record_level(run, out)
    run.check_buckets(rel, skip={key}, protected=prot)
    return run.finish()


def _record_level(run, out):
    for name in ("A", "B", "X", "gamma"):
        run.rep.solved[name] = out[name]
    run.rep.derived["gamma"] = out["gamma"]
    run.rep.notes.append("gamma is derived by the engine and has no closed form to compare against")


def _second_term_step(params, ctx, seed):
    r = _int_param(params, "r")
    j = _int_param(params, "j")
    if r < 2 or not 1 <= j <= r - 1:
        raise UsageError("second-term-step needs r >= 2 and 1 <= j <= r-1", "j")
    run = _Run("second-term-step", {"r": r, "j": j}, ctx, KnowledgeBase(ctx), seed)
    levels = _second_term_chain(run, r, j)
    # only the last level is under test; earlier buckets belong to earlier runs
    run.rep.buckets = run.rep.buckets[-1:]
    out, rel, key, prot, b_conv, prev = levels[-1]
    _second_term_compare(run, r, j, out, b_conv, prev)
    _record_level(run, out)
    run.rep.derived["gamma_consumed"] = prev["gamma"]
    run.rep.solved["gamma_consumed"] = prev["gamma"]
    run.check_buckets(rel, skip={key}, protected=prot)
    return run.finish()


def _weak_coefficient(params, ctx, seed):
    r = _int_param(params, "r")
    m = _int_param(params, "m", required=False)
    if r < 1 or (m is not None and not r + 1 <= m <= 2 * r):
        raise UsageError("weak-coefficient needs r >= 1 and r+1 <= m <= 2r", "m")
    ms = [m] if m is not None else list(range(2 * r, r, -1))
    run = _Run("weak-coefficient", {"m": m, "r": r}, ctx, KnowledgeBase(ctx), seed)
    levels = _second_term_chain(run, r, 2 * r - min(ms))
    run.rep.buckets = []
    xi = XiConventionTable(ctx)
    two_c = 2 * c_r(r, ctx).value
    for mm in ms:
        j = 2 * r - mm
        out = levels[j][0]
        with ctx.working():
            tail = mpmath.fprod([xi(i) / xi(mm - i + 1) for i in range(1, mm - r)])
            kappa = out["B"] * tail / two_c
        ref = transfer_const("kappa", mm, r, ctx)
        run.rep.derived[f"kappa m={mm}"] = kappa
        run.rep.solved[f"kappa_{mm}"] = kappa
        run.rep.compare(f"kappa m={mm}", kappa, ref.value,
                        note=None if j == 0 else "engine value is kappa * xi(j+1), j = 2r-m")
        with ctx.working():
            run.rep.derived[f"kappa ratio m={mm}"] = kappa / ref.value
    if m is not None:
        run.rep.constant = run.rep.solved[f"kappa_{m}"]
    return run.finish()


def _boundary_constant_2(params, ctx, seed):
    r = _int_param(params, "r")
    if r < 1:
        raise UsageError("boundary-constant-2 needs r >= 1", "r")
    inner = _boundary_first_term({"r": r}, ctx, seed)
    xi = XiConventionTable(ctx)
    with ctx.working():
        const = mpmath.fprod([xi(i) / xi(2 * r + 2 - i) for i in range(1, r + 1)]) / inner.solved["c_r"]
    rep = VerificationReport("boundary-constant-2", {"r": r}, ctx.decimal_digits, ctx.tolerance)
    rep.buckets = inner.buckets
    rep.comparisons = list(inner.comparisons)
    rep.log = inner.log
    rep.solved = {"c_r": inner.solved["c_r"], "constant": const}
    rep.derived = {"c_r": inner.solved["c_r"], "constant": const}
    rep.constant = const
    rep.compare("constant vs 2", const, mpmath.mpf(2))
    return rep


def gamma_rows(ctx: PrecisionContext, rmax: int = 4) -> list:
    """Golden rows for the engine-derived second-term coefficients gamma_j.

    These have no closed form; the rows pin the engine output and are
    labelled ``derived-unverifiable``.
    """
    rows = []
    with ctx.working():
        for r in range(1, rmax + 1):
            run = _Run("second-term-step", {"r": r}, ctx, KnowledgeBase(ctx), None)
            for j, level in enumerate(_second_term_chain(run, r, r - 1)):
                rows.append({"name": "gamma", "m": 2 * r - j, "r": r, "j": j,
                             "digits": ctx.decimal_digits,
                             "value": format_decimal(level[0]["gamma"], ctx.decimal_digits),
                             "d_power": "0", "status": "derived-unverifiable"})
    return rows


_DISPATCH = {
    "no-pole-i": _no_pole_i,
    "no-pole-ii": _no_pole_ii,
    "no-pole-iii": _no_pole_iii,
    "first-term-base": _first_term_base,
    "first-term-step": _first_term_step,
    "boundary-first-term": _boundary_first_term,
    "second-range-first-term-base": _second_range_base,
    "second-range-first-term-step": _second_range_step,
    "second-term-base": _second_term_base,
    "second-term-step": _second_term_step,
    "weak-coefficient": _weak_coefficient,
    "boundary-constant-2": _boundary_constant_2,
}


def verify_identity(ident: str, params: dict | None = None, ctx: PrecisionContext | None = None,
                    seed: int | None = None) -> VerificationReport:
    """Run one derivation. ``seed`` shuffles the substitution order."""
    fn = _DISPATCH.get(ident)
    if fn is None:
        raise UsageError(f"unknown identity {ident!r}; known: {', '.join(IDENTITIES)}", "id")
    ctx = ctx or default_context()
    params = {k: v for k, v in (params or {}).items() if v is not None}
    with ctx.working():
        return fn(params, ctx, seed)
