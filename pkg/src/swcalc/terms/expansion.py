"""Constant terms along the rank-one parabolic and their graded Laurent expansion.

A graded expansion collects, at a point s0, the coefficients of
|a|^e (log|a|)^k (s - s0)^n. Buckets are keyed by the exact pair (e, k).
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from ..errors import DerivationError, UsageError, WindowError
from ..factors import FactorExpr, factor_series, make_factor
from ..laurent import LaurentSeries
from ..precision import PrecisionContext, to_rational
from .atoms import UNIT, UNIT_FAMILY, ExpansionTerm, Family, SymbolicCoeff, atom

MAX_LOG = 2


def constant_term(m: int, r: int) -> list:
    """The constant term of E^{(m,r)}(s) as a list of ExpansionTerm."""
    m, r = int(m), int(r)
    if m < 2 or not 1 <= r <= m:
        raise UsageError("constant_term needs m >= 2 and 1 <= r <= m", "r")
    h = Fraction(1, 2)
    if r == m:
        top = Fraction(m - 1, 2)
        return [
            ExpansionTerm(Fraction(1), top, FactorExpr.one(), Family(m - 1, m - 1, h)),
            ExpansionTerm(Fraction(-1), top, make_factor("H", m), Family(m - 1, m - 1, -h)),
        ]
    top = m - Fraction(r + 1, 2)
    low = Family(m - 1, r - 1, h) if r > 1 else UNIT_FAMILY
    low_minus = Family(m - 1, r - 1, -h) if r > 1 else UNIT_FAMILY
    return [
        ExpansionTerm(Fraction(1), top, FactorExpr.one(), low),
        ExpansionTerm(Fraction(0), Fraction(r), make_factor("F", m, r), Family(m - 1, r, Fraction(0))),
        ExpansionTerm(Fraction(-1), top, make_factor("G", m, r), low_minus),
    ]


class SymSeries:
    """Laurent window lo..hi with SymbolicCoeff coefficients."""

    __slots__ = ("center", "lo", "hi", "coeffs")

    def __init__(self, center, lo: int, hi: int, coeffs: dict | None = None):
        self.center = to_rational(center)
        self.lo, self.hi = int(lo), int(hi)
        self.coeffs = dict(coeffs or {})

    def coeff(self, n: int) -> SymbolicCoeff:
        if n > self.hi:
            raise WindowError(f"coefficient {n} above window top {self.hi}")
        return self.coeffs.get(n, SymbolicCoeff())

    def __repr__(self):
        return f"SymSeries(center={self.center}, [{self.lo},{self.hi}], {self.coeffs})"


class GradedExpansion:
    __slots__ = ("center", "lo", "hi", "buckets")

    def __init__(self, center, lo: int, hi: int):
        self.center = to_rational(center)
        self.lo, self.hi = lo, hi
        self.buckets: dict = {}

    def _add(self, key, n, a, c):
        b = self.buckets.setdefault(key, {})
        sc = b.get(n)
        if sc is None:
            sc = b[n] = SymbolicCoeff()
        sc.add_term(a, c)

    def keys(self):
        return sorted(self.buckets)

    def at_order(self, n: int) -> dict:
        """{(e, k): SymbolicCoeff} for the coefficient of (s - s0)^n."""
        if not self.lo <= n <= self.hi:
            raise WindowError(f"order {n} outside graded window [{self.lo},{self.hi}]")
        return {key: self.buckets[key][n] for key in self.keys() if n in self.buckets[key]}


def _factor_lead_and_series(factor, s0, top, ctx):
    if isinstance(factor, LaurentSeries):
        if factor.center != s0:
            raise UsageError("factor series centered elsewhere")
        return factor.lead_exp, factor
    lead = factor.pole_order_at(s0)
    if top < lead:
        return lead, None
    return lead, factor_series(factor, s0, top, ctx)


def grade(terms, s0, depth: int, kb, ctx: PrecisionContext, lo: int | None = None,
          max_log: int | None = MAX_LOG) -> GradedExpansion:
    """Expand terms at s0, keeping ``depth`` orders above the leading one.

    Family poles come from ``kb.max_pole_order``; |a|^(alpha s + beta) is
    expanded as |a|^(alpha s0 + beta) exp(alpha L t). Log powers above
    ``max_log`` must vanish; ``None`` keeps every power.
    """
    s0 = to_rational(s0)
    if depth < 0:
        raise UsageError("depth must be non-negative", "depth")
    info = []
    for t in terms:
        fam = t.family
        pole = 0 if fam.is_unit else kb.max_pole_order(fam.m, fam.r, s0 + fam.shift)
        flead = t.factor.lead_exp if isinstance(t.factor, LaurentSeries) else t.factor.pole_order_at(s0)
        info.append((t, pole, flead))
    base = min((flead - pole for _, pole, flead in info), default=0)
    lo = base if lo is None else lo
    hi = lo + depth
    ge = GradedExpansion(s0, lo, hi)
    for t, pole, flead in info:
        fam = t.family
        e0 = t.alpha * s0 + t.beta
        lead, fs = _factor_lead_and_series(t.factor, s0, hi + pole, ctx)
        if fs is None:
            continue
        if fs.trunc_order < hi + pole and not fs.is_zero:
            raise WindowError("factor series too short for the requested depth")
        with ctx.working():
            alpha = mpmath.mpf(t.alpha.numerator) / t.alpha.denominator
            logc = [alpha ** k / mpmath.factorial(k) for k in range(hi - lead + pole + 1)]
            for n in range(lo, hi + 1):
                for k in range(0, n - lead + pole + 1):
                    if t.alpha == 0 and k:
                        break
                    dmax = n - k - lead
                    for d in range(-pole if not fam.is_unit else 0, dmax + 1):
                        j = n - k - d
                        if fam.is_unit and d != 0:
                            continue
                        fj = fs.coeff(j) if j <= fs.trunc_order else None
                        if fj is None:
                            raise WindowError("factor series too short")
                        if fj == 0:
                            continue
                        a = UNIT if fam.is_unit else atom(fam.m, fam.r, d, s0 + fam.shift)
                        ge._add((e0, k), n, a, fj * logc[k])
    for (e, k), b in ge.buckets.items():
        if max_log is not None and k > max_log:
            for n, sc in b.items():
                if not sc.is_zero(ctx):
                    raise DerivationError(f"log degree {k} appears in bucket {e} at order {n}")
    return ge


def extract(ge: GradedExpansion, exponent_value, log_degree: int) -> SymSeries:
    key = (to_rational(exponent_value), int(log_degree))
    b = ge.buckets.get(key, {})
    return SymSeries(ge.center, ge.lo, ge.hi, {n: sc for n, sc in b.items()})


def atom_constant_term(a, kb, ctx: PrecisionContext, max_log: int | None = MAX_LOG) -> dict:
    """{(e, k): SymbolicCoeff} for the constant term of one atom."""
    if a.is_unit:
        return {(Fraction(0), 0): SymbolicCoeff.of(UNIT)}
    if a.m < 2:
        raise UsageError("no constant term below O(2,2)")
    terms = constant_term(a.m, a.r)
    lo = min(t.factor.pole_order_at(a.s0)
             - (0 if t.family.is_unit else kb.max_pole_order(t.family.m, t.family.r, a.s0 + t.family.shift))
             for t in terms)
    if a.d < lo:
        return {}
    with ctx.working():
        ge = grade(terms, a.s0, a.d - lo, kb, ctx, lo=lo, max_log=max_log)
    return ge.at_order(a.d)
