"""The completed zeta function xi(s) = pi^(-s/2) Gamma(s/2) zeta(s) of Q.

xi(s) = xi(1 - s), with simple poles at 0 and 1 and no real zeros.
``xi_conv`` implements the convention that "xi(0)" and "xi(1)" inside
constant formulas stand for the residues at those points.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import UsageError
from .laurent import LaurentSeries
from .precision import PrecisionContext, to_rational
from .special import _SeriesCache, archimedean_series, zeta_series

_xi_cache = _SeriesCache()


def xi_pole_order(x) -> int:
    x = Fraction(x)
    return 1 if x in (0, 1) else 0


def xi_series(center, order: int, ctx: PrecisionContext) -> LaurentSeries:
    """Laurent series of xi at ``center`` up to (s - center)^order."""
    center = to_rational(center)
    order = int(order)
    if order < -1:
        raise UsageError("order must be at least -1", "order")
    key = (center, ctx.decimal_digits, ctx.guard_digits)
    hit = _xi_cache.get(key, order)
    if hit is not None:
        return hit
    if center < Fraction(1, 2):
        mirror = xi_series(1 - center, order, ctx)
        with ctx.working():
            cs = [c * (-1) ** (mirror.lead_exp + i) for i, c in enumerate(mirror.coeffs)]
        series = LaurentSeries(center, mirror.lead_exp, cs, ctx, trunc_order=mirror.trunc_order,
                               scale=mirror.scale, strip=False)
        _xi_cache.put(key, series)
        return series
    # arch and zeta leads are in {-1, 0, 1}, so two extra terms cover the product
    gamma_part = archimedean_series(center, order + 2, ctx)
    zeta_part = zeta_series(center, order + 2, ctx)
    series = (gamma_part * zeta_part).truncate(order)
    _xi_cache.put(key, series)
    return series


def xi_conv(n, ctx: PrecisionContext):
    """xi(n) with the residue convention at n = 0, 1."""
    n = to_rational(n)
    if n in (0, 1):
        return xi_series(n, 0, ctx).coeff(-1)
    return xi_series(n, 0, ctx).coeff(0)


class XiConventionTable:
    """Memoised ``xi_conv`` values for one precision context."""

    def __init__(self, ctx: PrecisionContext):
        self.ctx = ctx
        self.conv_values: dict = {Fraction(0): xi_conv(0, ctx), Fraction(1): xi_conv(1, ctx)}

    def __call__(self, n):
        n = to_rational(n)
        v = self.conv_values.get(n)
        if v is None:
            v = self.conv_values[n] = xi_conv(n, self.ctx)
        return v


def xi_scaled_series(scale, shift, center, order: int, ctx: PrecisionContext) -> LaurentSeries:
    """Laurent series in (s - center) of xi(scale*s + shift)."""
    scale, shift, center = to_rational(scale), to_rational(shift), to_rational(center)
    if scale == 0:
        raise UsageError("scale must be non-zero", "scale")
    arg = scale * center + shift
    base = xi_series(arg, order, ctx)
    with ctx.working():
        a = mpmath.mpf(scale.numerator) / scale.denominator
        cs = [c * a ** (base.lead_exp + i) for i, c in enumerate(base.coeffs)]
        sc = base.scale * max(abs(a) ** base.trunc_order, abs(a) ** base.lead_exp, 1)
    return LaurentSeries(center, base.lead_exp, cs, ctx, trunc_order=base.trunc_order,
                         scale=sc, strip=False)
