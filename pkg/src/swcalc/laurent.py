"""Truncated Laurent series at an exact rational center.

A series stores the coefficients of (s - center)^k for
lead_exp <= k <= trunc_order. Everything above trunc_order is unknown.
A series whose represented coefficients all vanish is flagged zero; then
``coeffs`` is empty and ``lead_exp == trunc_order + 1``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import DomainError, UsageError, WindowError
from .precision import PrecisionContext


class LaurentSeries:
    __slots__ = ("center", "lead_exp", "coeffs", "trunc_order", "ctx", "scale")

    def __init__(self, center, lead_exp: int, coeffs: Sequence, ctx: PrecisionContext,
                 trunc_order: int | None = None, scale=None, strip: bool = True):
        self.center = Fraction(center)
        self.ctx = ctx
        with ctx.working():
            cs = [mpmath.mpmathify(c) for c in coeffs]
            if trunc_order is None:
                trunc_order = lead_exp + len(cs) - 1
            cs = cs[: max(trunc_order - lead_exp + 1, 0)]
            if scale is None:
                scale = max((abs(c) for c in cs), default=mpmath.mpf(0))
            self.scale = scale
            if strip:
                thr = ctx.zero_threshold * (scale if scale else 1)
                k = 0
                while k < len(cs) and abs(cs[k]) <= thr:
                    k += 1
                cs = cs[k:]
                lead_exp += k
        if not cs:
            lead_exp = trunc_order + 1
        self.lead_exp = int(lead_exp)
        self.coeffs = tuple(cs)
        self.trunc_order = int(trunc_order)

    # construction helpers

    @classmethod
    def constant(cls, center, value, order: int, ctx: PrecisionContext):
        return cls(center, 0, [value] + [0] * order, ctx, trunc_order=order, strip=False)

    @classmethod
    def zero(cls, center, trunc_order: int, ctx: PrecisionContext):
        return cls(center, trunc_order + 1, [], ctx, trunc_order=trunc_order)

    # inspection

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def pole_order(self) -> int:
        return max(-self.lead_exp, 0) if self.coeffs else 0

    def coeff(self, k: int):
        if k > self.trunc_order:
            raise WindowError(f"coefficient {k} above truncation order {self.trunc_order}")
        if k < self.lead_exp:
            return mpmath.mpf(0)
        return self.coeffs[k - self.lead_exp]

    def window(self, lo: int, hi: int) -> list:
        return [self.coeff(k) for k in range(lo, hi + 1)]

    def truncate(self, order: int) -> "LaurentSeries":
        if order > self.trunc_order:
            raise WindowError(f"cannot extend series to order {order}")
        n = max(order - self.lead_exp + 1, 0)
        return LaurentSeries(self.center, self.lead_exp, self.coeffs[:n], self.ctx,
                             trunc_order=order, scale=self.scale, strip=False)

    def __repr__(self):
        terms = ", ".join(mpmath.nstr(c, 8) for c in self.coeffs[:4])
        return (f"LaurentSeries(center={self.center}, lead={self.lead_exp}, "
                f"trunc={self.trunc_order}, [{terms}{', ...' if len(self.coeffs) > 4 else ''}])")

    # arithmetic

    def _known(self) -> int:
        """Number of known coefficients from the leading one to the truncation."""
        return self.trunc_order - self.lead_exp + 1

    def _padded(self, n: int) -> tuple:
        return self.coeffs[:n] + (mpmath.mpf(0),) * max(n - len(self.coeffs), 0)

    def _check(self, other: "LaurentSeries"):
        if not isinstance(other, LaurentSeries):
            raise UsageError("expected a LaurentSeries")
        if other.center != self.center:
            raise UsageError(f"center mismatch: {self.center} vs {other.center}")

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            return self + LaurentSeries.constant(self.center, other, max(self.trunc_order, 0), self.ctx)
        self._check(other)
        lo = min(self.lead_exp, other.lead_exp)
        hi = min(self.trunc_order, other.trunc_order)
        with self.ctx.working():
            cs = [self.coeff(k) + other.coeff(k) for k in range(lo, hi + 1)]
            scale = max(self.scale, other.scale)
        return LaurentSeries(self.center, lo, cs, self.ctx, trunc_order=hi, scale=scale)

    __radd__ = __add__

    def __neg__(self):
        with self.ctx.working():
            cs = [-c for c in self.coeffs]
        return LaurentSeries(self.center, self.lead_exp, cs, self.ctx,
                             trunc_order=self.trunc_order, scale=self.scale, strip=False)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scaled(self, c) -> "LaurentSeries":
        with self.ctx.working():
            c = mpmath.mpmathify(c)
            if c == 0:
                return LaurentSeries.zero(self.center, self.trunc_order, self.ctx)
            cs = [c * x for x in self.coeffs]
            scale = abs(c) * self.scale
        return LaurentSeries(self.center, self.lead_exp, cs, self.ctx,
                             trunc_order=self.trunc_order, scale=scale, strip=False)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return self.scaled(other)
        self._check(other)
        a, b = self, other
        if a.is_zero or b.is_zero:
            if a.is_zero and b.is_zero:
                hi = a.trunc_order + b.trunc_order + 1
            elif a.is_zero:
                hi = a.trunc_order + b.lead_exp
            else:
                hi = b.trunc_order + a.lead_exp
            return LaurentSeries.zero(a.center, hi, a.ctx)
        lead = a.lead_exp + b.lead_exp
        n = min(a._known(), b._known())
        ac, bc = a._padded(n), b._padded(n)
        with a.ctx.working():
            cs = [mpmath.fsum(ac[i] * bc[k - i] for i in range(k + 1)) for k in range(n)]
            scale = a.scale * b.scale
        return LaurentSeries(a.center, lead, cs, a.ctx, trunc_order=lead + n - 1,
                             scale=scale, strip=False)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        if self.is_zero:
            raise DomainError("division by an identically-zero series")
        n = self._known()
        c = self._padded(n)
        with self.ctx.working():
            inv0 = 1 / c[0]
            out = [inv0]
            for k in range(1, n):
                out.append(-inv0 * mpmath.fsum(c[j] * out[k - j] for j in range(1, k + 1)))
            scale = 1 / abs(c[0])
        lead = -self.lead_exp
        return LaurentSeries(self.center, lead, out, self.ctx, trunc_order=lead + n - 1,
                             scale=scale, strip=False)

    def __truediv__(self, other):
        if not isinstance(other, LaurentSeries):
            with self.ctx.working():
                return self.scaled(1 / mpmath.mpmathify(other))
        self._check(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse().scaled(other)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = LaurentSeries.constant(self.center, 1, max(self.trunc_order - self.lead_exp, 0), self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def exp(self) -> "LaurentSeries":
        """exp of a power series (lead_exp >= 0)."""
        if self.lead_exp < 0 and not self.is_zero:
            raise DomainError("exp of a series with a pole")
        top = self.trunc_order
        f = [self.coeff(k) for k in range(0, top + 1)]
        with self.ctx.working():
            g = [mpmath.exp(f[0])]
            for k in range(1, top + 1):
                g.append(mpmath.fsum(j * f[j] * g[k - j] for j in range(1, k + 1)) / k)
        return LaurentSeries(self.center, 0, g, self.ctx, trunc_order=top, strip=False)


def ls_arith(op: str, a: LaurentSeries, b=None) -> LaurentSeries:
    """Binary series arithmetic; ``scale`` takes a scalar as ``b``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "scale":
        return a.scaled(b)
    raise UsageError(f"unknown series operation {op!r}", "op")


def ls_coeff(a: LaurentSeries, k: int):
    """Coefficient of (s - center)^k; k must lie in the represented window."""
    lo = a.lead_exp if not a.is_zero else -(10 ** 9)
    if not lo <= k <= a.trunc_order:
        raise WindowError(f"coefficient {k} outside window [{a.lead_exp}, {a.trunc_order}]")
    return a.coeff(k)


def linear_series(center, a0, a1, order: int, ctx: PrecisionContext) -> LaurentSeries:
    """The polynomial a0 + a1 (s - center), known exactly to ``order``."""
    return LaurentSeries(center, 0, [a0, a1] + [0] * max(order - 1, 0), ctx,
                         trunc_order=order, strip=False)


def power_series(center, coeffs: Sequence, ctx: PrecisionContext, lead: int = 0) -> LaurentSeries:
    return LaurentSeries(center, lead, list(coeffs), ctx, strip=False)
