"""Formal products of xi factors and the named meromorphic combinations.

A FactorExpr is scalar * |D|^(alpha*s + beta) * prod xi(a*s + b)^p.
A factor with a = 0 is the constant xi_conv(b), so xi(0) and xi(1) inside
products are residues.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import mpmath

from .errors import UsageError
from .laurent import LaurentSeries
from .precision import PrecisionContext, rat_str, to_mpf, to_rational
from .special import zeta_series
from .xi import xi_conv, xi_scaled_series


def _affine_str(a: Fraction, b: Fraction, var: str = "s") -> str:
    if a == 0:
        return rat_str(b)
    if a == 1:
        head = var
    elif a == -1:
        head = "-" + var
    else:
        head = f"{rat_str(a)}{var}"
    if b == 0:
        return head
    return f"{head}{'+' if b > 0 else '-'}{rat_str(abs(b))}"


class FactorExpr:
    __slots__ = ("scalar", "d_exponent", "factors")

    def __init__(self, scalar=1, factors: Iterable = (), d_exponent=(0, 0)):
        self.scalar = to_rational(scalar)
        da, db = d_exponent
        self.d_exponent = (to_rational(da), to_rational(db))
        merged: dict = {}
        for a, b, p in factors:
            key = (to_rational(a), to_rational(b))
            merged[key] = merged.get(key, 0) + int(p)
        self.factors = tuple((a, b, p) for (a, b), p in sorted(merged.items()) if p)

    @classmethod
    def one(cls):
        return cls()

    @classmethod
    def xi(cls, scale, shift, power: int = 1):
        if to_rational(scale) == 0:
            # constants are keyed by their argument
            return cls(1, [(0, shift, power)])
        return cls(1, [(scale, shift, power)])

    def __mul__(self, other):
        if not isinstance(other, FactorExpr):
            return FactorExpr(self.scalar * to_rational(other), self.factors, self.d_exponent)
        return FactorExpr(self.scalar * other.scalar, self.factors + other.factors,
                          (self.d_exponent[0] + other.d_exponent[0],
                           self.d_exponent[1] + other.d_exponent[1]))

    __rmul__ = __mul__

    def inverse(self):
        if self.scalar == 0:
            raise UsageError("inverse of a zero expression")
        return FactorExpr(1 / self.scalar, [(a, b, -p) for a, b, p in self.factors],
                          (-self.d_exponent[0], -self.d_exponent[1]))

    def __truediv__(self, other):
        if not isinstance(other, FactorExpr):
            return self * (1 / to_rational(other))
        return self * other.inverse()

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        return FactorExpr(self.scalar ** n, [(a, b, p * n) for a, b, p in self.factors],
                          (self.d_exponent[0] * n, self.d_exponent[1] * n))

    def _key(self):
        return (self.scalar, self.d_exponent, self.factors)

    def __eq__(self, other):
        return isinstance(other, FactorExpr) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def pole_order_at(self, s0) -> int:
        """Exponent of the leading (s - s0) power; negative means a pole."""
        s0 = to_rational(s0)
        lead = 0
        for a, b, p in self.factors:
            if a != 0 and a * s0 + b in (0, 1):
                lead -= p
        return lead

    def render(self) -> str:
        def one(a, b, p):
            arg = _affine_str(a, b)
            return f"xi({arg})" + (f"^{p}" if p > 1 else "")
        num = [one(a, b, p) for a, b, p in self.factors if p > 0]
        den = [one(a, b, -p) for a, b, p in self.factors if p < 0]
        body = "*".join(num) if num else "1"
        if den:
            d = "*".join(den)
            body += "/" + (f"({d})" if len(den) > 1 else d)
        if self.scalar != 1:
            body = f"{rat_str(self.scalar)}*{body}" if (num or den) else rat_str(self.scalar)
        da, db = self.d_exponent
        if da or db:
            body = f"|D|^({_affine_str(da, db)})*{body}"
        return body

    __str__ = render

    def __repr__(self):
        return f"FactorExpr({self.render()!r})"


def make_factor(kind: str, m: int, r: int | None = None) -> FactorExpr:
    m = int(m)
    if kind in ("F", "G", "sph"):
        if r is None or not 1 <= r < m:
            raise UsageError(f"{kind} needs 1 <= r < m", "r")
        r = int(r)
    if kind == "F":
        return FactorExpr(1, [(1, m - Fraction(3 * r + 1, 2), 1), (1, m - Fraction(r + 1, 2), -1)])
    if kind == "G":
        return FactorExpr(1, [
            (2, 0, 1), (2, r - 1, -1),
            (1, Fraction(r - 1, 2), 1), (1, m - Fraction(r + 1, 2), -1),
            (1, -m + Fraction(3 * r + 1, 2), 1), (1, Fraction(r + 1, 2), -1),
        ])
    if kind in ("H", "beta"):
        if m < 2:
            raise UsageError(f"{kind} needs m >= 2", "m")
        if kind == "H":
            return FactorExpr(1, [(2, 0, 1), (2, m - 1, -1)])
        fs = []
        for i in range(m - 1):
            fs += [(2, -i, 1), (2, m - 1 - 2 * i, -1)]
        return FactorExpr(1, fs)
    if kind == "sph":
        top = m - Fraction(r + 1, 2)
        fs = []
        for i in range(1, r + 1):
            fs += [(1, top - (i - 1), 1), (0, i, -1)]
        return FactorExpr(1, fs, (-Fraction(r, 2), -r * top / 2))
    raise UsageError(f"unknown factor kind {kind!r}", "kind")


def factor_series(f: FactorExpr, s0, order: int, ctx: PrecisionContext) -> LaurentSeries:
    """Laurent series of the product at s0, known up to (s - s0)^order.

    The |D| power is not part of the value (|D| = 1 over Q); read it from
    ``f.d_exponent``.
    """
    s0 = to_rational(s0)
    order = int(order)
    lead = f.pole_order_at(s0)
    # a zero of order above ``order`` still reports its leading coefficient
    width = max(order - lead, 0)
    with ctx.working():
        const = to_mpf(f.scalar)
        for a, b, p in f.factors:
            if a == 0:
                const *= xi_conv(b, ctx) ** p
    out = LaurentSeries(s0, 0, [const] + [0] * width, ctx, trunc_order=width, strip=False)
    for a, b, p in f.factors:
        if a == 0:
            continue
        own = -1 if a * s0 + b in (0, 1) else 0
        base = xi_scaled_series(a, b, s0, own + width, ctx)
        out = out * (base ** p)
    return out.truncate(order) if out.trunc_order > order >= lead else out


def pz_eval(m: int, r: int, s) -> Fraction:
    if r < 1 or m < 1:
        raise UsageError("pz_eval needs m, r >= 1")
    s = to_rational(s)
    out = Fraction(1)
    for i in range(r):
        x = s - Fraction(r - 1, 2) + i
        out *= x * x - (m - r) ** 2
    return out


def lambda_m(m: int, ctx: PrecisionContext):
    """E_{-1}^{(m,m)}((m-1)/2) by the recursion from lambda_2 = xi(1)/xi(2)."""
    m = int(m)
    if m < 2:
        raise UsageError("lambda_m needs m >= 2", "m")
    with ctx.working():
        lam = xi_conv(1, ctx) / xi_conv(2, ctx)
        for k in range(3, m + 1):
            lam = lam * xi_conv(k - 1, ctx) / xi_conv(2 * k - 2, ctx)
    return lam


def lambda_closed(m: int, ctx: PrecisionContext):
    """prod_{i=1}^{m-1} xi(i)/xi(2i)."""
    with ctx.working():
        return mpmath.fprod(xi_conv(i, ctx) / xi_conv(2 * i, ctx) for i in range(1, m))


def _partial_zeta_scaled(scale: int, shift: int, s0: Fraction, order: int, primes, ctx):
    """zeta^S(scale*s + shift) in (s - s0)."""
    arg = scale * s0 + shift
    own = -1 if arg == 1 else 0
    base = zeta_series(arg, max(order, own), ctx)
    with ctx.working():
        cs = [c * mpmath.mpf(scale) ** (base.lead_exp + i) for i, c in enumerate(base.coeffs)]
    z = LaurentSeries(s0, base.lead_exp, cs, ctx, trunc_order=base.trunc_order, strip=False)
    for p in primes:
        # 1 - p^(-arg) * exp(-scale*log(p)*t)
        with ctx.working():
            lp = mpmath.log(p)
            head = mpmath.power(p, -to_mpf(arg))
            cs = [-head * (-scale * lp) ** k / mpmath.factorial(k) for k in range(z.trunc_order + 1)]
            cs[0] += 1
        euler = LaurentSeries(s0, 0, cs, ctx, trunc_order=z.trunc_order, strip=False)
        z = z * euler
    return z


def dnorm_series(m: int, s0, removed_primes, ctx: PrecisionContext, order: int = 0) -> LaurentSeries:
    """Normalizing factor of the doubling integral, a product of partial zeta values."""
    m = int(m)
    if m < 2:
        raise UsageError("dnorm_series needs m >= 2", "m")
    s0 = to_rational(s0)
    primes = sorted(set(int(p) for p in removed_primes))
    for p in primes:
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise UsageError(f"{p} is not a prime", "S")
    if m % 2 == 0:
        shifts = [2 * i - 1 for i in range(1, m // 2 + 1)]
    else:
        shifts = [2 * i for i in range(1, (m - 1) // 2 + 1)]
    poles = sum(1 for k in shifts if 2 * s0 + k == 1)
    width = order + poles
    out = None
    for k in shifts:
        z = _partial_zeta_scaled(2, k, s0, width - (1 if 2 * s0 + k == 1 else 0), primes, ctx)
        out = z if out is None else out * z
    return out.truncate(order) if out.trunc_order > order else out
