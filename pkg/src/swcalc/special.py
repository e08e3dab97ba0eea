"""Riemann zeta and the archimedean factor pi^(-s/2) Gamma(s/2) as Laurent series.

zeta: Euler-Maclaurin summation differentiated term by term in s.
Gamma: Taylor series of log Gamma from polygamma values (recurrence to a
large argument, then the asymptotic series), exponentiated. Poles of
Gamma(s/2) come from an explicit factor (s - center) in the recurrence.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import mpmath

from .errors import PrecisionFailure
from .laurent import LaurentSeries
from .precision import PrecisionContext, to_mpf, to_rational

_bern_lock = threading.Lock()
_bern: list[Fraction] = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n with B_1 = -1/2."""
    if n < len(_bern):
        return _bern[n]
    with _bern_lock:
        m = len(_bern)
        while m <= n:
            # sum_{k<=m} C(m+1, k) B_k = 0
            acc = Fraction(0)
            binom = 1
            for k in range(m):
                acc += binom * _bern[k]
                binom = binom * (m + 1 - k) // (k + 1)
            _bern.append(-acc / (m + 1))
            m += 1
    return _bern[n]


class _SeriesCache:
    """Series memo keyed by (center, digits). Longer entries serve shorter requests."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict = {}

    def get(self, key, order: int):
        hit = self._data.get(key)
        if hit is not None and hit.trunc_order >= order:
            return hit.truncate(order)
        return None

    def put(self, key, series: LaurentSeries):
        with self._lock:
            old = self._data.get(key)
            if old is None or old.trunc_order < series.trunc_order:
                self._data[key] = series


_zeta_cache = _SeriesCache()
_arch_cache = _SeriesCache()


def _exp_neg_log(center, c_log, scale_factor, order: int, ctx) -> list:
    """Coefficients of scale_factor * exp(-t * c_log), t^0..t^order."""
    out = []
    term = scale_factor
    for k in range(order + 1):
        out.append(term)
        term = term * (-c_log) / (k + 1)
    return out


def zeta_series(center, order: int, ctx: PrecisionContext) -> LaurentSeries:
    """Laurent series of the Riemann zeta function at ``center`` up to ``order``."""
    center = to_rational(center)
    order = int(order)
    key = (center, ctx.decimal_digits, ctx.guard_digits)
    hit = _zeta_cache.get(key, order)
    if hit is not None:
        return hit
    if center < Fraction(1, 2):
        # Euler-Maclaurin cancels badly to the left; use xi(s) = xi(1 - s)
        from .xi import xi_series
        series = (xi_series(center, order + 2, ctx) / archimedean_series(center, order + 2, ctx)).truncate(order)
    else:
        series = _zeta_series_em(center, order, ctx)
    _zeta_cache.put(key, series)
    return series


def _zeta_series_em(center: Fraction, order: int, ctx: PrecisionContext) -> LaurentSeries:
    digits = ctx.work_digits
    N = max(int(0.55 * digits) + 12, int(abs(center)) + 12)
    extra = 15 + order + int(math.ceil(0.5 * math.log10(N)))
    K = order + 1
    low_lead = -1 if center == 1 else 0
    with mpmath.workdps(digits + extra):
        c = to_mpf(center)
        eps = mpmath.mpf(10) ** (-(digits + 2))
        lnN = mpmath.log(N)
        acc = [mpmath.mpf(0)] * (K + 1)    # acc[k+1] holds t^k, acc[0] holds t^-1
        for n in range(1, N):
            ln = mpmath.log(n)
            term = mpmath.power(n, -c)
            for k in range(K):
                acc[k + 1] += term
                term = term * (-ln) / (k + 1)
        # N^(1-s)/(s-1)
        if center == 1:
            acc[0] += 1
            term = -lnN
            for k in range(K):
                acc[k + 1] += term
                term = term * (-lnN) / (k + 2)
        else:
            num = _exp_neg_log(center, lnN, mpmath.power(N, 1 - c), order, ctx)
            d0 = c - 1
            q = []
            for k in range(K):
                v = num[k] - (q[k - 1] if k else 0)
                q.append(v / d0)
            for k in range(K):
                acc[k + 1] += q[k]
        # N^(-s)/2
        half = _exp_neg_log(center, lnN, mpmath.power(N, -c) / 2, order, ctx)
        for k in range(K):
            acc[k + 1] += half[k]
        magnitude = max(abs(x) for x in acc) or mpmath.mpf(1)
        # Bernoulli corrections B_2j/(2j)! (s)(s+1)...(s+2j-2) N^(-s-2j+1)
        poly = [c, mpmath.mpf(1)]
        fact = mpmath.mpf(2)
        j = 1
        while True:
            b = to_mpf(bernoulli(2 * j)) / fact
            base = _exp_neg_log(center, lnN, mpmath.power(N, -c - 2 * j + 1), order, ctx)
            contrib = []
            for k in range(K):
                contrib.append(mpmath.fsum(poly[i] * base[k - i] for i in range(min(k, len(poly) - 1) + 1)))
            big = max(abs(x) for x in contrib) * abs(b)
            for k in range(K):
                acc[k + 1] += b * contrib[k]
            if big < eps * magnitude and j > 2:
                break
            j += 1
            if 2 * j > 6 * N:
                raise PrecisionFailure(f"Euler-Maclaurin did not converge at {center}")
            for shift in (2 * j - 3, 2 * j - 2):
                a0 = c + shift
                new = [mpmath.mpf(0)] * (len(poly) + 1)
                for i, p in enumerate(poly):
                    new[i] += a0 * p
                    new[i + 1] += p
                poly = new[: K + 1]
            fact *= (2 * j - 1) * (2 * j)
        coeffs = acc if low_lead == -1 else acc[1:]
    with ctx.working():
        coeffs = [+x for x in coeffs]
    series = LaurentSeries(center, low_lead, coeffs, ctx, trunc_order=order)
    return series


def stieltjes(n: int, ctx: PrecisionContext):
    """Stieltjes constant gamma_n from the Laurent series of zeta at 1."""
    z = zeta_series(1, n, ctx)
    with ctx.working():
        return (-1) ** n * mpmath.factorial(n) * z.coeff(n)


def _log_gamma_taylor(z, K: int, digits: int) -> list:
    """Taylor coefficients of log Gamma(z + u), u^0..u^K, for large real z."""
    eps = mpmath.mpf(10) ** (-(digits + 5))
    # log Gamma(z)
    lg = (z - mpmath.mpf(1) / 2) * mpmath.log(z) - z + mpmath.log(2 * mpmath.pi) / 2
    j = 1
    while True:
        t = to_mpf(bernoulli(2 * j)) / (2 * j * (2 * j - 1) * z ** (2 * j - 1))
        lg += t
        if abs(t) < eps or j > 4 * digits:
            break
        j += 1
    out = [lg]
    if K >= 1:
        psi = mpmath.log(z) - 1 / (2 * z)
        j = 1
        while True:
            t = to_mpf(bernoulli(2 * j)) / (2 * j * z ** (2 * j))
            psi -= t
            if abs(t) < eps or j > 4 * digits:
                break
            j += 1
        out.append(psi)
    for n in range(1, K):
        # polygamma psi^(n)(z); coefficient of u^(n+1) is psi^(n)(z)/(n+1)!
        s = mpmath.factorial(n - 1) / z ** n + mpmath.factorial(n) / (2 * z ** (n + 1))
        j = 1
        fac_ratio = mpmath.mpf(1)
        while True:
            # (2j+n-1)!/(2j)!
            fac_ratio = mpmath.factorial(2 * j + n - 1) / mpmath.factorial(2 * j)
            t = to_mpf(bernoulli(2 * j)) * fac_ratio / z ** (2 * j + n)
            s += t
            if abs(t) < eps * abs(s) or j > 4 * digits:
                break
            j += 1
        val = (-1) ** (n + 1) * s
        out.append(val / mpmath.factorial(n + 1))
    return out


def archimedean_series(center, order: int, ctx: PrecisionContext) -> LaurentSeries:
    """Laurent series of pi^(-s/2) Gamma(s/2) at ``center`` up to ``order``."""
    center = to_rational(center)
    order = int(order)
    key = (center, ctx.decimal_digits, ctx.guard_digits)
    hit = _arch_cache.get(key, order)
    if hit is not None:
        return hit
    series = _archimedean(center, order, ctx)
    _arch_cache.put(key, series)
    return series


def _archimedean(center: Fraction, order: int, ctx: PrecisionContext) -> LaurentSeries:
    digits = ctx.work_digits
    x = center / 2
    has_pole = x <= 0 and x.denominator == 1
    # one extra Taylor term when the pole shifts everything down
    K = order + (2 if has_pole else 1)
    z0 = int(0.4 * digits) + 2 * K + 10
    M = max(0, math.ceil(z0 - x))
    with mpmath.workdps(digits + 10):
        xm = to_mpf(x)
        # log Gamma(y), y = x + u, u = t/2
        logc = _log_gamma_taylor(xm + M, K, digits)
        sign = 1
        for i in range(M):
            a = x + i
            if a == 0:
                continue
            am = to_mpf(a)
            if a < 0:
                sign = -sign
            logc[0] -= mpmath.log(abs(am))
            p = mpmath.mpf(1)
            for k in range(1, K + 1):
                p = p / am
                logc[k] -= (-1) ** (k + 1) * p / k
        # pass to t = 2u and add -(s/2) log pi
        lp = mpmath.log(mpmath.pi)
        tco = [logc[k] / mpmath.mpf(2) ** k for k in range(K + 1)]
        tco[0] -= to_mpf(center) * lp / 2
        if K >= 1:
            tco[1] -= lp / 2
        g = LaurentSeries(center, 0, tco, ctx, trunc_order=K, strip=False).exp()
        if sign < 0:
            g = -g
    if has_pole:
        # Gamma has the extra factor 1/u = 2/t
        with ctx.working():
            cs = [2 * c for c in g.coeffs]
        series = LaurentSeries(center, -1, cs, ctx, trunc_order=K - 1, strip=False)
    else:
        series = g
    return series.truncate(order)
