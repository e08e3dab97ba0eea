"""Precision policy, exact rationals and decimal rendering."""

from __future__ import annotations

import os
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import UsageError

DEFAULT_DIGITS = 50
DIGITS_ENV = "SWCALC_DIGITS"


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision for one computation.

    Everything is evaluated at ``decimal_digits + guard_digits`` digits. A
    quantity is treated as zero when it is below ``zero_threshold`` relative
    to the largest magnitude that went into it.
    """

    decimal_digits: int = DEFAULT_DIGITS
    guard_digits: int = 15

    def __post_init__(self):
        if int(self.decimal_digits) < 20:
            raise UsageError("decimal_digits must be at least 20", "digits")
        if int(self.guard_digits) < 0:
            raise UsageError("guard_digits must be non-negative", "guard_digits")

    @property
    def work_digits(self) -> int:
        return self.decimal_digits + self.guard_digits

    def working(self, extra: int = 0):
        """Context manager setting mpmath to the working precision."""
        return mp.workdps(self.work_digits + extra)

    @property
    def zero_threshold(self):
        with self.working():
            return mpmath.mpf(10) ** (-(self.decimal_digits - 10))

    @property
    def tolerance(self):
        """Pass/fail threshold for relative residuals, 10^(-P/2)."""
        with self.working():
            return mpmath.mpf(10) ** (-(self.decimal_digits // 2))

    def is_zero(self, x, scale=1) -> bool:
        with self.working():
            s = abs(mpmath.mpmathify(scale))
            if s == 0:
                s = mpmath.mpf(1)
            return abs(x) <= self.zero_threshold * s


def default_context() -> PrecisionContext:
    raw = os.environ.get(DIGITS_ENV)
    if raw:
        try:
            return PrecisionContext(int(raw))
        except ValueError as exc:
            raise UsageError(f"{DIGITS_ENV} must be an integer", "digits") from exc
    return PrecisionContext()


def to_rational(x) -> Fraction:
    """Exact rational from an int, Fraction or a "p/q" string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise UsageError("expected an exact rational, got bool")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"not a rational: {x!r}", "at") from exc
    raise UsageError(f"expected an exact rational, got {type(x).__name__}")


def rat_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_mpf(q):
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def _as_mpf(x):
    # mpf(x) would round to the ambient precision; keep mpf values exact
    if isinstance(x, mpmath.mpc):
        return x.real
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, int):
        return mpmath.mpf(x, prec=max(53, x.bit_length() + 1))
    return mpmath.mpf(x)


def _exact_decimal(x) -> Decimal:
    sign, man, exp, _ = x._mpf_
    man = int(man)
    if exp >= 0:
        d = Decimal(man << exp)  # exact: Decimal(int) never rounds
    else:
        # man * 2^exp == man * 5^-exp * 10^exp, exactly
        d = Decimal((0, tuple(map(int, str(man * 5 ** (-exp)))), exp))
    return d.copy_negate() if sign else d


def format_decimal(x, digits: int) -> str:
    """Render ``x`` with ``digits`` significant digits, round-half-even.

    Zero renders as "0". Plain notation is used when the decimal exponent is
    in [-7, digits), otherwise ``d.dddde-NN``. Only the real part of a complex
    value is rendered.
    """
    dctx = Context(prec=int(digits), rounding=ROUND_HALF_EVEN, Emax=10**9, Emin=-10**9)
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        if x == 0:
            return "0"
        rounded = dctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    else:
        value = _as_mpf(x)
        if value == 0:
            return "0"
        rounded = dctx.plus(_exact_decimal(value))
    adj = rounded.adjusted()
    # pad to exactly ``digits`` significant digits
    rounded = rounded.quantize(Decimal(1).scaleb(adj - int(digits) + 1, dctx), context=dctx)
    if -7 <= adj < digits:
        return format(rounded, "f")
    return f"{format(rounded.scaleb(-adj, dctx), 'f')}e{adj:+d}"
