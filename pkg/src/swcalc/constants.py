"""Named constants of the spherical first and second term identities.

Every "xi(i)" is ``xi_conv``: residues at 0 and 1, values elsewhere.
|D|-powers are kept as exact rationals next to the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import UsageError
from .factors import factor_series, lambda_m, make_factor
from .precision import PrecisionContext, format_decimal, to_mpf
from .xi import XiConventionTable

ROUTES = ("closed", "recursive", "engine")
D_VARIANTS = ("corrected", "printed")


@dataclass(frozen=True)
class SwConstant:
    name: str
    params: tuple
    value: object
    d_power: Fraction = Fraction(0)
    route: str = "closed"
    routes: dict = field(default_factory=dict, compare=False)

    def agreement(self):
        """Largest relative spread between the stored routes."""
        vals = list(self.routes.values()) or [self.value]
        ref = abs(self.value) or 1
        return max(abs(v - self.value) for v in vals) / ref

    def as_row(self, digits: int) -> dict:
        m, r = (tuple(self.params) + (None, None))[:2]
        return {"name": self.name, "m": m, "r": r, "digits": digits,
                "value": format_decimal(self.value, digits), "d_power": str(self.d_power)}


def _xi(ctx):
    return XiConventionTable(ctx)


def _prod(vals):
    return mpmath.fprod(list(vals)) if vals else mpmath.mpf(1)


def rho_mr(m: int, r: int) -> Fraction:
    return Fraction(2 * r - m + 1, 2)


# c_{m,r}, first term range m > 2r+1

def _c_closed(m, r, ctx):
    xi = _xi(ctx)
    with ctx.working():
        a = _prod([xi(m - 2 * r + i) / xi(m - i) for i in range(r)])
        b = _prod([xi(2 * i) / xi(i) for i in range(r + 1, m - r)])
        return a * b


def _c_recursive(m, r, ctx):
    xi = _xi(ctx)
    with ctx.working():
        v = xi(1) * xi(m - r - 1) / (xi(2) * xi(m - r + 1) * lambda_m(m - r, ctx))
        for k in range(2, r + 1):
            mk = m - r + k
            v = v * xi(mk - 2 * k) * xi(k) / (xi(mk) * xi(2 * k))
        return v


def _check_first_range(m, r):
    if r < 1 or m <= 2 * r + 1:
        raise UsageError("c_{m,r} needs r >= 1 and m > 2r+1", "m")


def c_mr(m: int, r: int, route: str = "closed", ctx: PrecisionContext | None = None) -> SwConstant:
    ctx = ctx or PrecisionContext()
    m, r = int(m), int(r)
    if route not in ROUTES:
        raise UsageError(f"unknown route {route!r}", "route")
    if r == 0 and route == "closed" and m >= 1:
        # the closed product with an empty first factor; seeds d_{2,1}
        return SwConstant("c", (m, 0), _c_closed(m, 0, ctx))
    _check_first_range(m, r)
    if route == "closed":
        v = _c_closed(m, r, ctx)
    elif route == "recursive":
        v = _c_recursive(m, r, ctx)
    else:
        from .terms.derivations import verify_identity
        ident = "first-term-base" if r == 1 else "first-term-step"
        rep = verify_identity(ident, {"m": m, "r": r}, ctx)
        v = rep.solved["c"]
    return SwConstant("c", (m, r), v, route=route)


def c_mr_all(m: int, r: int, ctx: PrecisionContext) -> SwConstant:
    m, r = int(m), int(r)
    _check_first_range(m, r)
    closed = _c_closed(m, r, ctx)
    rec = _c_recursive(m, r, ctx)
    return SwConstant("c", (m, r), closed, routes={"closed": closed, "recursive": rec})


def c_r(r: int, ctx: PrecisionContext | None = None) -> SwConstant:
    ctx = ctx or PrecisionContext()
    r = int(r)
    if r < 1:
        raise UsageError("c_r needs r >= 1", "r")
    xi = _xi(ctx)
    with ctx.working():
        closed = _prod([xi(i) / xi(r + i) for i in range(1, r + 2)]) / 2
        composite = _c_closed(2 * r + 2, r, ctx) * xi(1) / (2 * xi(r + 2))
    return SwConstant("c_r", (2 * r + 1, r), closed, routes={"closed": closed, "composite": composite})


# d_{m,r}, second term range r+1 <= m <= 2r

def d_seed(r: int, ctx: PrecisionContext, variant: str = "corrected"):
    """d_{2r,r}. The printed seed has xi(r) and xi(2r) swapped."""
    xi = _xi(ctx)
    c = _c_closed(2 * r, r - 1, ctx)
    with ctx.working():
        if variant == "corrected":
            return c * xi(1) * xi(r) / (xi(2 * r) * xi(r + 1))
        if variant == "printed":
            return c * xi(1) * xi(2 * r) / (xi(r) * xi(r + 1))
    raise UsageError(f"unknown d variant {variant!r}", "variant")


def d_mr(m: int, r: int, ctx: PrecisionContext | None = None, variant: str = "corrected") -> SwConstant:
    ctx = ctx or PrecisionContext()
    m, r = int(m), int(r)
    if r < 1 or not r + 1 <= m <= 2 * r:
        raise UsageError("d_{m,r} needs r+1 <= m <= 2r", "m")
    xi = _xi(ctx)
    v = d_seed(r, ctx, variant)
    with ctx.working():
        for k in range(2 * r, m, -1):
            v = v * xi(k) / xi(k - r)
    return SwConstant("d", (m, r), v, route="recursive" if m < 2 * r else "closed")


# constants of the weak identities

def transfer_const(kind: str, m: int, r: int, ctx: PrecisionContext | None = None,
                   variant: str = "corrected") -> SwConstant:
    ctx = ctx or PrecisionContext()
    m, r = int(m), int(r)
    xi = _xi(ctx)
    rho = rho_mr(m, r)
    if kind == "a":
        if r < 1 or m <= 2 * r + 1:
            raise UsageError("a_{m,r} needs m > 2r+1", "m")
        with ctx.working():
            v = _prod([xi(i) / xi(2 * (i + r)) for i in range(1, m - 2 * r)])
            if variant == "printed":
                # the printed product is the reciprocal of what c^{-1} prod xi(i)/xi(m-i+1) reduces to
                v = 1 / v
            elif variant != "corrected":
                raise UsageError(f"unknown variant {variant!r}", "variant")
        return SwConstant("a", (m, r), v, d_power=m * rho)
    if r < 1 or not r + 1 <= m <= 2 * r:
        raise UsageError(f"{kind}_{{m,r}} needs r+1 <= m <= 2r", "m")
    if kind == "b":
        d = d_mr(m, r, ctx, variant).value
        with ctx.working():
            v = _prod([xi(i) / xi(m - i + 1) for i in range(1, r + 1)]) / d
        return SwConstant("b", (m, r), v)
    if kind == "kappa":
        with ctx.working():
            v = _prod([xi(i) / xi(2 * r - 2 * i) for i in range(0, 2 * r - m + 1)])
        return SwConstant("kappa", (m, r), v, d_power=-m * rho)
    raise UsageError(f"unknown constant kind {kind!r}", "kind")


def kappa_abs(m: int, r: int, ctx: PrecisionContext):
    """kappa with every residue replaced by its absolute value."""
    xi = _xi(ctx)
    with ctx.working():
        return _prod([abs(xi(i)) / abs(xi(2 * r - 2 * i)) for i in range(0, 2 * r - m + 1)])


def f_value_printed(r: int, i: int, ctx):
    """F^{(2r-i+1,r)}((r+1)/2) as printed."""
    xi = _xi(ctx)
    with ctx.working():
        return xi(r - i + 1) / xi(2 * r - i + 1)


def g_value_printed(r: int, i: int, ctx):
    """Leading coefficient of G^{(2r-i+1,r-i)} at (r-i+1)/2 as printed."""
    xi = _xi(ctx)
    with ctx.working():
        return xi(r - i) * xi(i) / (xi(2 * r - 2 * i) * xi(2 * r - i + 1))


def g_value_series(r: int, i: int, ctx):
    """Leading coefficient of G^{(2r-i+1,r-i)} at (r-i+1)/2 from its Laurent series."""
    g = make_factor("G", 2 * r - i + 1, r - i)
    s0 = Fraction(r - i + 1, 2)
    ser = factor_series(g, s0, g.pole_order_at(s0), ctx)
    return ser.coeff(ser.lead_exp), ser.lead_exp


def beta_h_identity(r: int, ctx: PrecisionContext | None = None) -> dict:
    """1 + beta_{2r,1}(-1/2) H_{-1}^{(2r+1)}(0), which should equal 2.

    Also returns beta_{2r,1}(-1/2) against 2 xi(2r)/xi(0), and the same
    coefficient at +1/2 for comparison (beta has a pole there, not a zero).
    """
    ctx = ctx or PrecisionContext()
    if r < 1:
        raise UsageError("r must be at least 1", "r")
    half = Fraction(1, 2)
    beta = make_factor("beta", 2 * r)
    bm = factor_series(beta, -half, 2, ctx)
    bp = factor_series(beta, half, 2, ctx)
    h = factor_series(make_factor("H", 2 * r + 1), 0, 0, ctx)
    xi = _xi(ctx)
    with ctx.working():
        b1 = bm.coeff(1)
        value = 1 + b1 * h.coeff(-1)
        return {"r": r, "value": value, "beta_lead_exp": bm.lead_exp, "beta_1": b1,
                "beta_1_closed": 2 * xi(2 * r) / xi(0), "H_residue": h.coeff(-1),
                "beta_plus_half_lead_exp": bp.lead_exp, "beta_1_plus_half": bp.coeff(1)}


def default_grid():
    return {
        "R1": [(m, r) for m in range(2, 13) for r in range(1, m) if m > 2 * r + 1],
        "R2": [(2 * r + 1, r) for r in range(1, 7)],
        "S1": [(m, r) for r in range(1, 7) for m in range(r + 1, 2 * r + 1)],
        "S2": [(m, r) for r in range(1, 7) for m in range(r + 1, 2 * r + 1)],
    }


def _rel_err(lhs, rhs):
    return abs(lhs - rhs) / max(abs(rhs), mpmath.mpf(10) ** -300)


def relations_check(ctx: PrecisionContext | None = None, grid: dict | None = None, tol=None) -> dict:
    """Check R1, R2, S1, S2 on a grid.

    Returns {"pass", "rows", "advisory"}; advisory rows evaluate S2 with the
    G leading coefficients taken from the Laurent series instead of the
    printed closed form. They never affect "pass".
    """
    ctx = ctx or PrecisionContext()
    grid = grid or default_grid()
    tol = ctx.tolerance if tol is None else tol
    xi = _xi(ctx)
    rows, advisory = [], []
    with ctx.working():
        for m, r in grid.get("R1", []):
            a = transfer_const("a", m, r, ctx).value
            c = _c_closed(m, r, ctx)
            rhs = _prod([xi(i) / xi(m - i + 1) for i in range(1, r + 1)])
            rows.append(("R1", m, r, a * c, rhs))
        for _, r in grid.get("R2", []):
            cr = c_r(r, ctx).value
            lhs = _prod([xi(i) / xi(2 * r + 2 - i) for i in range(1, r + 1)]) / cr
            rows.append(("R2", 2 * r + 1, r, lhs, mpmath.mpf(2)))
        for m, r in grid.get("S1", []):
            cr = c_r(r, ctx).value
            fs = _prod([f_value_printed(r, i, ctx) for i in range(0, 2 * r - m + 1)])
            lhs = fs * _prod([xi(i) / xi(m - i + 1) for i in range(1, r + 1)])
            rows.append(("S1", m, r, lhs, 2 * cr))
        for m, r in grid.get("S2", []):
            cr = c_r(r, ctx).value
            tail = _prod([xi(i) / xi(m - i + 1) for i in range(1, m - r)])
            target = transfer_const("kappa", m, r, ctx).value
            gs = _prod([g_value_printed(r, i, ctx) for i in range(0, 2 * r - m + 1)])
            rows.append(("S2", m, r, gs * tail / (2 * cr), target))
            if r - (2 * r - m) >= 1:
                gt = _prod([g_value_series(r, i, ctx)[0] for i in range(0, 2 * r - m + 1)])
                lhs = gt * tail / (2 * cr)
                err = _rel_err(lhs, target)
                advisory.append({"relation": "S2-series-G", "m": m, "r": r, "lhs": lhs, "rhs": target,
                                 "error": err, "agrees": bool(err < tol)})
    out = []
    for name, m, r, lhs, rhs in rows:
        err = _rel_err(lhs, rhs)
        out.append({"relation": name, "m": m, "r": r, "lhs": lhs, "rhs": rhs,
                    "error": err, "pass": bool(err < tol)})
    return {"pass": all(x["pass"] for x in out), "rows": out, "advisory": advisory}


def golden_table(ctx: PrecisionContext, mmax: int = 12, rmax: int = 6) -> list:
    """Deterministic rows {name, m, r, digits, value, d_power}."""
    rows = []
    for m in range(4, mmax + 1):
        for r in range(1, m):
            if m > 2 * r + 1:
                rows.append(c_mr(m, r, "closed", ctx).as_row(ctx.decimal_digits))
                rows.append(transfer_const("a", m, r, ctx).as_row(ctx.decimal_digits))
    for r in range(1, rmax + 1):
        rows.append(c_r(r, ctx).as_row(ctx.decimal_digits))
        for m in range(r + 1, 2 * r + 1):
            rows.append(d_mr(m, r, ctx).as_row(ctx.decimal_digits))
            rows.append(transfer_const("b", m, r, ctx).as_row(ctx.decimal_digits))
            rows.append(transfer_const("kappa", m, r, ctx).as_row(ctx.decimal_digits))
    for m in range(2, mmax + 1):
        rows.append({"name": "lambda", "m": m, "r": m, "digits": ctx.decimal_digits,
                     "value": format_decimal(lambda_m(m, ctx), ctx.decimal_digits), "d_power": "0"})
    return rows


__all__ = ["SwConstant", "beta_h_identity", "c_mr", "c_mr_all", "c_r", "d_mr", "d_seed", "transfer_const",
           "relations_check", "golden_table", "rho_mr", "kappa_abs", "g_value_printed",
           "g_value_series", "f_value_printed", "to_mpf"]
