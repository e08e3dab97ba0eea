from fractions import Fraction

import mpmath
import pytest

from swcalc import PrecisionContext, c_mr, c_mr_all, c_r, d_mr, relations_check, transfer_const
from swcalc.constants import beta_h_identity, default_grid, golden_table
from swcalc.errors import UsageError
from swcalc.precision import format_decimal

from borel_oracle import xi_value as xi
from conftest import close


def test_c41_is_one(ctx):
    k = c_mr_all(4, 1, ctx)
    assert close(k.value, 1)
    assert k.agreement() < ctx.tolerance


def test_c61_expansion(ctx):
    with ctx.working():
        want = xi(4) * xi(8) / (xi(2) * xi(3))
    assert close(c_mr(6, 1, "closed", ctx).value, want)
    assert close(c_mr(6, 1, "recursive", ctx).value, want)


def test_c_range_error(ctx):
    with pytest.raises(UsageError):
        c_mr(5, 2, "closed", ctx)
    with pytest.raises(UsageError):
        c_mr(6, 1, "nowhere", ctx)


def test_c1_closed_form_not_listed_digits(ctx):
    # listed as 2.6135824; pi/zeta(3) = 2.6135141 to the same number of digits
    with ctx.working():
        assert close(c_r(1, ctx).value, mpmath.pi / mpmath.zeta(3))
    assert format_decimal(c_r(1, ctx).value, 8) == "2.6135141"


def test_c2_cancellation(ctx):
    with ctx.working():
        assert close(c_r(2, ctx).value, xi(2) / (2 * xi(4) * xi(5)))


@pytest.mark.parametrize("r", range(1, 7))
def test_c_r_routes_agree(ctx, r):
    assert c_r(r, ctx).agreement() < ctx.tolerance


def test_d42_variants(ctx):
    with ctx.working():
        printed = xi(4) / (xi(2) * xi(3))
        corrected = xi(1) * xi(2) / (xi(4) * xi(3))
    assert close(d_mr(4, 2, ctx, "printed").value, printed)
    assert close(d_mr(4, 2, ctx).value, corrected)


def test_d_recursion_step(ctx):
    with ctx.working():
        assert close(d_mr(3, 2, ctx).value, d_mr(4, 2, ctx).value * xi(4) / xi(2))


def test_transfer_examples(ctx):
    k = transfer_const("kappa", 2, 1, ctx)
    with ctx.working():
        assert close(k.value, -6 / mpmath.pi)
    assert k.d_power == -1
    a = transfer_const("a", 4, 1, ctx, "printed")
    with ctx.working():
        assert close(a.value, mpmath.pi ** 2 / 90)
    assert a.d_power == -2
    b = transfer_const("b", 4, 2, ctx)
    with ctx.working():
        assert close(b.value, xi(1) * xi(2) / (xi(4) * xi(3)) / d_mr(4, 2, ctx).value)


def test_a_times_c(ctx):
    for m in range(4, 13):
        for r in range(1, m):
            if m > 2 * r + 1:
                with ctx.working():
                    lhs = transfer_const("a", m, r, ctx).value * c_mr(m, r, "closed", ctx).value
                    rhs = mpmath.fprod([xi(i) / xi(m - i + 1) for i in range(1, r + 1)])
                assert close(lhs, rhs)


def test_relations_examples(ctx):
    res = relations_check(ctx, {"R1": [(6, 1)], "R2": [(3, 1)], "S2": [(2, 1)]})
    assert res["pass"]
    rows = {x["relation"]: x for x in res["rows"]}
    with ctx.working():
        assert close(rows["R1"]["rhs"], xi(1) / xi(6))
        assert close(rows["S2"]["lhs"], xi(0) / xi(2))
        assert close(rows["R2"]["lhs"], 2)


def test_relations_default_grid(ctx):
    res = relations_check(ctx)
    bad = [(x["relation"], x["m"], x["r"]) for x in res["rows"] if not x["pass"]]
    assert not bad
    n = sum(len(v) for v in default_grid().values())
    assert len(res["rows"]) == n


def test_series_g_leads_reported_as_advisory(ctx):
    res = relations_check(ctx)
    assert res["advisory"]
    assert not all(x["agrees"] for x in res["advisory"])


@pytest.mark.parametrize("r", range(1, 7))
def test_beta_h_identity(ctx, r):
    res = beta_h_identity(r, ctx)
    assert close(res["value"], 2)
    assert close(res["beta_1"], res["beta_1_closed"])
    assert res["beta_lead_exp"] == 1
    assert res["beta_plus_half_lead_exp"] == -1


def test_golden_rows_are_deterministic():
    ctx = PrecisionContext(30)
    assert golden_table(ctx, 8, 3) == golden_table(ctx, 8, 3)
