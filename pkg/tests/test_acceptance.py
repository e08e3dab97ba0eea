"""Acceptance criteria, one test and one printed PASS/FAIL line each.

Run ``python tests/test_acceptance.py`` for the lines alone.
"""

import json
import random
import time
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from swcalc import PrecisionContext, c_mr, c_r, relations_check, transfer_const, verify_identity, xi_conv
from swcalc.constants import beta_h_identity
from swcalc.special import archimedean_series, zeta_series
from swcalc.xi import XiConventionTable

GOLDEN = Path(__file__).parent / "golden" / "constants_30.json"
LINES = []


def report(n, ok, detail, capsys=None):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    return ok


def rel(a, b):
    return abs(a - b) / abs(b)


def xi_direct(s, ctx):
    # pi^(-s/2) Gamma(s/2) zeta(s) as a product at s itself, never through the reflection
    return (archimedean_series(s, 2, ctx) * zeta_series(s, 2, ctx)).coeff(0)


def criterion_1():
    ctx = PrecisionContext(60)
    rng = random.Random(20240601)
    pts = set()
    while len(pts) < 100:
        q = Fraction(rng.randint(-4 * 97 + 1, 5 * 97 - 1), 97)
        if q not in (0, 1):
            pts.add(q)
    t = time.time()
    with ctx.working():
        worst = max(rel(xi_direct(s, ctx), xi_direct(1 - s, ctx)) for s in sorted(pts))
    dt = time.time() - t
    return worst < mpmath.mpf(10) ** -40 and dt < 10, f"xi(s) = xi(1-s) at 100 points, worst {mpmath.nstr(worst, 3)}, {dt:.1f}s"


def _residue_oracle(at):
    # independent: (s - at) * pi^(-s/2) Gamma(s/2) zeta(s) straight from mpmath, very close to the pole
    with mpmath.workdps(140):
        eps = mpmath.mpf(10) ** -70
        s = at + eps
        return eps * mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s)


def criterion_2():
    ctx = PrecisionContext(60)
    with ctx.working():
        e1 = abs(xi_conv(1, ctx) - _residue_oracle(1))
        e0 = abs(xi_conv(0, ctx) - _residue_oracle(0))
        ok = e1 < mpmath.mpf(10) ** -40 and e0 < mpmath.mpf(10) ** -40 and \
            abs(xi_conv(1, ctx) - 1) < mpmath.mpf(10) ** -40 and abs(xi_conv(0, ctx) + 1) < mpmath.mpf(10) ** -40
    return ok, f"xi_conv(1) = 1, xi_conv(0) = -1, oracle gaps {mpmath.nstr(e1, 3)}, {mpmath.nstr(e0, 3)}"


def criterion_3():
    ctx = PrecisionContext(60)
    worst = mpmath.mpf(0)
    n = 0
    with ctx.working():
        for m in range(2, 13):
            for r in range(1, m):
                if r < Fraction(m - 1, 2):
                    a, b = c_mr(m, r, "closed", ctx).value, c_mr(m, r, "recursive", ctx).value
                    worst = max(worst, rel(a, b))
                    n += 1
        one = abs(c_mr(4, 1, "closed", ctx).value - 1)
    ok = worst < mpmath.mpf(10) ** -40 and one < mpmath.mpf(10) ** -40
    return ok, f"c closed vs recursive on {n} points, worst {mpmath.nstr(worst, 3)}; |c_41 - 1| = {mpmath.nstr(one, 3)}"


def criterion_4():
    ctx = PrecisionContext(60)
    xi = XiConventionTable(ctx)
    with ctx.working():
        worst = max(abs(mpmath.fprod([xi(i) / xi(2 * r + 2 - i) for i in range(1, r + 1)]) / c_r(r, ctx).value - 2)
                    for r in range(1, 7))
    return worst < mpmath.mpf(10) ** -40, f"boundary constant equals 2 for r = 1..6, worst {mpmath.nstr(worst, 3)}"


def criterion_5():
    ctx = PrecisionContext(60)
    with ctx.working():
        worst = max(abs(beta_h_identity(r, ctx)["value"] - 2) for r in range(1, 7))
    return worst < mpmath.mpf(10) ** -40, f"1 + beta_1(-1/2) H_-1(0) = 2 for r = 1..6, worst {mpmath.nstr(worst, 3)}"


def criterion_6():
    ctx = PrecisionContext(60)
    grid = [(m, r) for r in range(1, 7) for m in range(r + 1, 2 * r + 1)]
    res = relations_check(ctx, {"S1": grid, "S2": grid})
    worst = max(x["error"] for x in res["rows"])
    ok = res["pass"] and worst < mpmath.mpf(10) ** -35
    return ok, f"S1 and S2 on {len(grid)} points, worst {mpmath.nstr(worst, 3)}"


def criterion_7():
    ctx = PrecisionContext(60)
    xi = XiConventionTable(ctx)
    worst = mpmath.mpf(0)
    n = 0
    with ctx.working():
        for m in range(4, 13):
            for r in range(1, m):
                if m > 2 * r + 1:
                    lhs = transfer_const("a", m, r, ctx).value * c_mr(m, r, "closed", ctx).value
                    rhs = mpmath.fprod([xi(i) / xi(m - i + 1) for i in range(1, r + 1)])
                    worst = max(worst, rel(lhs, rhs))
                    n += 1
    return worst < mpmath.mpf(10) ** -40, f"a c = prod xi(i)/xi(m-i+1) on {n} points, worst {mpmath.nstr(worst, 3)}"


def derivation_runs():
    runs = []
    for r in range(1, 6):
        runs += [("no-pole-i", {"r": r}), ("no-pole-ii", {"r": r}), ("no-pole-iii", {"r": r})]
    for m in range(2, 13):
        for r in range(1, m):
            if r < Fraction(m - 1, 2):
                runs.append(("first-term-base" if r == 1 else "first-term-step", {"m": m, "r": r}))
    for r in range(1, 5):
        runs.append(("boundary-first-term", {"r": r}))
        runs.append(("second-range-first-term-base", {"r": r}))
        runs += [("second-range-first-term-step", {"m": m, "r": r}) for m in range(r + 1, 2 * r)]
        runs.append(("second-term-base", {"r": r}))
        runs += [("second-term-step", {"r": r, "j": j}) for j in range(1, r)]
        runs.append(("weak-coefficient", {"r": r}))
    ctx = PrecisionContext(50)
    t = time.time()
    reps = [(ident, p, verify_identity(ident, p, ctx)) for ident, p in runs]
    return reps, time.time() - t


def criterion_8(reps, dt):
    bound = mpmath.mpf(10) ** -25
    bad = [(ident, p) for ident, p, rep in reps
           if not rep.passed or any(b["residual"] >= bound for b in rep.buckets if b["status"] != "open")]
    ok = not bad and dt < 120
    detail = f"{len(reps) - len(bad)}/{len(reps)} derivations pass in {dt:.0f}s"
    if bad:
        detail += "; failing: " + ", ".join(f"{i}{dict(sorted(p.items()))}" for i, p in bad)
    return ok, detail


def criterion_9():
    ctx = PrecisionContext(50)
    worst = mpmath.mpf(0)
    n = 0
    with ctx.working():
        for r in range(2, 5):
            solved = [verify_identity("second-term-base", {"r": r}, ctx).solved["gamma"]]
            # consumers use a shuffled substitution order, so the chain is recomputed independently
            solved += [verify_identity("second-term-step", {"r": r, "j": j}, ctx, seed=31 * r + j)
                       for j in range(1, r)]
            for j in range(1, r):
                produced = solved[0] if j == 1 else solved[j - 1].solved["gamma"]
                consumed = solved[j].solved["gamma_consumed"]
                worst = max(worst, rel(produced, consumed))
                n += 1
    rows = json.loads(GOLDEN.read_text())["rows"]
    gam = [x for x in rows if x["name"] == "gamma"]
    labelled = len(gam) == 10 and all(x["status"] == "derived-unverifiable" for x in gam)
    ok = worst < mpmath.mpf(10) ** -20 and labelled
    return ok, f"gamma_j produced vs consumed on {n} links, worst {mpmath.nstr(worst, 3)}; {len(gam)} golden rows labelled"


def criterion_10(reps):
    ctx = PrecisionContext(50)
    two = [b for _, _, rep in reps for b in rep.buckets if b["logdeg"] == 2 and b["status"] != "open"]
    ok = all(rep.log_degree_two_clean() for _, _, rep in reps) and \
        all(b["residual"] < ctx.zero_threshold for b in two)
    return ok, f"{len(two)} log-degree-2 buckets across {len(reps)} runs, all below the zero threshold"


@pytest.fixture(scope="module")
def runs():
    return derivation_runs()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_closed_form_criteria(n, capsys):
    ok, detail = globals()[f"criterion_{n}"]()
    assert report(n, ok, detail, capsys), detail


def test_criterion_8_derivations(runs, capsys):
    ok, detail = criterion_8(*runs)
    assert report(8, ok, detail, capsys), detail


def test_criterion_9_gamma_consistency(capsys):
    ok, detail = criterion_9()
    assert report(9, ok, detail, capsys), detail


def test_criterion_10_log_degree(runs, capsys):
    ok, detail = criterion_10(runs[0])
    assert report(10, ok, detail, capsys), detail


if __name__ == "__main__":
    reps = derivation_runs()
    for n in range(1, 8):
        report(n, *globals()[f"criterion_{n}"]())
    report(8, *criterion_8(*reps))
    report(9, *criterion_9())
    report(10, *criterion_10(reps[0]))
    print("\n".join(LINES))
