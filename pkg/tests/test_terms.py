from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from swcalc import PrecisionContext
from swcalc.errors import DerivationError, UsageError
from swcalc.factors import FactorExpr, factor_series, make_factor
from swcalc.laurent import LaurentSeries
from swcalc.constants import c_mr
from swcalc.terms import (UNIT, ExpansionTerm, KnowledgeBase, SymbolicCoeff, VanishingProver,
                          atom, constant_term, verify_identity)
from swcalc.terms.atoms import UNIT_FAMILY, Family
from swcalc.terms.expansion import atom_constant_term, extract, grade

from conftest import close

CTX = PrecisionContext(40)
KB = KnowledgeBase(CTX)
half = Fraction(1, 2)


# constant term table

def test_siegel_constant_term_has_two_terms():
    terms = constant_term(5, 5)
    assert len(terms) == 2
    up, down = terms
    assert (up.alpha, up.beta) == (1, 2) and up.family == Family(4, 4, half)
    assert (down.alpha, down.beta) == (-1, 2) and down.family == Family(4, 4, -half)
    assert down.factor == make_factor("H", 5)


def test_rank_one_parabolic_first_term():
    first = constant_term(6, 1)[0]
    assert first.family.is_unit
    assert first.factor == FactorExpr.one()
    assert (first.alpha, first.beta) == (1, 5)


def test_middle_case_factors():
    terms = constant_term(3, 2)
    assert [t.factor for t in terms] == [FactorExpr.one(), make_factor("F", 3, 2), make_factor("G", 3, 2)]
    assert [t.alpha for t in terms] == [1, 0, -1]


def test_constant_term_range():
    with pytest.raises(UsageError):
        constant_term(1, 1)


# grading

def test_grade_synthetic_pole():
    inv_s = LaurentSeries(0, -1, [1, 0, 0, 0], CTX)
    term = ExpansionTerm(Fraction(1), Fraction(1), inv_s, UNIT_FAMILY)
    ge = grade([term], 0, 2, KB, CTX)
    assert extract(ge, 1, 0).coeff(-1).get(UNIT) == 1
    assert extract(ge, 1, 1).coeff(0).get(UNIT) == 1


def test_grade_without_poles_has_no_negative_orders():
    ge = grade(constant_term(6, 1), 6, 2, KB, CTX)
    assert ge.lo >= 0


def test_extract_disjoint_exponents():
    t2 = ExpansionTerm(Fraction(0), Fraction(2), FactorExpr(5), UNIT_FAMILY)
    t3 = ExpansionTerm(Fraction(0), Fraction(3), FactorExpr(7), UNIT_FAMILY)
    ge = grade([t2, t3], 0, 0, KB, CTX)
    assert extract(ge, 2, 0).coeff(0).get(UNIT) == 5
    assert extract(ge, 3, 0).coeff(0).get(UNIT) == 7
    assert extract(ge, 4, 0).coeff(0).terms == {}


affine = st.tuples(st.sampled_from([1, 2]), st.fractions(min_value=-2, max_value=3, max_denominator=2),
                   st.sampled_from([1, -1]))


@given(st.lists(affine, min_size=1, max_size=3), st.sampled_from([0, half, 1, Fraction(3, 2)]),
       st.floats(0.3, 3.0), st.integers(-1, 1))
def test_bucket_completeness(fs, s0, a_abs, alpha):
    # sum over buckets of |a|^e (log|a|)^k (s-s0)^n against the direct product
    f = FactorExpr(1, fs)
    term = ExpansionTerm(Fraction(alpha), Fraction(1, 3), f, UNIT_FAMILY)
    depth = 10
    ge = grade([term], s0, depth, KB, CTX, max_log=None)
    t = mpmath.mpf("0.001")
    ser = factor_series(f, s0, ge.hi, CTX)
    with CTX.working():
        a = mpmath.mpf(a_abs)
        lg = mpmath.log(a)
        got = mpmath.mpf(0)
        for n in range(ge.lo, ge.hi + 1):
            for (e, k), sc in ge.at_order(n).items():
                got += sc.get(UNIT) * a ** (mpmath.mpf(e.numerator) / e.denominator) * lg ** k * t ** n
        s = mpmath.mpf(s0.numerator) / s0.denominator + t
        direct = sum(ser.coeff(n) * t ** n for n in range(ser.lead_exp, ge.hi + 1))
        direct *= a ** (alpha * s + mpmath.mpf(1) / 3)
        scale = abs(direct) + mpmath.mpf(10) ** -10
        assert abs(got - direct) / scale < mpmath.mpf(10) ** -20


# substitution

@pytest.mark.parametrize("r", range(1, 6))
def test_no_pole_ii_rule(r):
    sc = KB.substitute(SymbolicCoeff.of(atom(2 * r + 1, r, -2, Fraction(r + 1, 2))))
    assert sc.terms == {}


@pytest.mark.parametrize("r", range(2, 6))
def test_first_term_rule_one_rank_down(r):
    sc = KB.substitute(SymbolicCoeff.of(atom(2 * r, r - 1, -1, Fraction(r, 2))))
    target = atom(2 * r, 2 * r, -1, half)
    with CTX.working():
        assert list(sc.terms) == [target]
        assert close(sc.get(target), c_mr(2 * r, r - 1, "closed", CTX).value)


def test_unmatched_atom_is_unchanged():
    a = atom(5, 2, 0, Fraction(3, 2))
    assert KB.resolve(a) is None
    assert KB.substitute(SymbolicCoeff.of(a, 3)).terms == {a: 3}


def test_lambda_rule_then_unit():
    sc = KB.substitute(SymbolicCoeff.of(atom(3, 3, -1, Fraction(1))))
    assert list(sc.terms) == [UNIT]


def test_functional_equation_rule_moves_to_right_half_plane():
    sc = KB.substitute(SymbolicCoeff.of(atom(4, 4, 0, -half)))
    assert sc.terms
    assert all(a.is_unit or a.s0 > 0 for a in sc.atoms())


atoms_st = st.builds(
    lambda m, r, d, p: atom(m, min(r, m), d, Fraction(p, 2)),
    st.integers(2, 6), st.integers(1, 6), st.integers(-2, 1), st.integers(-5, 7))


@given(st.lists(st.tuples(atoms_st, st.integers(-5, 5)), min_size=1, max_size=5), st.integers(0, 10 ** 6))
def test_substitution_confluence(pairs, seed):
    sc = SymbolicCoeff()
    for a, c in pairs:
        sc.add_term(a, mpmath.mpf(c))
    base = KB.substitute(sc)
    shuffled = KB.substitute(sc, seed=seed)
    with CTX.working():
        diff = (base - shuffled).normalized(CTX)
        assert not diff.terms or diff.residual() < CTX.tolerance


def test_disabled_rule_leaves_atom():
    kb = KnowledgeBase(CTX, disable=("no-pole-ii",))
    a = atom(5, 2, -2, Fraction(3, 2))
    assert kb.substitute(SymbolicCoeff.of(a)).terms != {}


def test_excluded_instance_does_not_fire():
    a = atom(6, 2, -1, Fraction(3, 2))
    kb = KnowledgeBase(CTX, exclude=(("first-term", a),))
    assert kb.resolve(a) is None
    assert KB.resolve(a)[0] == "first-term"


# pole table

def test_siegel_poles():
    assert KB.max_pole_order(5, 5, 2) == 1
    assert KB.max_pole_order(5, 5, 1) == 1
    assert KB.max_pole_order(5, 5, 0) == 0
    assert KB.max_pole_order(5, 5, Fraction(5, 2)) == 0
    assert KB.max_pole_order(4, 4, half) == 1


def test_non_siegel_poles():
    assert KB.max_pole_order(6, 2, Fraction(3, 2)) == 1
    assert KB.max_pole_order(5, 2, Fraction(3, 2)) == 2
    assert KB.max_pole_order(6, 2, 5) == 0


# soundness (the oracle check of every vanishing rule lives in test_oracle.py)

def test_no_contradiction_between_solved_and_vanishing():
    # derivation targets that are solved as nonzero are never sent to zero
    targets = [atom(m, r, -1, Fraction(r + 1, 2)) for m in range(4, 12) for r in range(1, m)
               if m > 2 * r + 1]
    targets += [atom(2 * r, r, -2, Fraction(r + 1, 2)) for r in range(1, 5)]
    targets += [atom(2 * r + 1, r, -1, Fraction(r + 1, 2)) for r in range(1, 5)]
    for a in targets:
        hit = KB.resolve(a)
        assert hit is not None and hit[1].terms, a


def test_prover_refuses_mixed_levels():
    prover = VanishingProver(KB, CTX)
    sc = SymbolicCoeff({atom(3, 1, 0, Fraction(5, 2)): 1, atom(4, 1, 0, Fraction(5, 2)): 1})
    with pytest.raises(DerivationError):
        prover.combination(sc)


def test_prover_does_not_claim_false_vanishing():
    prover = VanishingProver(KB, CTX)
    assert not prover.prove(atom(4, 2, -1, Fraction(3, 2)))
    assert not prover.prove(atom(3, 3, 0, half))


def test_atom_constant_term_of_siegel_level_two():
    parts = atom_constant_term(atom(2, 2, -1, half), KB, CTX)
    assert parts
    assert all(len(k) == 2 for k in parts)


# derivations

def test_no_pole_ii_at_60_digits(ctx60):
    rep = verify_identity("no-pole-ii", {"r": 4}, ctx60)
    assert rep.passed
    assert all(b["residual"] < mpmath.mpf(10) ** -40 for b in rep.buckets)


def test_boundary_constant_two(ctx):
    rep = verify_identity("boundary-constant-2", {"r": 3}, ctx)
    assert rep.passed
    assert close(rep.constant, 2)


def test_second_term_base_reports_gamma(ctx):
    rep = verify_identity("second-term-base", {"r": 2}, ctx)
    assert rep.passed
    assert "gamma" in rep.derived
    assert not any(c["name"].startswith("gamma") for c in rep.comparisons)
    assert any("no closed form" in n for n in rep.notes)


def test_unknown_identity():
    with pytest.raises(UsageError):
        verify_identity("no-such-lemma", {"r": 1})


def test_parameter_ranges(ctx):
    with pytest.raises(UsageError):
        verify_identity("first-term-step", {"m": 5, "r": 2}, ctx)
    with pytest.raises(UsageError):
        verify_identity("second-term-step", {"r": 3, "j": 3}, ctx)


@pytest.mark.parametrize("r,m", [(2, 4), (3, 5), (3, 6), (4, 7)])
def test_no_pole_iii_fails_in_the_gap(ctx, r, m):
    # E_{-1}^{(m,r)}((r+3)/2) is not zero for r+2 <= m <= 2r+1
    rep = verify_identity("no-pole-iii", {"r": r, "m": m}, ctx)
    assert not rep.passed
    assert rep.notes


@pytest.mark.parametrize("r", [2, 3])
def test_second_range_printed_d_is_advisory(ctx, r):
    rep = verify_identity("second-range-first-term-base", {"r": r}, ctx)
    assert rep.passed
    adv = [c for c in rep.comparisons if c["advisory"]]
    assert adv and not all(c["pass"] for c in adv)


@pytest.mark.parametrize("r,j", [(2, 1), (3, 1), (3, 2), (4, 3)])
def test_gamma_consistency_under_shuffled_substitution(ctx, r, j):
    plain = verify_identity("second-term-step", {"r": r, "j": j}, ctx)
    mixed = verify_identity("second-term-step", {"r": r, "j": j}, ctx, seed=17 * r + j)
    assert mixed.passed
    with ctx.working():
        assert abs(plain.solved["gamma"] - mixed.solved["gamma"]) < mpmath.mpf(10) ** -30 * abs(plain.solved["gamma"])
