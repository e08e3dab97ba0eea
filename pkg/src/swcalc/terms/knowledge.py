"""Pole facts and substitution rules for Eisenstein-coefficient atoms.

Static facts:
  Siegel E^{(m,m)}: simple poles only at (m-1)/2, (m-3)/2, ... > 0; left of
  the origin the order follows from E(s) = beta_m(s) E(-s).
  Non-Siegel E^{(m,r)}: holomorphic beyond m - (r+1)/2; at most a simple pole
  at (r+1)/2 when m > 2r+1; otherwise at most a double pole.

Identity rules (established lemmas, applied to lower-rank atoms):
  rank-one, lambda, first-term, boundary, second-range, no-pole-i/ii/iii
  and the Siegel functional equation. Every rule maps an atom to a combination of
  Siegel atoms, the unit, or zero, so substitution terminates.
"""

from __future__ import annotations

import random

import mpmath
from fractions import Fraction

from ..constants import c_mr, c_r, d_mr
from ..errors import DerivationError
from ..factors import factor_series, lambda_m, make_factor
from ..precision import PrecisionContext
from .atoms import UNIT, EAtom, SymbolicCoeff, atom

RULE_ORDER = ("pole-table", "rank-one", "lambda", "first-term", "boundary", "second-range",
              "no-pole-i", "no-pole-ii", "no-pole-iii", "functional-equation")


def siegel_pole_order(m: int, p: Fraction) -> int:
    if p <= 0:
        return 0
    top = Fraction(m - 1, 2)
    return 1 if p <= top and (top - p).denominator == 1 else 0


class KnowledgeBase:
    def __init__(self, ctx: PrecisionContext, d_variant: str = "corrected",
                 disable=(), exclude=()):
        self.ctx = ctx
        self.d_variant = d_variant
        self.disabled = frozenset(disable)
        # (rule name, atom) pairs that must not fire: the instance under test
        self.excluded = frozenset(exclude)
        self._const: dict = {}
        self._beta: dict = {}
        self._resolved: dict = {}

    # static pole table

    def max_pole_order(self, m: int, r: int, p) -> int:
        p = Fraction(p)
        if m == 0 or r == 0:
            return 0
        if r == m:
            if p >= 0:
                return siegel_pole_order(m, p)
            if m == 1:
                return 0
            lead = make_factor("beta", m).pole_order_at(p)
            return max(0, siegel_pole_order(m, -p) - lead)
        if p > m - Fraction(r + 1, 2):
            return 0
        if p == Fraction(r + 1, 2) and m > 2 * r + 1:
            return 1
        return 2

    # constants, memoised per knowledge base

    def _cached(self, key, fn):
        v = self._const.get(key)
        if v is None:
            v = self._const[key] = fn()
        return v

    def beta_series(self, m: int, p: Fraction, top: int):
        key = (m, p)
        hit = self._beta.get(key)
        if hit is None or hit.trunc_order < top:
            f = make_factor("beta", m)
            hit = self._beta[key] = factor_series(f, p, max(top, f.pole_order_at(p)), self.ctx)
        return hit

    # rules

    def _rule(self, name: str, a: EAtom):
        m, r, d, p = a.m, a.r, a.d, a.s0
        if name == "pole-table":
            if not a.is_unit and d < -self.max_pole_order(m, r, p):
                return SymbolicCoeff()
            return None
        if a.is_unit:
            return None
        if name == "rank-one":
            # E^{(1,1)}(s) = |b|^s + |b|^-s is even in s
            if m == 1 and p == 0 and d % 2 == 1:
                return SymbolicCoeff()
            if m == 1 and p == 0 and d == 0:
                return SymbolicCoeff.of(UNIT, 2)
            return None
        if name == "lambda":
            if a.is_siegel and m >= 2 and d == -1 and p == Fraction(m - 1, 2):
                lam = self._cached(("lambda", m), lambda: lambda_m(m, self.ctx))
                return SymbolicCoeff.of(UNIT, lam)
            return None
        if name == "functional-equation":
            if not (a.is_siegel and p < 0):
                return None
            out = SymbolicCoeff()
            if m == 1:
                out.add_term(atom(1, 1, d, -p), (-1) ** d)
                return out
            top_pole = self.max_pole_order(m, m, -p)
            beta = self.beta_series(m, p, d + top_pole)
            with self.ctx.working():
                for k in range(beta.lead_exp, d + top_pole + 1):
                    bk = beta.coeff(k)
                    if bk == 0:
                        continue
                    n = d - k
                    out.add_term(atom(m, m, n, -p), bk * (-1) ** (n % 2))
            return out
        if a.is_siegel:
            return None
        rho1 = Fraction(r + 1, 2)
        if name == "first-term":
            if d == -1 and p == rho1 and m > 2 * r + 1:
                c = self._cached(("c", m, r), lambda: c_mr(m, r, "closed", self.ctx).value)
                return SymbolicCoeff.of(atom(m, m, -1, Fraction(m - 2 * r - 1, 2)), c)
            return None
        if name == "boundary":
            if d == -1 and p == rho1 and m == 2 * r + 1:
                c = self._cached(("c_r", r), lambda: c_r(r, self.ctx).value)
                return SymbolicCoeff.of(atom(m, m, 0, Fraction(0)), c)
            return None
        if name == "second-range":
            if d == -2 and p == rho1 and r + 1 <= m <= 2 * r:
                v = self._cached(("d", m, r, self.d_variant),
                                 lambda: d_mr(m, r, self.ctx, self.d_variant).value)
                return SymbolicCoeff.of(atom(m, m, -1, Fraction(2 * r - m + 1, 2)), v)
            return None
        if name == "no-pole-i":
            if d == -2 and p >= Fraction(r + 2, 2):
                return SymbolicCoeff()
            return None
        if name == "no-pole-ii":
            if d == -2 and m == 2 * r + 1 and p == rho1:
                return SymbolicCoeff()
            return None
        if name == "no-pole-iii":
            # only in the range where it holds; see the decisions ledger
            if d == -1 and p == rho1 + 1 and m >= 2 * r + 2:
                return SymbolicCoeff()
            return None
        raise DerivationError(f"unknown rule {name}")

    def resolve(self, a: EAtom, order=RULE_ORDER):
        """(rule name, replacement) for the first applicable rule, else None."""
        for name in order:
            if name in self.disabled or (name, a) in self.excluded:
                continue
            out = self._rule(name, a)
            if out is not None:
                return name, out
        return None

    def substitute(self, sc: SymbolicCoeff, protected=frozenset(), seed=None, log=None) -> SymbolicCoeff:
        """Apply rules to a fixpoint. ``seed`` shuffles the processing order."""
        with self.ctx.working():
            return self._substitute(sc, protected, seed, log)

    def _substitute(self, sc, protected, seed, log):
        rng = random.Random(seed) if seed is not None else None
        order = list(RULE_ORDER)
        if rng is not None:
            rng.shuffle(order)
        done = SymbolicCoeff(scale=sc.scale)
        work = list(sc.terms.items())
        steps = 0
        while work:
            if rng is not None:
                rng.shuffle(work)
            a, c = work.pop()
            steps += 1
            if steps > 100000:
                raise DerivationError("substitution did not terminate")
            if a in protected:
                done.add_term(a, c)
                continue
            hit = self.resolve(a, order)
            if hit is None:
                done.add_term(a, c)
                continue
            name, rep = hit
            if log is not None:
                log.append((name, str(a)))
            for b, v in rep.terms.items():
                work.append((b, c * v))
        done.scale = max(done.scale, sc.scale)
        return done

    def unresolved(self, sc: SymbolicCoeff, protected=frozenset()):
        return [a for a in sc.atoms() if not a.is_terminal and a not in protected]


class VanishingProver:
    """Decides whether a combination of atoms vanishes.

    A spherical Eisenstein coefficient is zero iff its constant term along
    the rank-one parabolic is zero, and the constant term of the Levi part
    is computed the same way, so a combination is expanded level by level
    until only units and O(1,1) atoms remain. Those are linearly
    independent, so the test never concludes a false vanishing.
    """

    def __init__(self, kb: KnowledgeBase, ctx: PrecisionContext, tol=None):
        self.kb = kb
        self.ctx = ctx
        self.tol = ctx.tolerance if tol is None else tol
        self.memo: dict = {}
        self.proved: list = []
        self.expanded = 0

    def combination(self, sc: SymbolicCoeff):
        """(vanishes, worst relative residual at the leaves)."""
        with self.ctx.working():
            return self._combination(sc)

    def _combination(self, sc: SymbolicCoeff):
        from .expansion import atom_constant_term
        sc = self.kb.substitute(sc)
        live = sc.normalized(self.ctx)
        if sc.residual() < self.tol or not live.terms:
            return True, sc.residual()
        atoms = live.atoms()
        if all(a.is_unit or a.m == 1 for a in atoms):
            return False, sc.residual()
        levels = {a.m for a in atoms if not a.is_unit}
        if len(levels) != 1:
            raise DerivationError(f"mixed group levels {sorted(levels)} in one combination")
        merged: dict = {}
        for a, c in live.terms.items():
            parts = {(Fraction(0), 0): SymbolicCoeff.of(UNIT)} if a.is_unit else atom_constant_term(a, self.kb, self.ctx, max_log=None)
            self.expanded += 1
            for key, part in parts.items():
                cur = merged.get(key)
                term = part.scaled(c)
                merged[key] = term if cur is None else cur + term
        worst = mpmath.mpf(0)
        for key in sorted(merged):
            child = merged[key]
            child.scale = max(child.scale, sc.scale)
            ok, res = self._combination(child)
            worst = max(worst, res)
            if not ok:
                return False, res
        return True, worst

    def prove(self, a: EAtom) -> bool:
        if a in self.memo:
            return self.memo[a][0]
        if a.is_unit:
            self.memo[a] = (False, mpmath.mpf(1))
            return False
        self.memo[a] = self.combination(SymbolicCoeff.of(a))
        if self.memo[a][0]:
            self.proved.append(a)
        return self.memo[a][0]

    def residual(self, a: EAtom):
        self.prove(a)
        return self.memo[a][1]
