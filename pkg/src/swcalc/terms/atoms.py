"""Formal Eisenstein-coefficient atoms and their linear combinations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..errors import UsageError
from ..precision import PrecisionContext, rat_str, to_rational


@dataclass(frozen=True, order=True)
class EAtom:
    """E_d^{(m,r)}(s0). r == m is the Siegel series; m == 0 is the unit."""

    m: int
    r: int
    d: int
    s0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s0", to_rational(self.s0))
        if self.m == 0:
            if (self.r, self.d, self.s0) != (0, 0, 0):
                raise UsageError("the unit atom has no parameters")
        elif not 1 <= self.r <= self.m:
            raise UsageError(f"atom needs 1 <= r <= m, got ({self.m},{self.r})")

    @property
    def is_unit(self) -> bool:
        return self.m == 0

    @property
    def is_siegel(self) -> bool:
        return self.m > 0 and self.r == self.m

    @property
    def is_terminal(self) -> bool:
        # Siegel atoms left of the origin are rewritten by the functional equation
        return self.is_unit or (self.is_siegel and self.s0 >= 0)

    def __str__(self):
        if self.is_unit:
            return "1"
        return f"E_{{{self.d}}}^{{({self.m},{self.r})}}({rat_str(self.s0)})"


UNIT = EAtom(0, 0, 0, Fraction(0))


def atom(m, r, d, s0) -> EAtom:
    if r == 0:
        # E^{(m,0)} is the constant function
        return UNIT if d == 0 else None
    return EAtom(int(m), int(r), int(d), to_rational(s0))


class SymbolicCoeff:
    """Finite linear combination of atoms with high-precision coefficients.

    ``scale`` is the largest magnitude that went into the combination; zero
    tests and residuals are relative to it.
    """

    __slots__ = ("terms", "scale")

    def __init__(self, terms=None, scale=None):
        self.terms = dict(terms or {})
        if scale is None:
            scale = max((abs(v) for v in self.terms.values()), default=mpmath.mpf(0))
        self.scale = scale

    @classmethod
    def of(cls, a: EAtom, c=1):
        c = mpmath.mpmathify(c)
        return cls({a: c}, abs(c))

    def add_term(self, a: EAtom, c):
        """In-place accumulation; only used while building."""
        if a is None:
            return
        self.terms[a] = self.terms.get(a, 0) + c
        mag = abs(c)
        if mag > self.scale:
            self.scale = mag

    def __add__(self, other: "SymbolicCoeff"):
        out = SymbolicCoeff(self.terms, self.scale)
        for a, c in other.terms.items():
            out.terms[a] = out.terms.get(a, 0) + c
        out.scale = max(self.scale, other.scale)
        return out

    def scaled(self, c):
        c = mpmath.mpmathify(c)
        return SymbolicCoeff({a: v * c for a, v in self.terms.items()}, self.scale * abs(c))

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def get(self, a: EAtom):
        return self.terms.get(a, mpmath.mpf(0))

    def atoms(self):
        return sorted(self.terms)

    def normalized(self, ctx: PrecisionContext) -> "SymbolicCoeff":
        """Drop entries below the zero threshold relative to ``scale``."""
        thr = ctx.zero_threshold * (self.scale or 1)
        return SymbolicCoeff({a: v for a, v in self.terms.items() if abs(v) > thr}, self.scale)

    def residual(self):
        """Largest coefficient relative to the input scale."""
        if not self.terms:
            return mpmath.mpf(0)
        big = max(abs(v) for v in self.terms.values())
        return big / self.scale if self.scale else big

    def is_zero(self, ctx: PrecisionContext) -> bool:
        return not self.normalized(ctx).terms

    def __repr__(self):
        inner = " + ".join(f"{mpmath.nstr(self.terms[a], 10)}*{a}" for a in self.atoms())
        return f"SymbolicCoeff({inner or '0'})"


@dataclass(frozen=True)
class Family:
    """The full series E^{(m,r)}(s + shift); m == 0 is the unit."""

    m: int
    r: int
    shift: Fraction

    @property
    def is_unit(self) -> bool:
        return self.m == 0 or self.r == 0


UNIT_FAMILY = Family(0, 0, Fraction(0))


@dataclass(frozen=True)
class ExpansionTerm:
    """|a|^(alpha*s + beta) * factor(s) * family(s)."""

    alpha: Fraction
    beta: Fraction
    factor: object
    family: Family

    def __str__(self):
        from ..factors import _affine_str
        fam = "1" if self.family.is_unit else (
            f"E^({self.family.m},{self.family.r})({_affine_str(Fraction(1), self.family.shift)})")
        return f"|a|^({_affine_str(self.alpha, self.beta)}) * [{self.factor}] * {fam}"
