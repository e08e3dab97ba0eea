"""Symbolic calculus of Eisenstein-series Laurent coefficients."""

from .atoms import UNIT, EAtom, ExpansionTerm, Family, SymbolicCoeff, atom
from .derivations import IDENTITIES, gamma_rows, verify_identity
from .expansion import atom_constant_term, constant_term
from .knowledge import RULE_ORDER, KnowledgeBase, VanishingProver
from .report import VerificationReport

__all__ = ["UNIT", "EAtom", "ExpansionTerm", "Family", "SymbolicCoeff", "atom",
           "IDENTITIES", "gamma_rows", "verify_identity", "atom_constant_term", "constant_term",
           "RULE_ORDER", "KnowledgeBase", "VanishingProver", "VerificationReport"]
