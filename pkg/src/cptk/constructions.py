"""Reusable problem generators built from marked base languages.

Both constructions take one decidable base language and wrap its members
and non-members behind distinct first-symbol markers, which keeps the
resulting components disjoint for structural reasons no matter how
complicated the base is.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classify import (ClassificationProblem, ConditionalProblem, load_conditional,
                       load_problem)
from .langs import Complement, LangExpr, LeftMark, Union
from .words import Alphabet


@dataclass(frozen=True)
class MarkedComponent:
    """The language x·A plus y·A^c for two distinct marker symbols."""

    marker_in: str
    marker_out: str
    base: LangExpr

    def __post_init__(self):
        if self.marker_in == self.marker_out:
            raise ValueError("marker symbols must be distinct")

    @property
    def expr(self) -> LangExpr:
        return Union((LeftMark(self.marker_in, self.base),
                      LeftMark(self.marker_out, Complement(self.base))))


def ziegler_problem(base: LangExpr, alphabet: Alphabet, horizon: int = 300
                    ) -> ClassificationProblem:
    """Three marked components cycling through a three-letter alphabet.

    Requires the alphabet to be exactly a, b, c.  Components are pairwise
    disjoint by the first-symbol argument, re-verified at load.
    """
    if tuple(sorted(alphabet.symbols)) != ("a", "b", "c"):
        raise ValueError("this construction needs the alphabet {a, b, c}")
    comps = [MarkedComponent("a", "b", base).expr,
             MarkedComponent("b", "c", base).expr,
             MarkedComponent("c", "a", base).expr]
    return load_problem(comps, alphabet, horizon)


def example_26(base: LangExpr, alphabet: Alphabet, horizon: int = 300
               ) -> ConditionalProblem:
    """The two-component conditional instance over markers a and b:
    condition a·A plus b·A^c, components (a·A^c, b·A)."""
    if not {"a", "b"}.issubset(alphabet.symbols):
        raise ValueError("this construction needs the symbols a and b")
    condition = MarkedComponent("a", "b", base).expr
    comps = [LeftMark("a", Complement(base)), LeftMark("b", base)]
    return load_conditional(condition, comps, alphabet, horizon)
