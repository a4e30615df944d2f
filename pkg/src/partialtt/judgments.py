"""Matches and sequents: the labelled statements of the calculus.

A match pairs a construction with a type and either a *simple* proper
construction (a variable or an acquisition) or the improperness label
(rhs None, printed `!`).  A proper match says both sides construct the
same object; an improper match says the left side constructs nothing.

A sequent is a finite set of matches (the antecedent) entailing one match;
antecedents have set semantics, so insertion order never matters.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .signature import Signature, is_bot_name
from .terms import Acquisition, Construction, Variable, free_variables
from .typecheck import TypecheckError, TypingContext, infer_type
from .types import Type, subsumes, type_text


class MatchFormError(ValueError):
    """Ill-formed match: bad rhs shape or type disagreement."""


def is_simple_proper(c: Construction, sig: Signature | None = None) -> bool:
    """Variables and acquisitions are proper under every assignment, with
    the sole exception of the always-improper bot constants."""
    if isinstance(c, Variable):
        return True
    if isinstance(c, Acquisition):
        if c.is_quoted:
            return True
        return not is_bot_name(c.target)
    return False


@dataclass(frozen=True)
class Match:
    lhs: Construction
    type: Type
    rhs: Optional[Construction]  # None encodes the improperness label

    @property
    def improper(self) -> bool:
        return self.rhs is None


@dataclass(frozen=True)
class Sequent:
    antecedent: frozenset[Match]
    succedent: Match


def sequent(antecedent: Iterable[Match], succedent: Match) -> Sequent:
    return Sequent(frozenset(antecedent), succedent)


def match_free_variables(m: Match) -> frozenset[Variable]:
    fv = free_variables(m.lhs)
    if m.rhs is not None:
        fv |= free_variables(m.rhs)
    return fv


def sequent_free_variables(s: Sequent) -> frozenset[Variable]:
    fv = match_free_variables(s.succedent)
    for m in s.antecedent:
        fv |= match_free_variables(m)
    return fv


def check_match(m: Match, ctx: TypingContext) -> None:
    """Validate a match against a typing context.

    Raises MatchFormError (shape) or TypecheckError (typing).
    """
    lhs_t = infer_type(m.lhs, ctx).type
    if not subsumes(m.type, lhs_t):
        raise MatchFormError(
            f"match subject has type {type_text(lhs_t)}, "
            f"stated {type_text(m.type)}"
        )
    if m.rhs is None:
        return
    if not is_simple_proper(m.rhs, ctx.signature):
        raise MatchFormError(
            "the proper side of a match must be a variable or an acquisition"
        )
    rhs_t = infer_type(m.rhs, ctx).type
    if not subsumes(m.type, rhs_t):
        raise MatchFormError(
            f"match label has type {type_text(rhs_t)}, "
            f"stated {type_text(m.type)}"
        )


def check_sequent(s: Sequent, ctx: TypingContext) -> None:
    for m in s.antecedent:
        check_match(m, ctx)
    check_match(s.succedent, ctx)
