"""Type inference for constructions.

Every well-formed construction has a unique type: a variable carries its
type, an acquisition of a constant has the declared type, an acquisition of
a quoted construction has type *n for n the order of the quoted tree, an
application requires an exactly matching m-ary function type (cumulative
subsumption on quotation types only), and an abstraction has the function
type of its binders to its body.

Inference also validates name coherence: an occurrence of a variable must
agree with the innermost binder (or the theory declaration) of that name.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .signature import Signature
from .terms import (
    Abstraction,
    Acquisition,
    Application,
    Construction,
    Variable,
    substitute,
)
from .types import FunctionType, Type, order_of_type, subsumes, type_text


class TypecheckError(Exception):
    """Inference failure; carries the offending subterm."""

    def __init__(self, message: str, subject: Construction | None = None):
        super().__init__(message)
        self.subject = subject


class UnknownIdentifierError(TypecheckError):
    pass


class ArityMismatchError(TypecheckError):
    pass


class OperandTypeError(TypecheckError):
    pass


class NotAFunctionError(TypecheckError):
    pass


class VariableTypeClashError(TypecheckError):
    pass


class SubstitutionTypeError(TypecheckError):
    pass


@dataclass
class TypingContext:
    signature: Signature
    variable_types: dict[str, Type] = field(default_factory=dict)

    @classmethod
    def from_signature(cls, sig: Signature) -> "TypingContext":
        return cls(sig, dict(sig.variables))


@dataclass(frozen=True)
class TypingJudgment:
    subject: Construction
    type: Type
    order: int


def infer_type(x: Construction, ctx: TypingContext) -> TypingJudgment:
    t = _infer(x, ctx, {})
    return TypingJudgment(x, t, order_of_type(t))


def _infer(x: Construction, ctx: TypingContext, scope: dict[str, Type]) -> Type:
    if isinstance(x, Variable):
        declared = scope.get(x.name, ctx.variable_types.get(x.name))
        if declared is not None and declared != x.type:
            raise VariableTypeClashError(
                f"variable {x.name} occurs at {type_text(x.type)} where "
                f"{type_text(declared)} is in force",
                x,
            )
        return x.type
    if isinstance(x, Acquisition):
        if isinstance(x.target, str):
            try:
                return ctx.signature.type_of(x.target)
            except KeyError:
                raise UnknownIdentifierError(
                    f"unknown constant {x.target}", x
                ) from None
        return _quotation_type(x.target, ctx, scope)
    if isinstance(x, Application):
        op_type = _infer(x.operator, ctx, scope)
        if not isinstance(op_type, FunctionType):
            raise NotAFunctionError(
                f"operator has non-function type {type_text(op_type)}", x.operator
            )
        if len(op_type.params) != len(x.operands):
            raise ArityMismatchError(
                f"operator expects {len(op_type.params)} operands, "
                f"got {len(x.operands)}",
                x,
            )
        for param, operand in zip(op_type.params, x.operands):
            got = _infer(operand, ctx, scope)
            if not subsumes(param, got):
                raise OperandTypeError(
                    f"operand has type {type_text(got)} where "
                    f"{type_text(param)} is expected",
                    operand,
                )
        return op_type.result
    inner = dict(scope)
    for b in x.binders:
        inner[b.name] = b.type
    body_type = _infer(x.body, ctx, inner)
    return FunctionType(tuple(b.type for b in x.binders), body_type)


def _quotation_type(x: Construction, ctx: TypingContext, scope: dict[str, Type]):
    from .types import ConstructionType

    return ConstructionType(construction_order(x, ctx, scope))


def construction_order(
    x: Construction, ctx: TypingContext, scope: dict[str, Type] | None = None
) -> int:
    """Order of a construction: the max order over the types of all its
    subconstructions, the construction's own type included."""
    scope = dict(scope or {})
    own = _infer(x, ctx, scope)
    best = order_of_type(own)
    if isinstance(x, Application):
        best = max(
            best,
            construction_order(x.operator, ctx, scope),
            *[construction_order(a, ctx, scope) for a in x.operands],
        )
    elif isinstance(x, Abstraction):
        inner = dict(scope)
        for b in x.binders:
            inner[b.name] = b.type
        best = max(best, construction_order(x.body, ctx, inner))
    return best


def typed_substitute(
    y: Construction,
    bindings: Sequence[tuple[Variable, Construction]],
    ctx: TypingContext,
) -> Construction:
    """Substitution with the type precondition enforced."""
    for v, c in bindings:
        got = infer_type(c, ctx).type
        if not subsumes(v.type, got):
            raise SubstitutionTypeError(
                f"cannot substitute a {type_text(got)} construction for "
                f"{v.name}:{type_text(v.type)}",
                c,
            )
    return substitute(y, bindings)
