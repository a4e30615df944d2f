"""Proof kernel, type checker and finite-model validity oracle for a
partial type theory with labelled natural deduction."""

from .judgments import Match, Sequent, sequent
from .kernel import Kernel, KernelConfig, RuleId, Theorem
from .semantics import Model, evaluate, satisfies, sequent_valid
from .signature import Signature
from .terms import (
    Abstraction,
    Acquisition,
    Application,
    Construction,
    Variable,
    free_variables,
    substitute,
    syntactic_equal,
)
from .typecheck import TypingContext, infer_type
from .types import BaseType, ConstructionType, FunctionType, Type

__version__ = "0.1.0"

__all__ = [
    "Abstraction",
    "Acquisition",
    "Application",
    "BaseType",
    "Construction",
    "ConstructionType",
    "FunctionType",
    "Kernel",
    "KernelConfig",
    "Match",
    "Model",
    "RuleId",
    "Sequent",
    "Signature",
    "Theorem",
    "Type",
    "TypingContext",
    "Variable",
    "evaluate",
    "free_variables",
    "infer_type",
    "satisfies",
    "sequent",
    "sequent_valid",
    "substitute",
    "syntactic_equal",
]
