"""Constant signatures.

A signature maps declared constant names to types and carries optional
distinctness groups (constants a model must interpret pairwise apart).
The logical constants are available in every signature without
declaration, one monomorphic instance per requested type:

    not        : (o)->o
    imp        : (o,o)->o
    all<t>     : ((t)->o)->o
    some<t>    : ((t)->o)->o
    eq<t>      : (t,t)->o
    the<t>     : ((t)->o)->t          (partial: singleton classes only)
    bot<t>     : t                    (the canonical always-improper term)
    T, F       : o

`T` and `F` form a builtin distinctness group.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .types import O, FunctionType, Type, parse_type_text, type_text

TRUTH = "T"
FALSITY = "F"

_PARAMETRIC = ("all", "some", "eq", "the", "bot")


class SignatureError(KeyError):
    """Unknown constant or inconsistent declaration."""


def builtin_name(head: str, t: Type | None = None) -> str:
    """Canonical name of a builtin instance, e.g. eq<i> or not."""
    if head in ("not", "imp", TRUTH, FALSITY):
        return head
    if t is None:
        raise SignatureError(f"builtin {head} needs a type instance")
    return f"{head}<{type_text(t)}>"


def parse_builtin(name: str) -> tuple[str, str] | None:
    """Split a builtin name into (head, type_text); None when not builtin."""
    if name in ("not", "imp", TRUTH, FALSITY):
        return (name, "")
    if "<" in name and name.endswith(">"):
        head, _, rest = name.partition("<")
        if head in _PARAMETRIC:
            return (head, rest[:-1])
    return None


def builtin_type(name: str) -> Type | None:
    """The fixed type of a builtin constant name, or None."""
    split = parse_builtin(name)
    if split is None:
        return None
    head, ttext = split
    if head in (TRUTH, FALSITY):
        return O
    if head == "not":
        return FunctionType((O,), O)
    if head == "imp":
        return FunctionType((O, O), O)
    t = parse_type_text(ttext)
    cls = FunctionType((t,), O)
    if head in ("all", "some"):
        return FunctionType((cls,), O)
    if head == "eq":
        return FunctionType((t, t), O)
    if head == "the":
        return FunctionType((cls,), t)
    return t  # bot<t>


def is_bot_name(name: str) -> bool:
    split = parse_builtin(name)
    return split is not None and split[0] == "bot"


@dataclass
class Signature:
    constants: dict[str, Type] = field(default_factory=dict)
    distinct_groups: list[frozenset[str]] = field(default_factory=list)
    variables: dict[str, Type] = field(default_factory=dict)  # declared free vars

    def declare(self, name: str, t: Type) -> None:
        if builtin_type(name) is not None:
            raise SignatureError(f"{name} is reserved for a builtin")
        old = self.constants.get(name)
        if old is not None and old != t:
            raise SignatureError(f"constant {name} redeclared at a new type")
        self.constants[name] = t

    def declare_variable(self, name: str, t: Type) -> None:
        old = self.variables.get(name)
        if old is not None and old != t:
            raise SignatureError(f"variable {name} redeclared at a new type")
        self.variables[name] = t

    def declare_distinct(self, names: list[str]) -> None:
        for n in names:
            self.type_of(n)  # must be declared (or builtin)
        self.distinct_groups.append(frozenset(names))

    def type_of(self, name: str) -> Type:
        t = builtin_type(name)
        if t is not None:
            return t
        try:
            return self.constants[name]
        except KeyError:
            raise SignatureError(f"unknown constant {name}") from None

    def knows(self, name: str) -> bool:
        return name in self.constants or builtin_type(name) is not None

    def declared_distinct(self, a: str, b: str) -> bool:
        """True when every model must interpret a and b apart."""
        if a == b:
            return False
        if {a, b} == {TRUTH, FALSITY}:
            return True
        return any(a in g and b in g for g in self.distinct_groups)
