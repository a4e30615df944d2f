"""Type algebra: base types, quotation types *n, and m-ary partial-function types.

Every type has a computable order (>= 1).  Quotation types are cumulative:
a value of type *m is accepted wherever *n (n >= m) is expected; all other
acceptance is structural equality.  Function types are m-ary and never
curried.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

BASE_NAMES = ("o", "i", "w")


class TypeSyntaxError(ValueError):
    """Malformed type (bad base name, zero-ary function, order < 1)."""


@dataclass(frozen=True)
class BaseType:
    name: str  # 'o' truth values, 'i' entities, 'w' possible worlds

    def __post_init__(self) -> None:
        if self.name not in BASE_NAMES:
            raise TypeSyntaxError(f"unknown base type {self.name!r}")

    def __repr__(self) -> str:
        return type_text(self)


@dataclass(frozen=True)
class ConstructionType:
    """The type *n of n-th-order constructions-as-objects."""

    order: int

    def __post_init__(self) -> None:
        if self.order < 1:
            raise TypeSyntaxError("construction type order must be >= 1")

    def __repr__(self) -> str:
        return type_text(self)


@dataclass(frozen=True)
class FunctionType:
    params: tuple["Type", ...]
    result: "Type"

    def __post_init__(self) -> None:
        if not self.params:
            raise TypeSyntaxError("function types are m-ary with m >= 1")

    def __repr__(self) -> str:
        return type_text(self)


Type = Union[BaseType, ConstructionType, FunctionType]

O = BaseType("o")
I = BaseType("i")
W = BaseType("w")


def fn(*params_then_result: Type) -> FunctionType:
    """Build the function type (p1,...,pm)->r from its components."""
    *params, result = params_then_result
    return FunctionType(tuple(params), result)


def order_of_type(t: Type) -> int:
    """Least order at which t exists; higher orders admit it cumulatively."""
    if isinstance(t, BaseType):
        return 1
    if isinstance(t, ConstructionType):
        return t.order + 1
    return max([order_of_type(p) for p in t.params] + [order_of_type(t.result)])


def subsumes(slot: Type, actual: Type) -> bool:
    """True when a value of type `actual` is acceptable in a `slot` position.

    Structural equality, plus *m <= *n cumulativity.  Function domains are
    pairwise disjoint, so cumulativity does not distribute into them.
    """
    if slot == actual:
        return True
    if isinstance(slot, ConstructionType) and isinstance(actual, ConstructionType):
        return actual.order <= slot.order
    return False


def type_text(t: Type) -> str:
    """Canonical concrete syntax of a type."""
    if isinstance(t, BaseType):
        return t.name
    if isinstance(t, ConstructionType):
        return f"*{t.order}"
    params = ",".join(type_text(p) for p in t.params)
    return f"({params})->{type_text(t.result)}"


def parse_type_text(text: str) -> Type:
    """Parse the concrete type syntax: o | i | w | *N | (t,...,t)->t.

    A bare base/star type before `->` is accepted as a unary parameter list.
    """
    t, pos = _parse_type_at(text, 0)
    if text[pos:].strip():
        raise TypeSyntaxError(f"trailing input in type {text!r}")
    return t


def _skip_ws(s: str, pos: int) -> int:
    while pos < len(s) and s[pos].isspace():
        pos += 1
    return pos


def _parse_type_at(s: str, pos: int) -> tuple[Type, int]:
    pos = _skip_ws(s, pos)
    if pos >= len(s):
        raise TypeSyntaxError("expected a type")
    if s[pos] == "(":
        parts: list[Type] = []
        pos += 1
        while True:
            t, pos = _parse_type_at(s, pos)
            parts.append(t)
            pos = _skip_ws(s, pos)
            if pos < len(s) and s[pos] == ",":
                pos += 1
                continue
            if pos < len(s) and s[pos] == ")":
                pos += 1
                break
            raise TypeSyntaxError(f"expected ',' or ')' in type at {pos}")
        pos = _skip_ws(s, pos)
        if s.startswith("->", pos):
            result, pos = _parse_type_at(s, pos + 2)
            return FunctionType(tuple(parts), result), pos
        if len(parts) == 1:
            return parts[0], pos
        raise TypeSyntaxError("parenthesized type list needs '->'")
    if s[pos] == "*":
        pos += 1
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise TypeSyntaxError("expected order digits after '*'")
        t: Type = ConstructionType(int(s[start:pos]))
    else:
        for name in BASE_NAMES:
            if s.startswith(name, pos):
                t = BaseType(name)
                pos += len(name)
                break
        else:
            raise TypeSyntaxError(f"unknown type at {s[pos:]!r}")
    pos = _skip_ws(s, pos)
    if s.startswith("->", pos):
        result, pos = _parse_type_at(s, pos + 2)
        return FunctionType((t,), result), pos
    return t, pos
