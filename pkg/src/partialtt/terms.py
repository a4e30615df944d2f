"""The construction language: variables, acquisitions, applications, abstractions.

Constructions are immutable trees compared by plain syntactic identity
(bound-variable names count: these are hyperintensional meanings, not
alpha-equivalence classes).  Quotation is opaque: neither free-variable
analysis nor substitution looks inside a quoted construction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .types import Type


@dataclass(frozen=True)
class Variable:
    name: str
    type: Type

    def __repr__(self) -> str:
        return f"Variable({self.name}:{self.type})"


@dataclass(frozen=True)
class Acquisition:
    """Primitive construction delivering a fixed object.

    `target` is either the name of a declared constant or a quoted
    construction (whose acquisition delivers the construction itself).
    """

    target: Union[str, "Construction"]

    @property
    def is_quoted(self) -> bool:
        return not isinstance(self.target, str)

    def __repr__(self) -> str:
        if self.is_quoted:
            return f"Acquisition(quote {self.target!r})"
        return f"Acquisition('{self.target})"


@dataclass(frozen=True)
class Application:
    operator: "Construction"
    operands: tuple["Construction", ...]

    def __post_init__(self) -> None:
        if not self.operands:
            raise ValueError("applications take at least one operand")


@dataclass(frozen=True)
class Abstraction:
    binders: tuple[Variable, ...]
    body: "Construction"

    def __post_init__(self) -> None:
        if not self.binders:
            raise ValueError("abstractions bind at least one variable")
        names = [b.name for b in self.binders]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate binder names in {names}")


Construction = Union[Variable, Acquisition, Application, Abstraction]


def syntactic_equal(x: Construction, y: Construction) -> bool:
    """Identity of trees, bound-variable names included."""
    return x == y


def subconstructions(x: Construction) -> Iterator[Construction]:
    """x and its parts, quotation bodies excluded (quotes are primitive)."""
    yield x
    if isinstance(x, Application):
        yield from subconstructions(x.operator)
        for operand in x.operands:
            yield from subconstructions(operand)
    elif isinstance(x, Abstraction):
        for b in x.binders:
            yield from subconstructions(b)
        yield from subconstructions(x.body)


def free_variables(x: Construction) -> frozenset[Variable]:
    """Variables with at least one occurrence not captured by a binder."""
    if isinstance(x, Variable):
        return frozenset([x])
    if isinstance(x, Acquisition):
        return frozenset()
    if isinstance(x, Application):
        acc = free_variables(x.operator)
        for operand in x.operands:
            acc |= free_variables(operand)
        return acc
    return free_variables(x.body) - frozenset(x.binders)


def is_free_in(v: Variable, x: Construction) -> bool:
    return v in free_variables(x)


_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def fresh_name(base: str, used: Iterable[str]) -> str:
    """Deterministic fresh name: the bare base if unused, else the smallest
    numeric suffix appended to it."""
    taken = set(used)
    stem = base
    m = _SUFFIX.match(base)
    if m:
        stem = m.group(1) or base
    if base not in taken:
        return base
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def substitute(
    y: Construction, bindings: Sequence[tuple[Variable, Construction]]
) -> Construction:
    """Simultaneous capture-avoiding substitution at free occurrences.

    Binders are renamed (deterministically) exactly when a free variable of
    an inserted construction would otherwise be captured, or when the binder
    name would shadow an inserted free name at a different type (which would
    break print/reparse identity).  No substitution under quotation.

    Type agreement between each variable and its replacement is the caller's
    obligation; `typecheck.typed_substitute` enforces it.
    """
    sub = {v: c for v, c in bindings}
    return _subst(y, sub)


def _subst(y: Construction, sub: dict[Variable, Construction]) -> Construction:
    if not sub:
        return y
    if isinstance(y, Variable):
        return sub.get(y, y)
    if isinstance(y, Acquisition):
        return y
    if isinstance(y, Application):
        return Application(
            _subst(y.operator, sub), tuple(_subst(a, sub) for a in y.operands)
        )
    # Abstraction: drop bindings shadowed by the binders or not occurring free.
    body_free = free_variables(y.body)
    live = {
        v: c
        for v, c in sub.items()
        if v not in y.binders and v in body_free and c != v
    }
    if not live:
        return y
    inserted_names = set()
    for c in live.values():
        inserted_names |= {fv.name for fv in free_variables(c)}
    renames: dict[Variable, Construction] = {}
    new_binders: list[Variable] = []
    used = (
        {fv.name for fv in body_free}
        | inserted_names
        | {b.name for b in y.binders}
    )
    for b in y.binders:
        if b.name in inserted_names:
            nb = Variable(fresh_name(b.name, used), b.type)
            used.add(nb.name)
            renames[b] = nb
            new_binders.append(nb)
        else:
            new_binders.append(b)
    new_body = _subst(y.body, {**live, **renames})
    return Abstraction(tuple(new_binders), new_body)
