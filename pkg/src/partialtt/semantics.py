"""Finite-model semantics: the soundness oracle.

A model is a frame of small named domains plus an interpretation of the
declared constants; function domains consist of all finite partial maps.
Evaluation of a construction under an assignment either yields a value or
nothing at all (improperness, encoded as None).  Engine limits — quotation
domains and oversized function spaces — raise errors and are never
conflated with improperness.

Truth values are the elements T and F of the fixed domain for `o`.
Evaluation is uniformly strict: an application with an improper operator
or operand, or a function undefined at the argument tuple, is improper.
Abstractions always evaluate properly, to the finite partial map that has
no entry where the body is improper.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .judgments import Match, Sequent, match_free_variables, sequent_free_variables
from .signature import (
    FALSITY,
    TRUTH,
    Signature,
    is_bot_name,
    parse_builtin,
)
from .terms import (
    Abstraction,
    Acquisition,
    Application,
    Construction,
    Variable,
)
from .typecheck import TypingContext, construction_order
from .types import (
    BaseType,
    ConstructionType,
    FunctionType,
    O,
    Type,
    type_text,
)


class EngineError(Exception):
    """Resource or configuration failure of the evaluator (not a verdict)."""


class UnsupportedOrderError(EngineError):
    """Evaluation would need to enumerate a quotation domain."""


class SpaceCapError(EngineError):
    """A function space or assignment product exceeds the configured cap."""


class ModelError(ValueError):
    """Ill-formed model: missing or mistyped interpretations, bad domains."""


DEFAULT_CAP = 10**5


@dataclass(frozen=True)
class Element:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FnValue:
    """A finite partial map; an absent entry means undefined there."""

    entries: frozenset[tuple[tuple["Value", ...], "Value"]]

    def lookup(self, args: tuple["Value", ...]) -> Optional["Value"]:
        try:
            table = object.__getattribute__(self, "_table")
        except AttributeError:
            table = dict(self.entries)
            object.__setattr__(self, "_table", table)
        return table.get(args)


@dataclass(frozen=True)
class Quoted:
    construction: Construction


Value = Union[Element, FnValue, Quoted]

TRUE = Element(TRUTH)
FALSE = Element(FALSITY)

Assignment = dict[Variable, Value]


def fn_value(entries: Iterable[tuple[tuple[Value, ...], Value]]) -> FnValue:
    return FnValue(frozenset(entries))


def _fn_from_pairs(pairs: dict[tuple[Value, ...], Value]) -> FnValue:
    return FnValue(frozenset(pairs.items()))


@dataclass
class Model:
    signature: Signature
    domains: dict[str, tuple[str, ...]]  # base name -> element names ('o' fixed)
    interpretation: dict[str, Value] = field(default_factory=dict)
    cap: int = DEFAULT_CAP
    _builtins: dict[str, Value] = field(default_factory=dict, repr=False)
    _spaces: dict[Type, list[Value]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.domains.setdefault("i", ("a",))
        self.domains.setdefault("w", ("w1",))
        self.domains["o"] = (TRUTH, FALSITY)

    def elements(self, base: str) -> tuple[Element, ...]:
        return tuple(Element(e) for e in self.domains[base])

    def domain_values(self, t: Type) -> list[Value]:
        """All values of type t in this model, in a fixed order."""
        if isinstance(t, BaseType):
            return list(self.elements(t.name))
        if isinstance(t, ConstructionType):
            raise UnsupportedOrderError(
                f"cannot enumerate the quotation domain {type_text(t)}"
            )
        cached = self._spaces.get(t)
        if cached is None:
            cached = enumerate_function_space(list(t.params), t.result, self)
            self._spaces[t] = cached
        return cached

    def constant_value(self, name: str) -> Optional[Value]:
        """Interpretation of a constant; None for the bot constants."""
        if is_bot_name(name):
            return None
        if name in self.interpretation:
            return self.interpretation[name]
        split = parse_builtin(name)
        if split is not None:
            v = self._builtins.get(name)
            if v is None:
                v = builtin_table(name, self.signature.type_of(name), self)
                self._builtins[name] = v
            return v
        raise ModelError(f"constant {name} is not interpreted in the model")


def random_value(rng, t: Type, m: Model) -> Value:
    """One uniformly drawn value of type t (without enumerating the space)."""
    if isinstance(t, BaseType):
        return rng.choice(m.domain_values(t))
    if isinstance(t, ConstructionType):
        raise UnsupportedOrderError(
            f"cannot draw from the quotation domain {type_text(t)}"
        )
    tuples = itertools.product(*(m.domain_values(p) for p in t.params))
    entries = []
    for args in tuples:
        pick = rng.randrange(0, _result_count(t.result, m) + 1)
        if pick > 0:
            entries.append((args, random_value(rng, t.result, m)))
    return fn_value(entries)


def _result_count(t: Type, m: Model) -> int:
    if isinstance(t, BaseType):
        return len(m.domains[t.name])
    if isinstance(t, FunctionType):
        tuples = 1
        for p in t.params:
            tuples *= _result_count(p, m) if isinstance(p, BaseType) else len(
                m.domain_values(p)
            )
        return (_result_count(t.result, m) + 1) ** tuples
    raise UnsupportedOrderError(f"cannot size {type_text(t)}")


def enumerate_function_space(
    params: list[Type], result: Type, m: Model
) -> list[Value]:
    """All partial maps from the parameter-tuple set to the result domain.

    Count is (|result|+1)^(#tuples); the first value enumerated is the
    nowhere-defined map (absent precedes every element, lexicographically).
    """
    tuples = list(itertools.product(*(m.domain_values(p) for p in params)))
    results = m.domain_values(result)
    count = (len(results) + 1) ** len(tuples)
    if count > m.cap:
        space = type_text(FunctionType(tuple(params), result))
        raise SpaceCapError(
            f"function space {space} has {count} values, over the cap {m.cap}"
        )
    choices: list[list[Optional[Value]]] = [[None, *results] for _ in tuples]
    out: list[Value] = []
    for combo in itertools.product(*choices):
        out.append(
            fn_value(
                (args, val)
                for args, val in zip(tuples, combo)
                if val is not None
            )
        )
    return out


def builtin_table(name: str, t: Type, m: Model) -> Value:
    """The fixed interpretation of a logical constant in a model.

    Total tables for negation, the material conditional, the quantifiers
    and identity; the singularization function is defined exactly on the
    characteristic maps sending a single element to T.
    """
    split = parse_builtin(name)
    if split is None:
        raise ModelError(f"{name} is not a builtin")
    head, _ = split
    if head == TRUTH:
        return TRUE
    if head == FALSITY:
        return FALSE
    if head == "not":
        return fn_value([((TRUE,), FALSE), ((FALSE,), TRUE)])
    if head == "imp":
        return fn_value(
            [
                ((TRUE, TRUE), TRUE),
                ((TRUE, FALSE), FALSE),
                ((FALSE, TRUE), TRUE),
                ((FALSE, FALSE), TRUE),
            ]
        )
    if head == "bot":
        raise ModelError("bot constants have no interpretation")
    assert isinstance(t, FunctionType)
    if head == "eq":
        tau = t.params[0]
        values = m.domain_values(tau)
        return fn_value(
            ((a, b), TRUE if a == b else FALSE) for a in values for b in values
        )
    # Class-operator builtins: domain is the space of characteristic maps.
    cls_type = t.params[0]
    assert isinstance(cls_type, FunctionType)
    tau = cls_type.params[0]
    carrier = m.domain_values(tau)
    classes = m.domain_values(cls_type)
    if head == "some":
        return fn_value(
            ((f,), TRUE if any(v == TRUE for _, v in f.entries) else FALSE)
            for f in classes
            if isinstance(f, FnValue)
        )
    if head == "all":
        return fn_value(
            (
                (f,),
                TRUE
                if all(f.lookup((x,)) == TRUE for x in carrier)
                else FALSE,
            )
            for f in classes
            if isinstance(f, FnValue)
        )
    if head == "the":
        entries = []
        for f in classes:
            assert isinstance(f, FnValue)
            hits = [k[0] for k, v in f.entries if v == TRUE]
            if len(hits) == 1:
                entries.append(((f,), hits[0]))
        return fn_value(entries)
    raise ModelError(f"no table for builtin {name}")


def evaluate(x: Construction, m: Model, v: Assignment) -> Optional[Value]:
    """The value x constructs under v in m, or None when x is improper."""
    if isinstance(x, Variable):
        try:
            return v[x]
        except KeyError:
            raise EngineError(
                f"assignment is not total on {x.name}:{type_text(x.type)}"
            ) from None
    if isinstance(x, Acquisition):
        if x.is_quoted:
            return Quoted(x.target)
        return m.constant_value(x.target)
    if isinstance(x, Application):
        f = evaluate(x.operator, m, v)
        if f is None:
            return None
        args = []
        for operand in x.operands:
            a = evaluate(operand, m, v)
            if a is None:
                return None
            args.append(a)
        if not isinstance(f, FnValue):
            raise EngineError("operator value is not a function")
        return f.lookup(tuple(args))
    # Abstraction: always proper, one entry per tuple with a proper body.
    spaces = [m.domain_values(b.type) for b in x.binders]
    entries = []
    inner = dict(v)
    for combo in itertools.product(*spaces):
        for b, val in zip(x.binders, combo):
            inner[b] = val
        body = evaluate(x.body, m, inner)
        if body is not None:
            entries.append((tuple(combo), body))
    return fn_value(entries)


def satisfies(mt: Match, m: Model, v: Assignment) -> bool:
    """Congruence of the match sides: both improper, or both the same value."""
    left = evaluate(mt.lhs, m, v)
    if mt.rhs is None:
        return left is None
    if left is None:
        return False
    right = evaluate(mt.rhs, m, v)
    return left == right


@dataclass
class ValidityResult:
    valid: bool
    witness: Optional[Assignment] = None  # falsifying assignment

    def __bool__(self) -> bool:
        return self.valid


def assignments_over(
    variables: Iterable[Variable], m: Model
) -> Iterable[Assignment]:
    """All assignments of model values to the given variables, in a fixed
    deterministic order; the product size obeys the model cap."""
    vs = sorted(set(variables), key=lambda x: (x.name, type_text(x.type)))
    spaces = [m.domain_values(x.type) for x in vs]
    total = 1
    for s in spaces:
        total *= len(s)
    if total > m.cap:
        raise SpaceCapError(
            f"assignment space over {len(vs)} variables has {total} points, "
            f"over the cap {m.cap}"
        )
    for combo in itertools.product(*spaces):
        yield dict(zip(vs, combo))


def sequent_valid(s: Sequent, m: Model) -> ValidityResult:
    """Exhaustive check: every assignment satisfying the antecedent also
    satisfies the succedent.  Returns a falsifying witness otherwise."""
    for v in assignments_over(sequent_free_variables(s), m):
        if all(satisfies(mt, m, v) for mt in s.antecedent) and not satisfies(
            s.succedent, m, v
        ):
            return ValidityResult(False, v)
    return ValidityResult(True)


def match_valid(mt: Match, m: Model) -> ValidityResult:
    return sequent_valid(Sequent(frozenset(), mt), m)


def check_model(m: Model) -> None:
    """Validate a model against its signature.

    Domains must be nonempty with names unique across domains; every
    declared constant must be interpreted at its declared type; constants
    declared distinct must be interpreted apart.
    """
    seen: dict[str, str] = {}
    for base, elems in m.domains.items():
        if not elems:
            raise ModelError(f"domain {base} is empty")
        for e in elems:
            if e in seen and seen[e] != base:
                raise ModelError(
                    f"element {e} appears in domains {seen[e]} and {base}"
                )
            seen[e] = base
    ctx = TypingContext.from_signature(m.signature)
    for name, t in m.signature.constants.items():
        if name not in m.interpretation:
            raise ModelError(f"constant {name} is not interpreted")
        if not _value_fits(m.interpretation[name], t, m, ctx):
            raise ModelError(
                f"interpretation of {name} does not fit {type_text(t)}"
            )
    for group in m.signature.distinct_groups:
        vals = {}
        for name in sorted(group):
            val = m.constant_value(name)
            for other, v2 in vals.items():
                if v2 == val:
                    raise ModelError(
                        f"constants {other} and {name} are declared distinct "
                        "but interpreted alike"
                    )
            vals[name] = val


def _value_fits(v: Value, t: Type, m: Model, ctx: TypingContext) -> bool:
    if isinstance(t, BaseType):
        return isinstance(v, Element) and v.name in m.domains[t.name]
    if isinstance(t, ConstructionType):
        if not isinstance(v, Quoted):
            return False
        return construction_order(v.construction, ctx) <= t.order
    if not isinstance(v, FnValue):
        return False
    for args, val in v.entries:
        if len(args) != len(t.params):
            return False
        if not all(
            _value_fits(a, p, m, ctx) for a, p in zip(args, t.params)
        ):
            return False
        if not _value_fits(val, t.result, m, ctx):
            return False
    return True
