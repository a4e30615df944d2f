"""Parser and printer for the plain-text formats.

Four file kinds share one lexer: theory (constant/variable/distinctness
declarations), model (domains and interpretation tables), sequent, and
proof script.  `#` starts a comment; identifiers are [A-Za-z0-9_]+ (a
leading digit is fine: there are no numeric literals to clash with).

Construction grammar (application binds tighter than abstraction):

    Constr  := "\\" Binder {"," Binder} "." Constr
             | Atom { "(" Constr {"," Constr} ")" }
    Atom    := IDENT                            -- variable (declared/bound)
             | "'" IDENT ["<" Type ">"] ["@" Atom0]   -- constant; @ = apply
             | "quote{" Constr "}"              -- quoted construction
             | "bot<" Type ">"                  -- the improper constant
             | "(" Constr ")" | "[" Constr "]"
    Binder  := IDENT ":" Type
    Match   := Constr ":" Type (Constr | "!")
    Sequent := "[" [Match {"," Match}] "]" "=>" Match
    Step    := NAT ":" RULE {NAT} ["(" Constr ")"] "|-" Sequent

Printing is canonical: `@` sugar is expanded, antecedents are sorted by
their printed form, and abstraction operators print in brackets, so
parse(print(v)) is syntactic identity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .derived import DERIVED_NAMES, ProofScript, ProofStep
from .judgments import Match, Sequent, check_match
from .kernel import RuleId
from .semantics import Element, FnValue, Model, Quoted, Value, check_model
from .signature import Signature, builtin_name, is_bot_name
from .terms import (
    Abstraction,
    Acquisition,
    Application,
    Construction,
    Variable,
)
from .typecheck import TypingContext, infer_type
from .types import (
    BaseType,
    ConstructionType,
    FunctionType,
    Type,
    parse_type_text,
    type_text,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>=>|->|\|-)
  | (?P<ident>[A-Za-z0-9_]+)
  | (?P<punct>[()\[\]{}<>,.:!@'\\*=-])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # 'ident', 'punct', 'arrow', 'eof'
    text: str
    line: int
    col: int


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"stray character {text[pos]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: TypingContext):
        self.tokens = _lex(text)
        self.pos = 0
        self.ctx = ctx
        self.scopes: list[dict[str, Variable]] = []

    # -- token plumbing ---------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    def eat(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}")
        return self.next()

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(f"expected {what}, found {tok.text!r}")
        return self.next().text

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    # -- types --------------------------------------------------------------

    def parse_type(self) -> Type:
        if self.at("("):
            self.eat("(")
            parts = [self.parse_type()]
            while self.at(","):
                self.eat(",")
                parts.append(self.parse_type())
            self.eat(")")
            if self.at("->"):
                self.eat("->")
                return FunctionType(tuple(parts), self.parse_type())
            if len(parts) == 1:
                return parts[0]
            self.fail("parenthesized type list needs '->'")
        if self.at("*"):
            self.eat("*")
            digits = self.ident("order")
            if not digits.isdigit():
                self.fail("expected digits after '*'")
            t: Type = ConstructionType(int(digits))
        else:
            name = self.ident("type")
            try:
                t = BaseType(name)
            except Exception:
                self.fail(f"unknown base type {name!r}")
        if self.at("->"):
            self.eat("->")
            return FunctionType((t,), self.parse_type())
        return t

    # -- constructions -------------------------------------------------------

    def _lookup_variable(self, name: str, tok: Token) -> Variable:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        t = self.ctx.variable_types.get(name)
        if t is None:
            raise ParseError(
                f"unknown variable {name!r} (not bound or declared)",
                tok.line,
                tok.col,
            )
        return Variable(name, t)

    def parse_construction(self) -> Construction:
        if self.at("\\"):
            self.eat("\\")
            binders = [self._parse_binder()]
            while self.at(","):
                self.eat(",")
                binders.append(self._parse_binder())
            self.eat(".")
            self.scopes.append({b.name: b for b in binders})
            try:
                body = self.parse_construction()
            finally:
                self.scopes.pop()
            return Abstraction(tuple(binders), body)
        expr = self._parse_atom()
        while self.at("("):
            self.eat("(")
            operands = [self.parse_construction()]
            while self.at(","):
                self.eat(",")
                operands.append(self.parse_construction())
            self.eat(")")
            expr = Application(expr, tuple(operands))
        return expr

    def _parse_binder(self) -> Variable:
        name = self.ident("binder name")
        self.eat(":")
        return Variable(name, self.parse_type())

    def _parse_atom(self, allow_at: bool = True) -> Construction:
        tok = self.peek()
        if self.at("'"):
            self.eat("'")
            name = self.ident("constant name")
            if self.at("<"):
                self.eat("<")
                t = self.parse_type()
                self.eat(">")
                name = f"{name}<{type_text(t)}>"
            if not self.ctx.signature.knows(name):
                raise ParseError(
                    f"undeclared constant {name!r}", tok.line, tok.col
                )
            expr: Construction = Acquisition(name)
            if allow_at and self.at("@"):
                self.eat("@")
                arg = self._parse_atom(allow_at=False)
                expr = Application(expr, (arg,))
            return expr
        if self.at("(") or self.at("["):
            close = ")" if self.at("(") else "]"
            self.next()
            inner = self.parse_construction()
            self.eat(close)
            return inner
        name_tok = self.peek()
        name = self.ident("construction")
        if name == "quote" and self.at("{"):
            self.eat("{")
            inner = self.parse_construction()
            self.eat("}")
            return Acquisition(inner)
        if name == "bot" and self.at("<"):
            self.eat("<")
            t = self.parse_type()
            self.eat(">")
            return Acquisition(f"bot<{type_text(t)}>")
        return self._lookup_variable(name, name_tok)

    # -- matches and sequents ------------------------------------------------

    def parse_match(self) -> Match:
        lhs = self.parse_construction()
        self.eat(":")
        t = self.parse_type()
        if self.at("!"):
            self.eat("!")
            return Match(lhs, t, None)
        return Match(lhs, t, self.parse_construction())

    def parse_sequent(self) -> Sequent:
        self.eat("[")
        antecedent = []
        if not self.at("]"):
            antecedent.append(self.parse_match())
            while self.at(","):
                self.eat(",")
                antecedent.append(self.parse_match())
        self.eat("]")
        self.eat("=>")
        return Sequent(frozenset(antecedent), self.parse_match())


# -- public construction / match / sequent entry points ----------------------


def parse_construction(text: str, ctx: TypingContext) -> Construction:
    p = _Parser(text, ctx)
    c = p.parse_construction()
    if not p.at_end():
        p.fail("trailing input after construction")
    infer_type(c, ctx)  # well-typedness is part of parsing
    return c


def parse_match(text: str, ctx: TypingContext) -> Match:
    p = _Parser(text, ctx)
    m = p.parse_match()
    if not p.at_end():
        p.fail("trailing input after match")
    check_match(m, ctx)
    return m


def parse_sequent(text: str, ctx: TypingContext) -> Sequent:
    p = _Parser(text, ctx)
    s = p.parse_sequent()
    if not p.at_end():
        p.fail("trailing input after sequent")
    for m in s.antecedent:
        check_match(m, ctx)
    check_match(s.succedent, ctx)
    return s


# -- printer ------------------------------------------------------------------


def print_construction(c: Construction) -> str:
    if isinstance(c, Variable):
        return c.name
    if isinstance(c, Acquisition):
        if c.is_quoted:
            return f"quote{{{print_construction(c.target)}}}"
        if is_bot_name(c.target):
            return c.target
        return f"'{c.target}"
    if isinstance(c, Application):
        op = c.operator
        args = ",".join(print_construction(a) for a in c.operands)
        if isinstance(op, Abstraction):
            return f"[{print_construction(op)}]({args})"
        return f"{print_construction(op)}({args})"
    binders = ",".join(f"{b.name}:{type_text(b.type)}" for b in c.binders)
    return f"\\{binders}. {print_construction(c.body)}"


def print_match(m: Match) -> str:
    rhs = "!" if m.rhs is None else print_construction(m.rhs)
    return f"{print_construction(m.lhs)} :{type_text(m.type)} {rhs}"


def print_sequent(s: Sequent) -> str:
    antecedent = ", ".join(sorted(print_match(m) for m in s.antecedent))
    return f"[{antecedent}] => {print_match(s.succedent)}"


def print_proof(script: ProofScript) -> str:
    lines = [f"proof {script.name}"]
    for st in script.steps:
        refs = "".join(f" {r}" for r in st.refs)
        param = (
            f" ({print_construction(st.param)})" if st.param is not None else ""
        )
        lines.append(
            f"{st.index}: {st.rule}{refs}{param} |- {print_sequent(st.claimed)}"
        )
    return "\n".join(lines) + "\n"


# -- theory files --------------------------------------------------------------


def parse_theory(text: str) -> Signature:
    """`const name : type`, `var name : type`, `distinct a, b, ...` lines."""
    sig = Signature()
    p = _Parser(text, TypingContext(sig))
    while not p.at_end():
        keyword = p.ident("declaration keyword")
        if keyword == "const":
            name = p.ident("constant name")
            p.eat(":")
            sig.declare(name, p.parse_type())
        elif keyword == "var":
            name = p.ident("variable name")
            p.eat(":")
            sig.declare_variable(name, p.parse_type())
        elif keyword == "distinct":
            names = [p.ident("constant name")]
            while p.at(","):
                p.eat(",")
                names.append(p.ident("constant name"))
            sig.declare_distinct(names)
        else:
            p.fail(f"unknown declaration {keyword!r}")
    return sig


# -- model files ----------------------------------------------------------------


def parse_model(text: str, sig: Signature, cap: int | None = None) -> Model:
    """`domain b = { e, ... }` and `const name : type = value` lines.

    Table values are `{ (args) -> value, ... }`; an omitted tuple is
    undefined there.
    """
    from .semantics import DEFAULT_CAP

    model = Model(sig, {}, {}, cap or DEFAULT_CAP)
    p = _Parser(text, TypingContext(sig))
    elements: dict[str, Element] = {}

    def parse_value() -> Value:
        if p.at("{"):
            p.eat("{")
            entries = []
            while not p.at("}"):
                p.eat("(")
                args = [parse_value()]
                while p.at(","):
                    p.eat(",")
                    args.append(parse_value())
                p.eat(")")
                p.eat("->")
                entries.append((tuple(args), parse_value()))
                if p.at(","):
                    p.eat(",")
            p.eat("}")
            return FnValue(frozenset(entries))
        name = p.ident("element name")
        if name in ("T", "F"):
            return Element(name)
        if name not in elements:
            p.pos -= 1
            p.fail(f"unknown element {name!r}")
        return elements[name]

    while not p.at_end():
        keyword = p.ident("model entry")
        if keyword == "domain":
            base = p.ident("base type")
            if base not in ("i", "w"):
                p.fail("domains are declared for base types i and w")
            p.eat("=")
            p.eat("{")
            names = [p.ident("element name")]
            while p.at(","):
                p.eat(",")
                names.append(p.ident("element name"))
            p.eat("}")
            model.domains[base] = tuple(names)
            for n in names:
                elements[n] = Element(n)
        elif keyword == "const":
            name = p.ident("constant name")
            p.eat(":")
            declared = p.parse_type()
            if sig.constants.get(name) != declared:
                p.fail(f"constant {name!r} is not declared at this type")
            p.eat("=")
            model.interpretation[name] = parse_value()
        else:
            p.fail(f"unknown model entry {keyword!r}")
    check_model(model)
    return model


def print_value(v: Value) -> str:
    if isinstance(v, Element):
        return v.name
    if isinstance(v, Quoted):
        return f"quote{{{print_construction(v.construction)}}}"
    entries = sorted(
        f"({','.join(print_value(a) for a in args)}) -> {print_value(val)}"
        for args, val in v.entries
    )
    return "{ " + ", ".join(entries) + " }" if entries else "{ }"


def print_model(m: Model) -> str:
    lines = []
    for base in ("i", "w"):
        lines.append(f"domain {base} = {{ {', '.join(m.domains[base])} }}")
    for name in sorted(m.interpretation):
        t = m.signature.constants[name]
        lines.append(
            f"const {name} : {type_text(t)} = "
            f"{print_value(m.interpretation[name])}"
        )
    return "\n".join(lines) + "\n"


# -- sequent files ----------------------------------------------------------------


def parse_sequent_file(text: str, sig: Signature) -> Sequent:
    return parse_sequent_from(text, TypingContext.from_signature(sig))


def parse_sequent_from(text: str, ctx: TypingContext) -> Sequent:
    p = _Parser(text, ctx)
    s = p.parse_sequent()
    if not p.at_end():
        p.fail("trailing input after sequent")
    for m in s.antecedent:
        check_match(m, ctx)
    check_match(s.succedent, ctx)
    return s


# -- proof files -------------------------------------------------------------------


_RULE_NAMES = frozenset(r.value for r in RuleId) | DERIVED_NAMES | {"hyp"}


def parse_proof(text: str, sig: Signature) -> ProofScript:
    ctx = TypingContext.from_signature(sig)
    p = _Parser(text, ctx)
    name = "unnamed"
    if p.peek().text == "proof":
        p.next()
        name = p.ident("proof name")
    script = ProofScript(name)
    seen: set[int] = set()
    while not p.at_end():
        idx_text = p.ident("step number")
        if not idx_text.isdigit():
            p.fail("step lines start with a number")
        index = int(idx_text)
        if index in seen:
            p.fail(f"duplicate step number {index}")
        p.eat(":")
        rule = p.ident("rule name")
        while p.at("-"):  # kebab rule names lex as ident '-' ident
            p.eat("-")
            rule += "-" + p.ident("rule name")
        if rule not in _RULE_NAMES:
            p.fail(f"unknown rule {rule!r}")
        refs = []
        while p.peek().kind == "ident" and p.peek().text.isdigit():
            ref = int(p.next().text)
            if ref not in seen:
                p.fail(f"step {index} references unknown step {ref}")
            refs.append(ref)
        param = None
        if p.at("("):
            p.eat("(")
            param = p.parse_construction()
            p.eat(")")
        p.eat("|-")
        claimed = p.parse_sequent()
        for m in claimed.antecedent:
            check_match(m, ctx)
        check_match(claimed.succedent, ctx)
        script.steps.append(ProofStep(index, rule, tuple(refs), param, claimed))
        seen.add(index)
    return script
