"""Derived rules as checked macro expansions, plus the proof replay engine.

A derived rule expands to a fixed template of primitive kernel steps; the
expansion returns both the conclusion theorem and the full primitive trace
(nested derived rules are flattened), so a conclusion is always
reproducible by the trace alone.  Fresh variables inside expansions follow
the deterministic fresh-name scheme over the free names in sight, which
reproduces the binder-name reuse of the source derivations.

Proof scripts are ordered lists of steps (hypotheses, primitive rules or
derived rules), each step carrying explicit premise references and the
claimed sequent; replay checks every step and stops at the first mismatch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .judgments import Match, Sequent, is_simple_proper
from .kernel import (
    GatedRuleError,
    Kernel,
    KernelError,
    RuleId,
    RuleShapeError,
    T_ACQ,
    F_ACQ,
    Theorem,
)
from .signature import builtin_name, parse_builtin
from .terms import (
    Abstraction,
    Acquisition,
    Application,
    Construction,
    Variable,
    free_variables,
    fresh_name,
    substitute,
    syntactic_equal,
)
from .typecheck import infer_type
from .types import FunctionType, O, Type


class DerivedRuleError(KernelError):
    """Premise shape mismatch for a derived-rule template."""


class DerivedRuleId(Enum):
    EG = "eg"
    L_NOT_III = "l-not-iii"
    L_APP_BOT = "l-app-bot"
    SI1 = "si1"
    SI2 = "si2"
    L_EQ_DESC_E = "l-eq-desc-e"
    SPR1 = "spr1"
    SPR2 = "spr2"
    SPR3 = "spr3"
    L_DESC_BOT_APP = "l-desc-bot-app"
    L_SIGMA_DESC_BOT_APP = "l-sigma-desc-bot-app"


@dataclass
class Expansion:
    theorem: Theorem
    steps: list[Theorem]  # the full primitive trace, conclusion last


def _shape(cond: bool, rule: str, what: str) -> None:
    if not cond:
        raise DerivedRuleError(f"({rule}) premise shape mismatch: {what}")


def _free_names(*items) -> set[str]:
    names: set[str] = set()
    for item in items:
        if item is None:
            continue
        if isinstance(item, Match):
            names |= _free_names(item.lhs, item.rhs)
        elif isinstance(item, Sequent):
            names |= _free_names(*item.antecedent, item.succedent)
        elif isinstance(item, (frozenset, set, tuple, list)):
            names |= _free_names(*item)
        else:
            names |= {v.name for v in free_variables(item)}
    return names


class _Names:
    """Deterministic fresh-variable supply over a pool of taken names.

    A theory-declared name is reusable only at its declared type (free
    occurrences of a declared name must carry that type).
    """

    def __init__(self, kernel: Kernel, *items):
        self.taken = _free_names(*items)
        self.declared = kernel.ctx.variable_types

    def var(self, base: str, t: Type) -> Variable:
        candidate = base
        k = 0
        while candidate in self.taken or self.declared.get(candidate, t) != t:
            k += 1
            candidate = f"{base}{k}"
        self.taken.add(candidate)
        return Variable(candidate, t)


def _unary_class(kernel: Kernel, c: Construction, rule: str) -> Type:
    t = infer_type(c, kernel.ctx).type
    _shape(
        isinstance(t, FunctionType) and len(t.params) == 1 and t.result == O,
        rule,
        "predicate must have a type (t)->o",
    )
    return t.params[0]


def _builtin_app(x: Construction, head: str) -> Optional[tuple[Construction, ...]]:
    if (
        isinstance(x, Application)
        and isinstance(x.operator, Acquisition)
        and not x.operator.is_quoted
    ):
        split = parse_builtin(x.operator.target)
        if split is not None and split[0] == head:
            return x.operands
    return None


def expand_derived(
    kernel: Kernel,
    rule: DerivedRuleId | str,
    premises: Sequence[Theorem],
    param: Construction | None = None,
) -> Expansion:
    """Expand a derived rule into primitive steps and return its conclusion."""
    rid = rule if isinstance(rule, DerivedRuleId) else DerivedRuleId(rule)
    handler = _EXPANSIONS[rid]
    steps = handler(kernel, tuple(premises), param)
    return Expansion(steps[-1], steps)


# -- individual templates ---------------------------------------------------


def _expand_eg(kernel: Kernel, premises, param) -> list[Theorem]:
    """Existential generalisation over an explicit class template."""
    (t,) = premises
    _shape(isinstance(param, Abstraction) and len(param.binders) == 1, "eg",
           "needs a unary abstraction template")
    lam = param
    x = lam.binders[0]
    _shape(x in free_variables(lam.body), "eg",
           "template variable must occur free in the body")
    m = t.succedent
    _shape(m.rhs == T_ACQ and m.type == O, "eg", "premise must be labelled T")
    target = _template_target(lam.body, x, m.lhs)
    _shape(target is not None, "eg",
           "premise is not the template instantiated at one construction")
    _shape(is_simple_proper(target, kernel.signature), "eg",
           "generalisation target must be a variable or acquisition")
    s1 = kernel.tm(t.antecedent, target)
    s2 = kernel.beta_exp(t, [s1], lam, [target])
    s3 = kernel.sigma_i(s2)
    return [s1, s2, s3]


def _template_target(
    body: Construction, x: Variable, instance: Construction
) -> Optional[Construction]:
    """The unique X with body[X/x] == instance, or None."""
    candidates: list[Construction] = []

    def walk(b: Construction, s: Construction, active: bool) -> bool:
        if active and b == x:
            candidates.append(s)
            return True
        if type(b) is not type(s):
            return False
        if isinstance(b, (Variable, Acquisition)):
            return b == s
        if isinstance(b, Application):
            return (
                len(b.operands) == len(s.operands)
                and walk(b.operator, s.operator, active)
                and all(
                    walk(bo, so, active)
                    for bo, so in zip(b.operands, s.operands)
                )
            )
        if b.binders != s.binders:
            return False
        return walk(b.body, s.body, active and x not in b.binders)

    if not walk(body, instance, True) or not candidates:
        return None
    first = candidates[0]
    if all(syntactic_equal(c, first) for c in candidates[1:]):
        return first
    return None


def _expand_l_not_iii(kernel: Kernel, premises, param) -> list[Theorem]:
    """From a true negation to a false argument."""
    (t,) = premises
    args = _builtin_app(t.succedent.lhs, "not")
    _shape(args is not None and t.succedent.rhs == T_ACQ, "l-not-iii",
           "premise must be a negation labelled T")
    o_hat = args[0]
    _shape(is_simple_proper(o_hat, kernel.signature), "l-not-iii",
           "the negated construction must be simple")
    gamma = t.antecedent
    m_t = Match(o_hat, O, T_ACQ)
    m_f = Match(o_hat, O, F_ACQ)
    _shape(m_t not in gamma and m_f not in gamma, "l-not-iii",
           "the context already decides the negated construction")
    s1 = kernel.ax(gamma | {m_f}, m_t)
    s2 = kernel.ax(gamma | {m_t}, m_f)
    s3 = kernel.not_i(s1, s2, o_hat, F_ACQ)
    s4 = kernel.wr(t, {m_t})
    s5 = kernel.efq(s4, s3, m_f)
    s6 = kernel.ax(gamma, m_f)
    s7 = kernel.ra(s5, s6, o_hat)
    return [s1, s2, s3, s4, s5, s6, s7]


def _expand_l_app_bot(kernel: Kernel, premises, param) -> list[Theorem]:
    """Strictness: an application with an improper operand is improper."""
    (t,) = premises
    _shape(isinstance(param, Application), "l-app-bot",
           "needs the target application as parameter")
    app = param
    m = t.succedent
    _shape(m.improper, "l-app-bot", "premise must be an improperness match")
    _shape(
        any(syntactic_equal(op, m.lhs) for op in app.operands),
        "l-app-bot",
        "the improper construction is not an operand of the application",
    )
    tau = infer_type(app, kernel.ctx).type
    phi = infer_type(app.operator, kernel.ctx).type
    gamma = t.antecedent
    m_bot = Match(app, tau, None)
    _shape(m_bot not in gamma, "l-app-bot",
           "the context already contains the conclusion")
    names = _Names(kernel, gamma, m, app)
    y = names.var("y", tau)
    f = names.var("f", phi)
    zs = [
        names.var("z", infer_type(op, kernel.ctx).type) for op in app.operands
    ]
    m_y = Match(app, tau, y)
    inner = frozenset(
        {Match(app.operator, phi, f)}
        | {
            Match(op, zv.type, zv)
            for op, zv in zip(app.operands, zs)
        }
    )
    s1 = kernel.ax(gamma, m_bot)
    s2 = kernel.ax(gamma, m_y)
    big = gamma | {m_y} | inner
    idx = next(
        i for i, op in enumerate(app.operands) if syntactic_equal(op, m.lhs)
    )
    s3 = kernel.ax(big, Match(app.operands[idx], zs[idx].type, zs[idx]))
    s4 = kernel.wr(t, big - gamma)
    s5 = kernel.efq(s3, s4, m_bot)
    s6 = kernel.a_inst(s2, s5, f, zs)
    s7 = kernel.exh(s1, s6, app, tau, y)
    return [s1, s2, s3, s4, s5, s6, s7]


def _expand_spr1(kernel: Kernel, premises, param) -> list[Theorem]:
    """From a truth-valued predication to the existence ascription."""
    (t,) = premises
    m = t.succedent
    _shape(
        isinstance(m.lhs, Application)
        and len(m.lhs.operands) == 1
        and m.rhs is not None
        and m.type == O,
        "spr1",
        "premise must be a proper match on a unary predication",
    )
    f_constr = m.lhs.operator
    d = m.lhs.operands[0]
    tau = _unary_class(kernel, f_constr, "spr1")
    phi = FunctionType((tau,), O)
    gamma = t.antecedent
    names = _Names(kernel, gamma, m)
    x = names.var("x", tau)
    f = names.var("f", phi)
    eq = Acquisition(builtin_name("eq", tau))
    m2 = Match(d, tau, x)
    s1 = kernel.ax(gamma, m2)
    s2 = kernel.eq_i(s1)
    s3 = kernel.tm(gamma | {m2}, x)
    lam = Abstraction((x,), Application(eq, (d, x)))
    s4 = kernel.beta_exp(s2, [s3], lam, [x])
    s5 = kernel.sigma_i(s4)
    s6 = kernel.wr(s5, {Match(f_constr, phi, f)})
    s7 = kernel.a_inst(t, s6, f, [x])
    return [s1, s2, s3, s4, s5, s6, s7]


def _existence_shape(x: Construction, rule: str):
    """Decompose some<τ>(λv. eq<τ>(D, v)) into (τ, v, D)."""
    args = _builtin_app(x, "some")
    _shape(args is not None, rule, "expected an existential")
    lam = args[0]
    _shape(isinstance(lam, Abstraction) and len(lam.binders) == 1, rule,
           "expected an abstraction class")
    v = lam.binders[0]
    eq_args = _builtin_app(lam.body, "eq")
    _shape(eq_args is not None and len(eq_args) == 2, rule,
           "expected an identity body")
    d, second = eq_args
    _shape(second == v, rule, "identity must compare against the bound variable")
    _shape(v not in free_variables(d), rule,
           "the described construction must not capture the bound variable")
    return v.type, v, d


def _expand_spr2(kernel: Kernel, premises, param) -> list[Theorem]:
    """From a true existence denial to the improperness of any predication
    of the described object."""
    (t,) = premises
    m = t.succedent
    neg = _builtin_app(m.lhs, "not")
    _shape(neg is not None and m.rhs == T_ACQ, "spr2",
           "premise must be a negation labelled T")
    existence = neg[0]
    tau, v, d = _existence_shape(existence, "spr2")
    _shape(param is not None, "spr2", "needs the predicate as parameter")
    f_constr = param
    _shape(_unary_class(kernel, f_constr, "spr2") == tau, "spr2",
           "predicate type must fit the described construction")
    gamma = t.antecedent
    lam = existence.operands[0]
    eq = Acquisition(builtin_name("eq", tau))
    names = _Names(kernel, gamma, m, f_constr)
    p = names.var("p", O)
    x1 = names.var("x", tau)
    m1 = Match(existence, O, p)
    m2 = Match(d, tau, x1)
    m_bot = Match(d, tau, None)
    _shape(m_bot not in gamma, "spr2",
           "the context already contains the improperness of the description")
    steps = []
    s1 = kernel.wr(t, {m1}); steps.append(s1)
    s2 = kernel.ax(gamma, m1); steps.append(s2)
    s3 = kernel.a_sub_i(s1, [s2]); steps.append(s3)
    sub = _expand_l_not_iii(kernel, (s3,), None)
    steps += sub
    s10 = sub[-1]  # Γ, M1 ⟶ p :o F
    s11 = kernel.tm(gamma, p); steps.append(s11)
    s12 = kernel.wr(s11, {m1}); steps.append(s12)
    idlam = Abstraction((p,), p)
    s13 = kernel.beta_exp(s10, [s12], idlam, [p]); steps.append(s13)
    s14 = kernel.a_sub_ii(s13, [s2]); steps.append(s14)
    s15 = kernel.beta_con(s14); steps.append(s15)
    s16 = kernel.sigma_inst(s15, m1); steps.append(s16)
    s17 = kernel.wr(s16, {m2}); steps.append(s17)
    s18 = kernel.ax(gamma, m2); steps.append(s18)
    s19 = kernel.eq_i(s18); steps.append(s19)
    s20 = kernel.tm(gamma, x1); steps.append(s20)
    s21 = kernel.wr(s20, {m2}); steps.append(s21)
    s22 = kernel.beta_exp(s19, [s21], lam, [x1]); steps.append(s22)
    s23 = kernel.sigma_i(s22); steps.append(s23)
    s24 = kernel.efq(s17, s23, m_bot); steps.append(s24)
    s25 = kernel.ax(gamma, m_bot); steps.append(s25)
    s26 = kernel.exh(s25, s24, d, tau, x1); steps.append(s26)
    app = Application(f_constr, (d,))
    steps += _expand_l_app_bot(kernel, (s26,), app)
    return steps


def _expand_l_desc_bot_app(kernel: Kernel, premises, param) -> list[Theorem]:
    """An improper predication of a total predicate has an improper argument."""
    t1, t2 = premises
    m1 = t1.succedent
    _shape(
        m1.improper and isinstance(m1.lhs, Application)
        and len(m1.lhs.operands) == 1,
        "l-desc-bot-app",
        "first premise must be an improper unary predication",
    )
    f_constr = m1.lhs.operator
    d = m1.lhs.operands[0]
    rho = m1.type
    tau = infer_type(d, kernel.ctx).type
    m2 = t2.succedent
    _shape(
        isinstance(m2.lhs, Application)
        and syntactic_equal(m2.lhs.operator, f_constr)
        and len(m2.lhs.operands) == 1
        and isinstance(m2.lhs.operands[0], Variable)
        and isinstance(m2.rhs, Variable),
        "l-desc-bot-app",
        "second premise must predicate a variable with a variable label",
    )
    y = m2.lhs.operands[0]
    _shape(t1.antecedent == t2.antecedent, "l-desc-bot-app",
           "premise contexts disagree")
    gamma = t1.antecedent
    m_bot = Match(d, tau, None)
    _shape(m_bot not in gamma, "l-desc-bot-app",
           "the context already contains the conclusion")
    m_y = Match(d, tau, y)
    g1 = kernel.wr(t1, {m_y})
    g2 = kernel.wr(t2, {m_y})
    g3 = kernel.ax(gamma, m_y)
    g4 = kernel.a_sub_ii(g2, [g3])
    g5 = kernel.efq(g4, g1, m_bot)
    g6 = kernel.ax(gamma, m_bot)
    g7 = kernel.exh(g6, g5, d, tau, y)
    return [g1, g2, g3, g4, g5, g6, g7]


def _expand_l_sigma_desc_bot_app(kernel: Kernel, premises, param) -> list[Theorem]:
    """An improper construction falsifies its existence ascription."""
    (t,) = premises
    m = t.succedent
    _shape(m.improper, "l-sigma-desc-bot-app",
           "premise must be an improperness match")
    d = m.lhs
    tau = m.type
    gamma = t.antecedent
    names = _Names(kernel, gamma, m)
    x = names.var("x", tau)
    p = names.var("p", O)
    eq = Acquisition(builtin_name("eq", tau))
    phi = FunctionType((tau, tau), O)
    f = names.var("f", phi)
    z1 = names.var("z1", tau)
    z2 = names.var("z2", tau)
    cls = Abstraction((x,), Application(eq, (x, d)))
    existence = Application(Acquisition(builtin_name("some", tau)), (cls,))
    m1 = Match(existence, O, p)
    m2 = Match(p, O, T_ACQ)
    m3 = Match(Application(cls, (x,)), O, T_ACQ)
    steps = []
    d2 = kernel.ax(gamma, m3); steps.append(d2)
    d3 = kernel.beta_con(d2); steps.append(d3)
    inner = frozenset(
        {Match(eq, phi, f), Match(x, tau, z1), Match(d, tau, z2)}
    )
    d4 = kernel.wr(t, {m3} | inner); steps.append(d4)
    d5 = kernel.ax(gamma | {m3} | inner, Match(d, tau, z2)); steps.append(d5)
    d6 = kernel.efq(d5, d4, Match(p, O, F_ACQ)); steps.append(d6)
    d7 = kernel.a_inst(d3, d6, f, [z1, z2]); steps.append(d7)
    d8 = kernel.wr(d7, {m1, m2}); steps.append(d8)
    e1 = kernel.ax(gamma, m2); steps.append(e1)
    e2 = kernel.tm(gamma, p); steps.append(e2)
    e3 = kernel.wr(e2, {m2}); steps.append(e3)
    idlam = Abstraction((p,), p)
    e4 = kernel.beta_exp(e1, [e3], idlam, [p]); steps.append(e4)
    e5 = kernel.wr(e4, {m1}); steps.append(e5)
    e6 = kernel.ax(gamma | {m2}, m1); steps.append(e6)
    e7 = kernel.a_sub_ii(e5, [e6]); steps.append(e7)
    e8 = kernel.beta_con(e7); steps.append(e8)
    e9 = kernel.sigma_e(e8, d8, x); steps.append(e9)
    f1 = kernel.ax(gamma | {m1}, Match(p, O, F_ACQ)); steps.append(f1)
    f2 = kernel.ra(e9, f1, p); steps.append(f2)
    f4 = kernel.wr(e2, {m1}); steps.append(f4)
    f5 = kernel.beta_exp(f2, [f4], idlam, [p]); steps.append(f5)
    f6 = kernel.ax(gamma, m1); steps.append(f6)
    f7 = kernel.a_sub_ii(f5, [f6]); steps.append(f7)
    f8 = kernel.beta_con(f7); steps.append(f8)
    f9 = kernel.sigma_inst(f8, m1); steps.append(f9)
    return steps


def _expand_spr3(kernel: Kernel, premises, param) -> list[Theorem]:
    """Compose the two lemmas: improper predication, so existence is false."""
    t1, t2 = premises
    steps = _expand_l_desc_bot_app(kernel, (t1, t2), None)
    steps += _expand_l_sigma_desc_bot_app(kernel, (steps[-1],), None)
    return steps


def _expand_si2(kernel: Kernel, premises, param) -> list[Theorem]:
    """Substitution of co-denotative intension names."""
    t1, t2 = premises
    _shape(isinstance(param, Abstraction) and len(param.binders) == 1, "si2",
           "needs a unary abstraction template")
    lam = param
    dvar = lam.binders[0]
    _shape(dvar in free_variables(lam.body), "si2",
           "template variable must occur free in the body")
    eq_args = _builtin_app(t2.succedent.lhs, "eq")
    _shape(eq_args is not None and t2.succedent.rhs == T_ACQ, "si2",
           "second premise must be a true identity")
    d, d_prime = eq_args
    _shape(is_simple_proper(d_prime, kernel.signature), "si2",
           "the co-denotative name must be simple")
    expected = substitute(lam.body, [(dvar, d)])
    _shape(
        syntactic_equal(t1.succedent.lhs, expected)
        and t1.succedent.rhs == T_ACQ,
        "si2",
        "first premise is not the template instantiated at the first name",
    )
    _shape(t1.antecedent == t2.antecedent, "si2", "premise contexts disagree")
    s1 = kernel.eq_e(t2)
    s2 = kernel.beta_exp(t1, [s1], lam, [d])
    s3 = kernel.a_sub_i(s2, [s1])
    s4 = kernel.beta_con(s3)
    return [s1, s2, s3, s4]


def _expand_si1(kernel: Kernel, premises, param) -> list[Theorem]:
    """Substitution of co-referring occurrences (extensional identity)."""
    t1, t2 = premises
    _shape(isinstance(param, Abstraction) and len(param.binders) == 1, "si1",
           "needs a unary abstraction template")
    lam = param
    xvar = lam.binders[0]
    _shape(xvar in free_variables(lam.body), "si1",
           "template variable must occur free in the body")
    eq_args = _builtin_app(t2.succedent.lhs, "eq")
    _shape(eq_args is not None and t2.succedent.rhs == T_ACQ, "si1",
           "second premise must be a true identity")
    dw, dpw = eq_args
    expected = substitute(lam.body, [(xvar, dw)])
    _shape(
        syntactic_equal(t1.succedent.lhs, expected)
        and t1.succedent.rhs == T_ACQ,
        "si1",
        "first premise is not the template instantiated at the occurrence",
    )
    _shape(t1.antecedent == t2.antecedent, "si1", "premise contexts disagree")
    gamma = t1.antecedent
    tau = xvar.type
    eq = Acquisition(builtin_name("eq", tau))
    phi = FunctionType((tau, tau), O)
    names = _Names(kernel, gamma, t1.succedent, t2.succedent, lam)
    f = names.var("f", phi)
    z1 = names.var("z1", tau)
    z2 = names.var("z2", tau)
    inner = frozenset(
        {Match(eq, phi, f), Match(dw, tau, z1), Match(dpw, tau, z2)}
    )
    i1 = kernel.wr(t1, inner)
    i2 = kernel.ax(gamma | inner, Match(dw, tau, z1))
    i3 = kernel.beta_exp(i1, [i2], lam, [dw])
    i4 = kernel.a_sub_i(i3, [i2])
    i5 = kernel.wr(t2, inner)
    i6 = kernel.ax(gamma | inner, Match(dpw, tau, z2))
    i7 = kernel.a_sub_i(i5, [i2, i6])
    i8 = kernel.eq_e(i7)
    i9 = kernel.a_sub_i(i4, [i8])
    i10 = kernel.a_sub_ii(i9, [i6])
    i11 = kernel.beta_con(i10)
    i12 = kernel.a_inst(t2, i11, f, [z1, z2])
    return [i1, i2, i3, i4, i5, i6, i7, i8, i9, i10, i11, i12]


def _expand_l_eq_desc_e(kernel: Kernel, premises, param) -> list[Theorem]:
    """From 'the F is identical with a' to 'a is an F'."""
    (t,) = premises
    eq_args = _builtin_app(t.succedent.lhs, "eq")
    _shape(eq_args is not None and t.succedent.rhs == T_ACQ, "l-eq-desc-e",
           "premise must be a true identity")
    desc, label = eq_args
    _shape(_builtin_app(desc, "the") is not None, "l-eq-desc-e",
           "the first identity argument must be a description")
    cls = desc.operands[0]
    _shape(isinstance(cls, Abstraction) and len(cls.binders) == 1,
           "l-eq-desc-e", "the described class must be an abstraction")
    s1 = kernel.eq_e(t)
    s2 = kernel.iota_e(s1)
    s3 = kernel.beta_con(s2)
    return [s1, s2, s3]


_EXPANSIONS = {
    DerivedRuleId.EG: _expand_eg,
    DerivedRuleId.L_NOT_III: _expand_l_not_iii,
    DerivedRuleId.L_APP_BOT: _expand_l_app_bot,
    DerivedRuleId.SI1: _expand_si1,
    DerivedRuleId.SI2: _expand_si2,
    DerivedRuleId.L_EQ_DESC_E: _expand_l_eq_desc_e,
    DerivedRuleId.SPR1: _expand_spr1,
    DerivedRuleId.SPR2: _expand_spr2,
    DerivedRuleId.SPR3: _expand_spr3,
    DerivedRuleId.L_DESC_BOT_APP: _expand_l_desc_bot_app,
    DerivedRuleId.L_SIGMA_DESC_BOT_APP: _expand_l_sigma_desc_bot_app,
}

DERIVED_NAMES = frozenset(r.value for r in DerivedRuleId)


# -- proof scripts ------------------------------------------------------------


@dataclass(frozen=True)
class ProofStep:
    index: int
    rule: str  # 'hyp', a primitive rule id, or a derived rule id
    refs: tuple[int, ...]
    param: Optional[Construction]
    claimed: Sequent


@dataclass
class ProofScript:
    name: str
    steps: list[ProofStep] = field(default_factory=list)


@dataclass
class StepVerdict:
    index: int
    rule: str
    ok: bool
    message: str = ""


@dataclass
class ReplayReport:
    name: str
    verdicts: list[StepVerdict] = field(default_factory=list)
    theorem: Optional[Theorem] = None
    primitive_steps: int = 0

    @property
    def ok(self) -> bool:
        return bool(self.verdicts) and all(v.ok for v in self.verdicts)


class ScriptError(Exception):
    """Bad premise references or malformed step data."""


def replay_proof(script: ProofScript, kernel: Kernel) -> ReplayReport:
    """Check every step: apply its rule to the referenced premises and
    verify the claimed sequent is exactly the produced one."""
    report = ReplayReport(script.name)
    produced: dict[int, Theorem] = {}
    for step in script.steps:
        try:
            refs = []
            for r in step.refs:
                if r not in produced or r >= step.index:
                    raise ScriptError(
                        f"step {step.index} references unknown step {r}"
                    )
                refs.append(produced[r])
            if step.rule in DERIVED_NAMES:
                expansion = expand_derived(kernel, step.rule, refs, step.param)
                thm = expansion.theorem
                report.primitive_steps += len(expansion.steps)
            else:
                thm = _apply_scripted(kernel, step, refs)
                if step.rule != "hyp":
                    report.primitive_steps += 1
            if thm.sequent != step.claimed:
                raise ScriptError(
                    "claimed sequent differs from the derived one"
                )
            produced[step.index] = thm
            report.verdicts.append(StepVerdict(step.index, step.rule, True))
        except Exception as e:
            report.verdicts.append(
                StepVerdict(step.index, step.rule, False, str(e))
            )
            return report
    if script.steps:
        report.theorem = produced[script.steps[-1].index]
    return report


def _singleton_diff(
    bigger: frozenset[Match], smaller: frozenset[Match], what: str
) -> Match:
    diff = bigger - smaller
    if len(diff) != 1:
        raise ScriptError(f"cannot identify {what} (context difference not a "
                          f"single match)")
    return next(iter(diff))


def _apply_scripted(kernel: Kernel, step: ProofStep, refs: list[Theorem]) -> Theorem:
    """Assemble explicit kernel parameters from the claimed sequent and the
    referenced premises, then apply the primitive rule."""
    rule = step.rule
    claimed = step.claimed
    succ = claimed.succedent

    if rule == "hyp":
        return kernel.hypothesis(claimed)
    if rule == "ax":
        if succ not in claimed.antecedent:
            raise ScriptError("(ax) succedent must occur in the antecedent")
        return kernel.ax(claimed.antecedent - {succ}, succ)
    if rule == "tm":
        return kernel.tm(claimed.antecedent, succ.lhs)
    if rule == "wr":
        (t,) = refs
        return kernel.wr(t, claimed.antecedent - t.antecedent)
    if rule == "cut":
        return kernel.cut(refs[0], refs[1])
    if rule == "efq":
        return kernel.efq(refs[0], refs[1], succ)
    if rule == "exh":
        t_bot, t_var = refs
        m_bot = _singleton_diff(t_bot.antecedent, claimed.antecedent,
                                "the improper case")
        m_var = _singleton_diff(t_var.antecedent, claimed.antecedent,
                                "the proper case")
        if m_bot.rhs is not None or not isinstance(m_var.rhs, Variable):
            raise ScriptError("(exh) malformed case matches")
        return kernel.exh(t_bot, t_var, m_bot.lhs, m_bot.type, m_var.rhs)
    if rule == "lambda-inst":
        (t,) = refs
        discharged = _singleton_diff(t.antecedent, claimed.antecedent,
                                     "the discharged match")
        if not isinstance(discharged.rhs, Variable):
            raise ScriptError("(lambda-inst) discharged label is not a variable")
        return kernel.lambda_inst(t, discharged.lhs, discharged.rhs)
    if rule == "beta-con":
        return kernel.beta_con(refs[0])
    if rule == "beta-exp":
        if not (isinstance(succ.lhs, Application)
                and isinstance(succ.lhs.operator, Abstraction)):
            raise ScriptError("(beta-exp) claim is not an applied abstraction")
        return kernel.beta_exp(
            refs[0], refs[1:], succ.lhs.operator, succ.lhs.operands
        )
    if rule == "a-sub-i":
        return kernel.a_sub_i(refs[0], refs[1:])
    if rule == "a-sub-ii":
        return kernel.a_sub_ii(refs[0], refs[1:])
    if rule == "a-inst":
        t_main, t_inner = refs
        if not isinstance(t_main.succedent.lhs, Application):
            raise ScriptError("(a-inst) first premise is not an application")
        op = t_main.succedent.lhs.operator
        operands = t_main.succedent.lhs.operands
        extra = t_inner.antecedent - t_main.antecedent
        fvar = None
        opvars = []
        for m in extra:
            if syntactic_equal(m.lhs, op) and isinstance(m.rhs, Variable):
                fvar = m.rhs
                break
        for operand in operands:
            ov = None
            for m in extra:
                if syntactic_equal(m.lhs, operand) and isinstance(m.rhs, Variable):
                    ov = m.rhs
                    break
            if ov is None:
                raise ScriptError("(a-inst) missing operand match")
            opvars.append(ov)
        if fvar is None:
            raise ScriptError("(a-inst) missing operator match")
        return kernel.a_inst(t_main, t_inner, fvar, opvars)
    if rule == "ext":
        fhat = succ.rhs
        ghat = succ.lhs
        t1, t2 = refs
        m_f = _singleton_diff(t1.antecedent, claimed.antecedent, "the f-match")
        if not isinstance(m_f.lhs, Application) or not isinstance(
            m_f.rhs, Variable
        ):
            raise ScriptError("(ext) malformed round-trip premise")
        xs = []
        for v in m_f.lhs.operands:
            if not isinstance(v, Variable):
                raise ScriptError("(ext) arguments must be variables")
            xs.append(v)
        return kernel.ext(t1, t2, fhat, ghat, xs, m_f.rhs)
    if rule == "a-imp-bot":
        if not kernel.config.allow_a_imp_bot:
            raise GatedRuleError(
                "(a-imp-bot) is disabled; enable it explicitly to experiment"
            )
        t1, t2 = refs
        if not isinstance(succ.lhs, Application):
            raise ScriptError("(a-imp-bot) claim is not an application")
        operands = succ.lhs.operands
        extra = t2.antecedent - t1.antecedent
        opvars = []
        for operand in operands:
            ov = None
            for m in extra:
                if syntactic_equal(m.lhs, operand) and isinstance(m.rhs, Variable):
                    ov = m.rhs
                    break
            if ov is None:
                raise ScriptError("(a-imp-bot) missing operand match")
            opvars.append(ov)
        return kernel.a_imp_bot(t1, t2, operands, opvars, succ.type)
    if rule == "not-i":
        args = _builtin_app(succ.lhs, "not")
        if args is None or succ.rhs is None:
            raise ScriptError("(not-i) claim is not a proper negation match")
        return kernel.not_i(refs[0], refs[1], args[0], succ.rhs)
    if rule == "ra":
        (t1, t2) = refs
        m_t = _singleton_diff(t1.antecedent, claimed.antecedent,
                              "the T assumption")
        return kernel.ra(t1, t2, m_t.lhs)
    if rule in ("not-inst", "imp-inst", "sigma-inst", "pi-inst", "eq-inst"):
        (t,) = refs
        discharged = _singleton_diff(t.antecedent, claimed.antecedent,
                                     "the discharged match")
        method = {
            "not-inst": kernel.not_inst,
            "imp-inst": kernel.imp_inst,
            "sigma-inst": kernel.sigma_inst,
            "pi-inst": kernel.pi_inst,
            "eq-inst": kernel.eq_inst,
        }[rule]
        return method(t, discharged)
    if rule == "imp-i":
        args = _builtin_app(succ.lhs, "imp")
        if args is None:
            raise ScriptError("(imp-i) claim is not a conditional match")
        return kernel.imp_i(refs[0], args[0], args[1])
    if rule == "imp-e":
        return kernel.imp_e(refs[0], refs[1])
    if rule == "sigma-i":
        return kernel.sigma_i(refs[0])
    if rule == "sigma-e":
        t1, t2 = refs
        discharged = _singleton_diff(t2.antecedent, claimed.antecedent,
                                     "the witness match")
        if not (isinstance(discharged.lhs, Application)
                and len(discharged.lhs.operands) == 1
                and isinstance(discharged.lhs.operands[0], Variable)):
            raise ScriptError("(sigma-e) malformed witness match")
        return kernel.sigma_e(t1, t2, discharged.lhs.operands[0])
    if rule == "pi-i":
        (t,) = refs
        m1 = t.succedent
        if not (isinstance(m1.lhs, Application)
                and len(m1.lhs.operands) == 1
                and isinstance(m1.lhs.operands[0], Variable)):
            raise ScriptError("(pi-i) premise is not a variable membership")
        return kernel.pi_i(t, m1.lhs.operands[0])
    if rule == "pi-e":
        if not (isinstance(succ.lhs, Application)
                and len(succ.lhs.operands) == 1):
            raise ScriptError("(pi-e) claim is not a class application")
        return kernel.pi_e(refs[0], succ.lhs.operands[0])
    if rule == "eq-i":
        return kernel.eq_i(refs[0])
    if rule == "eq-e":
        return kernel.eq_e(refs[0])
    if rule == "iota-i":
        t1, t2 = refs
        discharged = _singleton_diff(t2.antecedent, claimed.antecedent,
                                     "the uniqueness assumption")
        if not (isinstance(discharged.lhs, Application)
                and len(discharged.lhs.operands) == 1
                and isinstance(discharged.lhs.operands[0], Variable)):
            raise ScriptError("(iota-i) malformed uniqueness assumption")
        return kernel.iota_i(t1, t2, discharged.lhs.operands[0])
    if rule == "iota-e":
        return kernel.iota_e(refs[0])
    if rule == "iota-inst":
        t1, t2 = refs
        discharged = _singleton_diff(t1.antecedent, claimed.antecedent,
                                     "the description assumption")
        if not isinstance(discharged.rhs, Variable):
            raise ScriptError("(iota-inst) malformed description assumption")
        if not isinstance(t2.succedent.rhs, Variable):
            raise ScriptError("(iota-inst) malformed properness premise")
        return kernel.iota_inst(t1, t2, discharged.rhs, t2.succedent.rhs)
    raise ScriptError(f"unknown rule {rule}")
