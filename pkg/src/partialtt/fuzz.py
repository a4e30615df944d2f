"""Soundness fuzzing: every rule, random instances, semantic oracle.

Each trial generates a random well-typed instance of one rule schema (the
kernel must accept it) together with a random finite model within the
configured bounds; whenever all premise sequents are valid in the model,
the conclusion must be valid too.  Trials are seeded per (seed, rule,
trial), so any violation is reproducible from the report alone.

Premise antecedents are biased to contain some premise succedents, which
makes a useful share of the trials non-vacuous.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .derived import DerivedRuleId, expand_derived
from .judgments import Match, Sequent
from .kernel import Kernel, KernelError, RuleId, T_ACQ, F_ACQ, Theorem
from .semantics import (
    EngineError,
    Model,
    random_value,
    sequent_valid,
)
from .signature import Signature, builtin_name
from .terms import (
    Abstraction,
    Acquisition,
    Application,
    Construction,
    Variable,
    free_variables,
    fresh_name,
    substitute,
)
from .typecheck import TypingContext, infer_type
from .types import FunctionType, I, O, Type, W

FUZZ_THEORY = """
const c1 : i
const c2 : i
const P : (i)->o
const Q : (i)->o
const g : (i)->i
const R : (i,i)->o
const O1 : (w)->i
const O2 : (w)->i
"""

CLS = FunctionType((I,), O)

_VAR_POOL = {
    O: (Variable("s", O), Variable("s2", O)),
    I: (Variable("u", I), Variable("u2", I)),
    W: (Variable("vw", W),),
    CLS: (Variable("k", CLS),),
}


@dataclass
class FuzzConfig:
    seed: int = 0
    trials: int = 200
    max_i: int = 3
    max_w: int = 2
    cap: int = 10**5


@dataclass
class Violation:
    rule: str
    trial: int
    premises: list[str]
    conclusion: str
    model: str
    witness: str


@dataclass
class FuzzReport:
    rule: str
    trials: int
    checked: int = 0  # trials with all premises valid
    violations: list[Violation] = field(default_factory=list)
    skipped: int = 0  # engine limits hit (cap, order)

    @property
    def ok(self) -> bool:
        return not self.violations


def fuzz_signature() -> Signature:
    from .syntax import parse_theory

    return parse_theory(FUZZ_THEORY)


class InstanceGen:
    """Random well-typed constructions, matches and contexts."""

    def __init__(self, rng: random.Random, kernel: Kernel):
        self.rng = rng
        self.kernel = kernel
        self.ctx = kernel.ctx
        self._binder_counter = 0

    # -- constructions ------------------------------------------------------

    def construction(self, t: Type, depth: int = 2, env: tuple[Variable, ...] = ()) -> Construction:
        rng = self.rng
        leaves: list[Callable[[], Construction]] = []
        compounds: list[Callable[[], Construction]] = []
        local = tuple(v for v in env if v.type == t) + _VAR_POOL.get(t, ())
        if local:
            leaves.append(lambda: rng.choice(local))
        if t == O:
            leaves.append(lambda: rng.choice((T_ACQ, F_ACQ)))
            compounds += [
                lambda: Application(
                    Acquisition("not"), (self.construction(O, depth - 1, env),)
                ),
                lambda: Application(
                    Acquisition("imp"),
                    (
                        self.construction(O, depth - 1, env),
                        self.construction(O, depth - 1, env),
                    ),
                ),
                lambda: Application(
                    Acquisition("eq<i>"),
                    (
                        self.construction(I, depth - 1, env),
                        self.construction(I, depth - 1, env),
                    ),
                ),
                lambda: Application(
                    Acquisition("P"), (self.construction(I, depth - 1, env),)
                ),
                lambda: Application(
                    Acquisition("R"),
                    (
                        self.construction(I, depth - 1, env),
                        self.construction(I, depth - 1, env),
                    ),
                ),
                lambda: Application(
                    Acquisition(builtin_name("some", I)),
                    (self.construction(CLS, depth - 1, env),),
                ),
                lambda: Application(
                    Acquisition(builtin_name("all", I)),
                    (self.construction(CLS, depth - 1, env),),
                ),
                lambda: Application(
                    self.construction(CLS, depth - 1, env),
                    (self.construction(I, depth - 1, env),),
                ),
            ]
        elif t == I:
            leaves.append(
                lambda: Acquisition(rng.choice(("c1", "c2")))
            )
            compounds += [
                lambda: Application(
                    Acquisition("g"), (self.construction(I, depth - 1, env),)
                ),
                lambda: Application(
                    Acquisition(builtin_name("the", I)),
                    (self.construction(CLS, depth - 1, env),),
                ),
                lambda: Application(
                    Acquisition(rng.choice(("O1", "O2"))),
                    (self.construction(W, depth - 1, env),),
                ),
            ]
        elif t == W:
            leaves.append(lambda: _VAR_POOL[W][0])
        elif t == CLS:
            leaves.append(lambda: Acquisition(rng.choice(("P", "Q"))))
            compounds.append(lambda: self.abstraction(t, depth, env))
        elif isinstance(t, FunctionType):
            compounds.append(lambda: self.abstraction(t, depth, env))
        if depth <= 0 or not compounds or rng.random() < 0.35:
            if leaves:
                return rng.choice(leaves)()
        if not compounds:
            return rng.choice(leaves)()
        return rng.choice(compounds)()

    def abstraction(self, t: FunctionType, depth: int, env) -> Abstraction:
        binders = []
        for pt in t.params:
            self._binder_counter += 1
            binders.append(Variable(f"bx{self._binder_counter}", pt))
        body = self.construction(t.result, depth - 1, tuple(env) + tuple(binders))
        return Abstraction(tuple(binders), body)

    def simple(self, t: Type) -> Construction:
        """A random simple proper construction of type t."""
        choices: list[Construction] = list(_VAR_POOL.get(t, ()))
        if t == O:
            choices += [T_ACQ, F_ACQ]
        elif t == I:
            choices += [Acquisition("c1"), Acquisition("c2")]
        elif t == CLS:
            choices += [Acquisition("P"), Acquisition("Q")]
        return self.rng.choice(choices)

    def match(self, avoid: Sequence[Variable] = ()) -> Match:
        t = self.rng.choice((O, O, I))
        lhs = self.construction(t, 2)
        while any(v in free_variables(lhs) for v in avoid):
            lhs = self.construction(t, 2)
        if self.rng.random() < 0.25:
            return Match(lhs, t, None)
        rhs = self.simple(t)
        while any(v in free_variables(rhs) for v in avoid):
            rhs = self.simple(t)
        return Match(lhs, t, rhs)

    def gamma(self, avoid: Sequence[Variable] = (), extra: Sequence[Match] = ()) -> frozenset[Match]:
        matches = [self.match(avoid) for _ in range(self.rng.randrange(3))]
        for m in extra:
            if self.rng.random() < 0.6 and not any(
                v in (free_variables(m.lhs) | (free_variables(m.rhs) if m.rhs is not None else frozenset()))
                for v in avoid
            ):
                matches.append(m)
        return frozenset(matches)

    def fresh_var(self, base: str, t: Type, *stuff) -> Variable:
        taken = set(self.ctx.variable_types)
        for item in stuff:
            if isinstance(item, Match):
                taken |= {v.name for v in free_variables(item.lhs)}
                if item.rhs is not None:
                    taken |= {v.name for v in free_variables(item.rhs)}
            elif isinstance(item, frozenset):
                for m in item:
                    taken |= {v.name for v in free_variables(m.lhs)}
                    if m.rhs is not None:
                        taken |= {v.name for v in free_variables(m.rhs)}
            elif item is not None:
                taken |= {v.name for v in free_variables(item)}
        taken |= {v.name for pool in _VAR_POOL.values() for v in pool}
        return Variable(fresh_name(base, taken), t)


def random_model(rng: random.Random, sig: Signature, cfg: FuzzConfig) -> Model:
    ni = rng.randrange(1, cfg.max_i + 1)
    nw = rng.randrange(1, cfg.max_w + 1)
    model = Model(
        sig,
        {"i": ("a", "b", "c")[:ni], "w": ("w1", "w2")[:nw]},
        {},
        cfg.cap,
    )
    for name in sorted(sig.constants):
        model.interpretation[name] = random_value(
            rng, sig.constants[name], model
        )
    return model


@dataclass
class Instance:
    premises: list[Theorem]
    conclusion: Theorem


class _Regen(Exception):
    """Instance generation failed a side condition; try again."""


def _build_instance(rule: str, gen: InstanceGen) -> Instance:
    kernel = gen.kernel
    rng = gen.rng
    hyp = kernel.hypothesis

    def seq(gamma, m) -> Theorem:
        return hyp(Sequent(frozenset(gamma), m))

    if rule == "ax":
        m = gen.match()
        return Instance([], kernel.ax(gen.gamma(), m))
    if rule == "wr":
        t = seq(gen.gamma(), gen.match())
        delta = [gen.match() for _ in range(rng.randrange(1, 3))]
        return Instance([t], kernel.wr(t, delta))
    if rule == "cut":
        m1, m2 = gen.match(), gen.match()
        gamma = gen.gamma(extra=[m1])
        t1 = seq(gamma, m1)
        t2 = seq(gamma | {m1}, m2)
        return Instance([t1, t2], kernel.cut(t1, t2))
    if rule == "efq":
        m1, m2 = _incompatible_pair(gen)
        gamma = gen.gamma(extra=[m1, m2])
        t1, t2 = seq(gamma, m1), seq(gamma, m2)
        return Instance([t1, t2], kernel.efq(t1, t2, gen.match()))
    if rule == "exh":
        t = rng.choice((O, I))
        subject = gen.construction(t, 2)
        m = gen.match()
        x = gen.fresh_var("x", t, m, subject)
        gamma = gen.gamma(avoid=[x], extra=[m])
        t_bot = seq(gamma | {Match(subject, t, None)}, m)
        t_var = seq(gamma | {Match(subject, t, x)}, m)
        return Instance(
            [t_bot, t_var], kernel.exh(t_bot, t_var, subject, t, x)
        )
    if rule == "tm":
        return Instance([], kernel.tm(gen.gamma(), gen.simple(rng.choice((O, I)))))
    if rule == "lambda-inst":
        lam = gen.abstraction(CLS, 2, ())
        f = gen.fresh_var("f", CLS, lam)
        m = gen.match(avoid=[f])
        gamma = gen.gamma(avoid=[f], extra=[m])
        t = seq(gamma | {Match(lam, CLS, f)}, m)
        return Instance([t], kernel.lambda_inst(t, lam, f))
    if rule == "beta-con":
        lam = gen.abstraction(CLS, 2, ())
        x_arg = gen.construction(I, 1)
        rhs = gen.simple(O)
        m = Match(Application(lam, (x_arg,)), O, rhs)
        gamma = gen.gamma()
        t = seq(gamma, m)
        return Instance([t], kernel.beta_con(t))
    if rule == "beta-exp":
        lam = gen.abstraction(CLS, 2, ())
        x_arg = gen.construction(I, 1)
        rhs = gen.simple(O)
        reduced = substitute(lam.body, [(lam.binders[0], x_arg)])
        m_main = Match(reduced, O, rhs)
        m_prop = Match(x_arg, I, gen.simple(I))
        gamma = gen.gamma(extra=[m_main, m_prop])
        t_main = seq(gamma, m_main)
        t_prop = seq(gamma, m_prop)
        return Instance(
            [t_main, t_prop], kernel.beta_exp(t_main, [t_prop], lam, [x_arg])
        )
    if rule in ("a-sub-i", "a-sub-ii"):
        f_c = gen.construction(CLS, 1)
        arg = gen.construction(I, 1) if rule == "a-sub-i" else gen.simple(I)
        rhs = gen.simple(O)
        m_main = Match(Application(f_c, (arg,)), O, rhs)
        if rule == "a-sub-i":
            m_op = Match(arg, I, gen.simple(I))
        else:
            m_op = Match(gen.construction(I, 1), I, arg)
        gamma = gen.gamma(extra=[m_main, m_op])
        t_main, t_op = seq(gamma, m_main), seq(gamma, m_op)
        method = kernel.a_sub_i if rule == "a-sub-i" else kernel.a_sub_ii
        return Instance([t_main, t_op], method(t_main, [t_op]))
    if rule == "a-inst":
        f_c = gen.construction(CLS, 1)
        arg = gen.construction(I, 1)
        m_main = Match(Application(f_c, (arg,)), O, gen.simple(O))
        f = gen.fresh_var("f", CLS, f_c, arg)
        z = gen.fresh_var("z", I, f_c, arg, f)
        m = gen.match(avoid=[f, z])
        gamma = gen.gamma(avoid=[f, z], extra=[m_main, m])
        t_main = seq(gamma, m_main)
        t_inner = seq(gamma | {Match(f_c, CLS, f), Match(arg, I, z)}, m)
        return Instance([t_main, t_inner], kernel.a_inst(t_main, t_inner, f, [z]))
    if rule == "ext":
        fhat = gen.simple(CLS)
        ghat = fhat if rng.random() < 0.4 else gen.simple(CLS)
        x = gen.fresh_var("x", I, fhat, ghat)
        y = gen.fresh_var("y", O, fhat, ghat, x)
        m_f = Match(Application(fhat, (x,)), O, y)
        m_g = Match(Application(ghat, (x,)), O, y)
        gamma = gen.gamma(avoid=[x, y])
        t1 = seq(gamma | {m_f}, m_g)
        t2 = seq(gamma | {m_g}, m_f)
        return Instance([t1, t2], kernel.ext(t1, t2, fhat, ghat, [x], y))
    if rule == "not-i":
        o_hat = gen.simple(O)
        o_prime = gen.simple(O)
        a = Match(o_hat, O, o_prime)
        m1, m2 = _incompatible_pair(gen)
        gamma = gen.gamma(extra=[m1, m2])
        t1 = seq(gamma | {a}, m1)
        t2 = seq(gamma | {a}, m2)
        return Instance([t1, t2], kernel.not_i(t1, t2, o_hat, o_prime))
    if rule == "ra":
        o_hat = gen.simple(O)
        m = gen.match()
        gamma = gen.gamma(extra=[m])
        t1 = seq(gamma | {Match(o_hat, O, T_ACQ)}, m)
        t2 = seq(gamma | {Match(o_hat, O, F_ACQ)}, m)
        return Instance([t1, t2], kernel.ra(t1, t2, o_hat))
    if rule in ("not-inst", "imp-inst", "sigma-inst", "pi-inst", "eq-inst"):
        if rule == "not-inst":
            lhs = Application(Acquisition("not"), (gen.simple(O),))
        elif rule == "imp-inst":
            lhs = Application(
                Acquisition("imp"), (gen.simple(O), gen.simple(O))
            )
        elif rule == "eq-inst":
            lhs = Application(
                Acquisition("eq<i>"), (gen.simple(I), gen.simple(I))
            )
        else:
            head = "some" if rule == "sigma-inst" else "all"
            cls = (
                gen.abstraction(CLS, 2, ())
                if rng.random() < 0.5
                else gen.simple(CLS)
            )
            lhs = Application(Acquisition(builtin_name(head, I)), (cls,))
        v = gen.fresh_var("v", O, lhs)
        discharged = Match(lhs, O, v)
        m = gen.match(avoid=[v])
        gamma = gen.gamma(avoid=[v], extra=[m])
        t = seq(gamma | {discharged}, m)
        method = {
            "not-inst": kernel.not_inst,
            "imp-inst": kernel.imp_inst,
            "sigma-inst": kernel.sigma_inst,
            "pi-inst": kernel.pi_inst,
            "eq-inst": kernel.eq_inst,
        }[rule]
        return Instance([t], method(t, discharged))
    if rule == "imp-i":
        o_hat, o_prime = gen.simple(O), gen.simple(O)
        m2 = Match(o_prime, O, T_ACQ)
        gamma = gen.gamma(extra=[m2])
        t = seq(gamma | {Match(o_hat, O, T_ACQ)}, m2)
        return Instance([t], kernel.imp_i(t, o_hat, o_prime))
    if rule == "imp-e":
        a = gen.construction(O, 2)
        b = gen.construction(O, 2)
        m1 = Match(Application(Acquisition("imp"), (a, b)), O, T_ACQ)
        m2 = Match(a, O, T_ACQ)
        gamma = gen.gamma(extra=[m1, m2])
        t1, t2 = seq(gamma, m1), seq(gamma, m2)
        return Instance([t1, t2], kernel.imp_e(t1, t2))
    if rule == "sigma-i":
        cls = gen.construction(CLS, 2)
        arg = gen.construction(I, 1)
        m = Match(Application(cls, (arg,)), O, T_ACQ)
        gamma = gen.gamma(extra=[m])
        t = seq(gamma, m)
        return Instance([t], kernel.sigma_i(t))
    if rule == "sigma-e":
        cls = gen.construction(CLS, 2)
        m1 = Match(
            Application(Acquisition(builtin_name("some", I)), (cls,)), O, T_ACQ
        )
        x = gen.fresh_var("x", I, cls)
        m = gen.match(avoid=[x])
        gamma = gen.gamma(avoid=[x], extra=[m1, m])
        t1 = seq(gamma, m1)
        t2 = seq(gamma | {Match(Application(cls, (x,)), O, T_ACQ)}, m)
        return Instance([t1, t2], kernel.sigma_e(t1, t2, x))
    if rule == "pi-i":
        cls = gen.construction(CLS, 2)
        x = gen.fresh_var("x", I, cls)
        gamma = gen.gamma(avoid=[x])
        t = seq(gamma, Match(Application(cls, (x,)), O, T_ACQ))
        return Instance([t], kernel.pi_i(t, x))
    if rule == "pi-e":
        cls = gen.construction(CLS, 2)
        m1 = Match(
            Application(Acquisition(builtin_name("all", I)), (cls,)), O, T_ACQ
        )
        gamma = gen.gamma(extra=[m1])
        t = seq(gamma, m1)
        return Instance([t], kernel.pi_e(t, gen.simple(I)))
    if rule == "eq-i":
        t_ty = rng.choice((O, I))
        m = Match(gen.construction(t_ty, 2), t_ty, gen.simple(t_ty))
        gamma = gen.gamma(extra=[m])
        t = seq(gamma, m)
        return Instance([t], kernel.eq_i(t))
    if rule == "eq-e":
        t_ty = rng.choice((O, I))
        x = gen.construction(t_ty, 2)
        label = gen.simple(t_ty)
        m = Match(
            Application(Acquisition(builtin_name("eq", t_ty)), (x, label)),
            O,
            T_ACQ,
        )
        gamma = gen.gamma(extra=[m])
        t = seq(gamma, m)
        return Instance([t], kernel.eq_e(t))
    if rule == "iota-i":
        cls = gen.construction(CLS, 2)
        x_hat = gen.simple(I)
        y = gen.fresh_var("y", I, cls, x_hat)
        m1 = Match(Application(cls, (x_hat,)), O, T_ACQ)
        gamma = gen.gamma(avoid=[y], extra=[m1])
        t1 = seq(gamma, m1)
        t2 = seq(
            gamma | {Match(Application(cls, (y,)), O, T_ACQ)},
            Match(y, I, x_hat),
        )
        return Instance([t1, t2], kernel.iota_i(t1, t2, y))
    if rule == "iota-e":
        cls = gen.construction(CLS, 2)
        m = Match(
            Application(Acquisition(builtin_name("the", I)), (cls,)),
            I,
            gen.simple(I),
        )
        gamma = gen.gamma(extra=[m])
        t = seq(gamma, m)
        return Instance([t], kernel.iota_e(t))
    if rule == "iota-inst":
        cls = gen.construction(CLS, 2)
        x = gen.fresh_var("x", I, cls)
        vo = gen.fresh_var("vo", O, cls, x)
        m = gen.match(avoid=[x, vo])
        gamma = gen.gamma(avoid=[x, vo], extra=[m])
        the = Application(Acquisition(builtin_name("the", I)), (cls,))
        t1 = seq(gamma | {Match(the, I, x)}, m)
        t2 = seq(gamma, Match(Application(cls, (x,)), O, vo))
        return Instance([t1, t2], kernel.iota_inst(t1, t2, x, vo))
    raise KernelError(f"no fuzz builder for rule {rule}")


def _incompatible_pair(gen: InstanceGen) -> tuple[Match, Match]:
    rng = gen.rng
    if rng.random() < 0.5:
        t = rng.choice((O, I))
        lhs = gen.construction(t, 2)
        return Match(lhs, t, gen.simple(t)), Match(lhs, t, None)
    lhs = gen.construction(O, 2)
    return Match(lhs, O, T_ACQ), Match(lhs, O, F_ACQ)


def _build_derived_instance(rule: str, gen: InstanceGen):
    """Premises and parameter for a derived rule; conclusion via expansion."""
    kernel = gen.kernel
    rng = gen.rng
    hyp = kernel.hypothesis

    def seq(gamma, m) -> Theorem:
        return hyp(Sequent(frozenset(gamma), m))

    if rule == "spr1":
        f_c = gen.construction(CLS, 1)
        d = gen.construction(I, 1)
        m = Match(Application(f_c, (d,)), O, gen.simple(O))
        gamma = gen.gamma(extra=[m])
        return [seq(gamma, m)], None
    if rule == "spr2":
        d = gen.construction(I, 1)
        x = gen.fresh_var("x", I, d)
        existence = Application(
            Acquisition(builtin_name("some", I)),
            (
                Abstraction(
                    (x,), Application(Acquisition("eq<i>"), (d, x))
                ),
            ),
        )
        m = Match(Application(Acquisition("not"), (existence,)), O, T_ACQ)
        gamma = frozenset(
            g for g in gen.gamma(extra=[m]) if g != Match(d, I, None)
        )
        return [seq(gamma, m)], gen.construction(CLS, 1)
    if rule == "spr3":
        f_c = gen.construction(CLS, 1)
        d = gen.construction(I, 1)
        m1 = Match(Application(f_c, (d,)), O, None)
        y = gen.fresh_var("y", I, f_c, d)
        q = gen.fresh_var("q", O, f_c, d, y)
        m2 = Match(Application(f_c, (y,)), O, q)
        gamma = frozenset(
            g
            for g in gen.gamma(avoid=[y, q], extra=[m1])
            if g != Match(d, I, None)
        )
        return [seq(gamma, m1), seq(gamma, m2)], None
    if rule == "l-not-iii":
        o_hat = gen.simple(O)
        m = Match(Application(Acquisition("not"), (o_hat,)), O, T_ACQ)
        gamma = frozenset(
            g
            for g in gen.gamma(extra=[m])
            if g not in (Match(o_hat, O, T_ACQ), Match(o_hat, O, F_ACQ))
        )
        return [seq(gamma, m)], None
    if rule == "l-app-bot":
        arg1 = gen.construction(I, 1)
        if rng.random() < 0.5:
            app = Application(Acquisition("R"), (arg1, gen.construction(I, 1)))
        else:
            app = Application(Acquisition("g"), (arg1,))
        m = Match(arg1, I, None)
        gamma = frozenset(
            g
            for g in gen.gamma(extra=[m])
            if g != Match(app, infer_type(app, gen.ctx).type, None)
        )
        return [seq(gamma, m)], app
    if rule == "eg":
        x = Variable("egx", I)
        body = rng.choice(
            (
                Application(Acquisition("P"), (x,)),
                Application(Acquisition("eq<i>"), (x, gen.construction(I, 1, (x,)))),
                Application(Acquisition("R"), (x, x)),
            )
        )
        target = gen.simple(I)
        premise_lhs = substitute(body, [(x, target)])
        m = Match(premise_lhs, O, T_ACQ)
        gamma = gen.gamma(extra=[m])
        return [seq(gamma, m)], Abstraction((x,), body)
    if rule == "si2":
        d_var = Variable("sid", I)
        body = rng.choice(
            (
                Application(Acquisition("P"), (d_var,)),
                Application(Acquisition("R"), (d_var, gen.construction(I, 1))),
            )
        )
        d = gen.construction(I, 1)
        d_prime = gen.simple(I)
        m1 = Match(substitute(body, [(d_var, d)]), O, T_ACQ)
        m2 = Match(
            Application(Acquisition("eq<i>"), (d, d_prime)), O, T_ACQ
        )
        gamma = gen.gamma(extra=[m1, m2])
        return [seq(gamma, m1), seq(gamma, m2)], Abstraction((d_var,), body)
    raise KernelError(f"no derived fuzz builder for {rule}")


def fuzz_rule(
    rule: str,
    cfg: FuzzConfig,
    *,
    derived: bool = False,
    kernel: Optional[Kernel] = None,
) -> FuzzReport:
    """Run seeded soundness trials for one rule; 0 violations expected."""
    from .syntax import print_model, print_sequent

    if rule == RuleId.A_IMP_BOT.value and not derived:
        raise KernelError("(a-imp-bot) is gated and excluded from fuzzing")
    kernel = kernel or Kernel(fuzz_signature())
    report = FuzzReport(rule, cfg.trials)
    for trial in range(cfg.trials):
        rng = random.Random(f"{cfg.seed}:{rule}:{trial}")
        gen = InstanceGen(rng, kernel)
        try:
            if derived:
                premises, param = _build_derived_instance(rule, gen)
                conclusion = expand_derived(kernel, rule, premises, param).theorem
                instance = Instance(list(premises), conclusion)
            else:
                instance = _build_instance(rule, gen)
        except KernelError:
            report.skipped += 1
            continue
        model = random_model(rng, kernel.signature, cfg)
        try:
            premise_results = [
                sequent_valid(p.sequent, model) for p in instance.premises
            ]
            if not all(r.valid for r in premise_results):
                continue
            conclusion_result = sequent_valid(instance.conclusion.sequent, model)
        except EngineError:
            report.skipped += 1
            continue
        report.checked += 1
        if not conclusion_result.valid:
            witness = ", ".join(
                f"{v.name}={_short_value(val)}"
                for v, val in sorted(
                    conclusion_result.witness.items(), key=lambda kv: kv[0].name
                )
            )
            report.violations.append(
                Violation(
                    rule,
                    trial,
                    [print_sequent(p.sequent) for p in instance.premises],
                    print_sequent(instance.conclusion.sequent),
                    print_model(model),
                    witness,
                )
            )
    return report


def _short_value(v) -> str:
    from .syntax import print_value

    return print_value(v)


UNGATED_RULES = tuple(
    r.value for r in RuleId if r is not RuleId.A_IMP_BOT
)

SEMANTIC_DERIVED_RULES = (
    "spr1",
    "spr2",
    "spr3",
    "eg",
    "si2",
    "l-not-iii",
    "l-app-bot",
)
