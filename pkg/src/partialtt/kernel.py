"""The trusted proof core.

Theorems exist only as outputs of the rule methods below (or as explicitly
admitted hypotheses, which carry their own provenance tag).  Every rule
validates its premise shapes, its side conditions (patent incompatibility,
variable freshness) and the well-typedness of any newly built match before
stamping a Theorem.  Rule parameters are always explicit arguments, never
inferred, so provenance replays deterministically.

Rule inventory
  structural   ax wr cut efq exh
  form         tm lambda-inst beta-con beta-exp a-sub-i a-sub-ii a-inst
               ext a-imp-bot (configuration-gated)
  operational  not-i ra not-inst imp-i imp-e imp-inst sigma-i sigma-e
               sigma-inst pi-i pi-e pi-inst eq-i eq-e eq-inst iota-i
               iota-e iota-inst
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .judgments import (
    Match,
    MatchFormError,
    Sequent,
    check_match,
    is_simple_proper,
    match_free_variables,
)
from .signature import FALSITY, TRUTH, Signature, builtin_name, parse_builtin
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
from .typecheck import TypecheckError, TypingContext, infer_type
from .types import FunctionType, O, Type, subsumes, type_text

T_ACQ = Acquisition(TRUTH)
F_ACQ = Acquisition(FALSITY)


class KernelError(Exception):
    """Base class for rejected rule applications."""


class RuleShapeError(KernelError):
    pass


class FreshnessError(KernelError):
    pass


class IncompatibilityError(KernelError):
    pass


class GatedRuleError(KernelError):
    pass


class RuleId(Enum):
    AX = "ax"
    WR = "wr"
    CUT = "cut"
    EFQ = "efq"
    EXH = "exh"
    TM = "tm"
    LAMBDA_INST = "lambda-inst"
    BETA_CON = "beta-con"
    BETA_EXP = "beta-exp"
    A_SUB_I = "a-sub-i"
    A_SUB_II = "a-sub-ii"
    A_INST = "a-inst"
    EXT = "ext"
    A_IMP_BOT = "a-imp-bot"
    NOT_I = "not-i"
    RA = "ra"
    NOT_INST = "not-inst"
    IMP_I = "imp-i"
    IMP_E = "imp-e"
    IMP_INST = "imp-inst"
    SIGMA_I = "sigma-i"
    SIGMA_E = "sigma-e"
    SIGMA_INST = "sigma-inst"
    PI_I = "pi-i"
    PI_E = "pi-e"
    PI_INST = "pi-inst"
    EQ_I = "eq-i"
    EQ_E = "eq-e"
    EQ_INST = "eq-inst"
    IOTA_I = "iota-i"
    IOTA_E = "iota-e"
    IOTA_INST = "iota-inst"


STRUCTURAL_RULES = frozenset(
    {RuleId.AX, RuleId.WR, RuleId.CUT, RuleId.EFQ, RuleId.EXH}
)
FORM_RULES = frozenset(
    {
        RuleId.TM,
        RuleId.LAMBDA_INST,
        RuleId.BETA_CON,
        RuleId.BETA_EXP,
        RuleId.A_SUB_I,
        RuleId.A_SUB_II,
        RuleId.A_INST,
        RuleId.EXT,
        RuleId.A_IMP_BOT,
    }
)
OPERATIONAL_RULES = frozenset(RuleId) - STRUCTURAL_RULES - FORM_RULES

HYPOTHESIS = "hyp"

_KERNEL_TOKEN = object()


class Theorem:
    """A sequent stamped by the kernel, with replayable provenance."""

    __slots__ = ("sequent", "rule", "premises", "params")

    def __init__(self, sequent, rule, premises, params, *, _token=None):
        if _token is not _KERNEL_TOKEN:
            raise KernelError("theorems can only be built by kernel rules")
        object.__setattr__(self, "sequent", sequent)
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "premises", premises)
        object.__setattr__(self, "params", params)

    def __setattr__(self, *_args):
        raise AttributeError("theorems are immutable")

    @property
    def antecedent(self) -> frozenset[Match]:
        return self.sequent.antecedent

    @property
    def succedent(self) -> Match:
        return self.sequent.succedent

    def __repr__(self) -> str:
        return f"Theorem[{self.rule}]({self.sequent})"


@dataclass
class KernelConfig:
    allow_a_imp_bot: bool = False


def patently_incompatible(m1: Match, m2: Match, sig: Signature) -> bool:
    """No assignment can satisfy both matches.

    Requires the same subject and type, and either one proper / one
    improper label, or proper labels that provably acquire distinct
    objects: T vs F, quotations of different constructions, or constants
    the theory declares distinct.
    """
    if not syntactic_equal(m1.lhs, m2.lhs) or m1.type != m2.type:
        return False
    if m1.improper != m2.improper:
        return True
    if m1.improper:
        return False
    r1, r2 = m1.rhs, m2.rhs
    if isinstance(r1, Acquisition) and isinstance(r2, Acquisition):
        if r1.is_quoted and r2.is_quoted:
            return not syntactic_equal(r1.target, r2.target)
        if not r1.is_quoted and not r2.is_quoted:
            return sig.declared_distinct(r1.target, r2.target)
    return False


def check_freshness(
    introduced: Sequence[Variable],
    scope: Sequence[tuple[str, object]],
) -> Optional[str]:
    """Validate the eigenvariable conditions of a rule instance.

    The introduced variables must be pairwise distinct and free in none of
    the scope items (match sets, matches, constructions).  Returns a
    violation report, or None when everything is fresh.
    """
    seen: dict[Variable, bool] = {}
    for v in introduced:
        if v in seen:
            return f"rule variable {v.name} is not pairwise distinct"
        seen[v] = True
    for label, item in scope:
        fv = _free_of(item)
        for v in introduced:
            if v in fv:
                return f"rule variable {v.name} occurs free in {label}"
    return None


def _free_of(item) -> frozenset[Variable]:
    if item is None:
        return frozenset()
    if isinstance(item, Match):
        return match_free_variables(item)
    if isinstance(item, (frozenset, set, tuple, list)):
        acc: frozenset[Variable] = frozenset()
        for x in item:
            acc |= _free_of(x)
        return acc
    return free_variables(item)


class Kernel:
    """Rule applications over a fixed signature."""

    def __init__(self, signature: Signature, config: KernelConfig | None = None):
        self.signature = signature
        self.config = config or KernelConfig()
        self.ctx = TypingContext.from_signature(signature)

    # -- plumbing ---------------------------------------------------------

    def _mk(self, seq: Sequent, rule: str, premises, params) -> Theorem:
        return Theorem(seq, rule, tuple(premises), tuple(params), _token=_KERNEL_TOKEN)

    def _valid_match(self, m: Match, rule: str) -> Match:
        try:
            check_match(m, self.ctx)
        except (MatchFormError, TypecheckError) as e:
            raise RuleShapeError(f"({rule}) ill-formed match: {e}") from e
        return m

    def _type_of(self, c: Construction, rule: str) -> Type:
        try:
            return infer_type(c, self.ctx).type
        except TypecheckError as e:
            raise RuleShapeError(f"({rule}) ill-typed construction: {e}") from e

    def _fresh(self, introduced, scope, rule: str) -> None:
        report = check_freshness(introduced, scope)
        if report is not None:
            raise FreshnessError(f"({rule}) {report}")

    def _same_context(self, rule: str, *theorems: Theorem) -> frozenset[Match]:
        gamma = theorems[0].antecedent
        for t in theorems[1:]:
            if t.antecedent != gamma:
                raise RuleShapeError(f"({rule}) premises have different contexts")
        return gamma

    def _discharge(self, t: Theorem, discharged: Match, rule: str) -> frozenset[Match]:
        if discharged not in t.antecedent:
            raise RuleShapeError(
                f"({rule}) the discharged match is not among the premise's "
                "antecedents"
            )
        return t.antecedent - {discharged}

    def hypothesis(self, seq: Sequent) -> Theorem:
        """Admit a sequent as a hypothesis (H in a derivation from H)."""
        for m in seq.antecedent:
            self._valid_match(m, HYPOTHESIS)
        self._valid_match(seq.succedent, HYPOTHESIS)
        return self._mk(seq, HYPOTHESIS, (), (seq,))

    # -- structural rules -------------------------------------------------

    def ax(self, gamma: Iterable[Match], m: Match) -> Theorem:
        """Conclude Γ, M ⟶ M from nothing."""
        gamma = frozenset(gamma)
        for g in gamma:
            self._valid_match(g, "ax")
        self._valid_match(m, "ax")
        return self._mk(Sequent(gamma | {m}, m), "ax", (), (gamma, m))

    def wr(self, t: Theorem, delta: Iterable[Match]) -> Theorem:
        """Weaken the antecedent by Δ."""
        delta = frozenset(delta)
        for d in delta:
            self._valid_match(d, "wr")
        return self._mk(
            Sequent(t.antecedent | delta, t.succedent), "wr", (t,), (delta,)
        )

    def cut(self, t1: Theorem, t2: Theorem) -> Theorem:
        """Delete t1's succedent from t2's antecedent."""
        m1 = t1.succedent
        if t2.antecedent != t1.antecedent | {m1}:
            raise RuleShapeError(
                "(cut) second premise must extend the first context by "
                "exactly the first succedent"
            )
        return self._mk(
            Sequent(t1.antecedent, t2.succedent), "cut", (t1, t2), ()
        )

    def efq(self, t1: Theorem, t2: Theorem, target: Match) -> Theorem:
        """From patently incompatible conclusions, conclude anything."""
        self._same_context("efq", t1, t2)
        if not patently_incompatible(t1.succedent, t2.succedent, self.signature):
            raise IncompatibilityError(
                "(efq) premise succedents are not patently incompatible"
            )
        self._valid_match(target, "efq")
        return self._mk(
            Sequent(t1.antecedent, target), "efq", (t1, t2), (target,)
        )

    def exh(
        self,
        t_bot: Theorem,
        t_var: Theorem,
        subject: Construction,
        stype: Type,
        var: Variable,
    ) -> Theorem:
        """Drop the exhaustive pair of assumptions 'subject is improper' /
        'subject matches a fresh variable'."""
        if var.type != stype:
            raise RuleShapeError("(exh) case variable must have the match type")
        m_bot = Match(subject, stype, None)
        m_var = Match(subject, stype, var)
        gamma = self._discharge(t_bot, m_bot, "exh")
        if self._discharge(t_var, m_var, "exh") != gamma:
            raise RuleShapeError("(exh) premise contexts disagree")
        if t_bot.succedent != t_var.succedent:
            raise RuleShapeError("(exh) premise succedents disagree")
        m = t_bot.succedent
        self._fresh(
            [var],
            [("the context", gamma), ("the succedent", m), ("the subject", subject)],
            "exh",
        )
        return self._mk(
            Sequent(gamma, m), "exh", (t_bot, t_var), (subject, stype, var)
        )

    # -- form rules -------------------------------------------------------

    def tm(self, gamma: Iterable[Match], simple: Construction) -> Theorem:
        """Trivial match: a variable or acquisition matches itself."""
        gamma = frozenset(gamma)
        for g in gamma:
            self._valid_match(g, "tm")
        if not is_simple_proper(simple, self.signature):
            raise RuleShapeError(
                "(tm) needs a variable or a (non-bot) acquisition"
            )
        t = self._type_of(simple, "tm")
        m = Match(simple, t, simple)
        return self._mk(Sequent(gamma, m), "tm", (), (gamma, simple))

    def lambda_inst(self, t: Theorem, lam: Construction, fvar: Variable) -> Theorem:
        """Discharge the assumption that an abstraction matches a fresh
        function variable (abstractions always construct something)."""
        if not isinstance(lam, Abstraction):
            raise RuleShapeError("(lambda-inst) subject must be an abstraction")
        phi = self._type_of(lam, "lambda-inst")
        if fvar.type != phi:
            raise RuleShapeError(
                "(lambda-inst) function variable must have the abstraction type"
            )
        discharged = Match(lam, phi, fvar)
        gamma = self._discharge(t, discharged, "lambda-inst")
        self._fresh(
            [fvar],
            [
                ("the context", gamma),
                ("the succedent", t.succedent),
                ("the abstraction", lam),
            ],
            "lambda-inst",
        )
        return self._mk(
            Sequent(gamma, t.succedent), "lambda-inst", (t,), (lam, fvar)
        )

    def _abstraction_redex(self, m: Match, rule: str):
        lhs = m.lhs
        if (
            m.rhs is None
            or not isinstance(lhs, Application)
            or not isinstance(lhs.operator, Abstraction)
        ):
            raise RuleShapeError(
                f"({rule}) needs a proper match on an applied abstraction"
            )
        lam = lhs.operator
        if len(lam.binders) != len(lhs.operands):
            raise RuleShapeError(f"({rule}) binder/operand arity mismatch")
        return lam, lhs.operands

    def beta_con(self, t: Theorem) -> Theorem:
        """Contract [λx⃗.Y](X⃗) to Y with X⃗ substituted for x⃗."""
        lam, operands = self._abstraction_redex(t.succedent, "beta-con")
        reduced = substitute(lam.body, list(zip(lam.binders, operands)))
        m = self._valid_match(
            Match(reduced, t.succedent.type, t.succedent.rhs), "beta-con"
        )
        return self._mk(Sequent(t.antecedent, m), "beta-con", (t,), ())

    def beta_exp(
        self,
        t_main: Theorem,
        t_props: Sequence[Theorem],
        lam: Abstraction,
        operands: Sequence[Construction],
    ) -> Theorem:
        """Expand Y[X⃗/x⃗] to [λx⃗.Y](X⃗), given a properness premise per
        substituted operand."""
        operands = tuple(operands)
        if not isinstance(lam, Abstraction) or len(lam.binders) != len(operands):
            raise RuleShapeError("(beta-exp) abstraction/operand arity mismatch")
        if len(t_props) != len(operands):
            raise RuleShapeError(
                "(beta-exp) needs one properness premise per operand"
            )
        gamma = self._same_context("beta-exp", t_main, *t_props)
        for i, (tp, operand) in enumerate(zip(t_props, operands)):
            m = tp.succedent
            if m.rhs is None or not syntactic_equal(m.lhs, operand):
                raise RuleShapeError(
                    f"(beta-exp) properness premise {i + 1} does not match "
                    "its operand"
                )
        if t_main.succedent.rhs is None:
            raise RuleShapeError("(beta-exp) needs a proper main premise")
        reduced = substitute(lam.body, list(zip(lam.binders, operands)))
        if not syntactic_equal(t_main.succedent.lhs, reduced):
            raise RuleShapeError(
                "(beta-exp) main premise is not the substituted body"
            )
        m = self._valid_match(
            Match(
                Application(lam, operands),
                t_main.succedent.type,
                t_main.succedent.rhs,
            ),
            "beta-exp",
        )
        return self._mk(
            Sequent(gamma, m),
            "beta-exp",
            (t_main, *t_props),
            (lam, operands),
        )

    def _application_match(self, m: Match, rule: str):
        if m.rhs is None or not isinstance(m.lhs, Application):
            raise RuleShapeError(f"({rule}) needs a proper match on an application")
        return m.lhs.operator, m.lhs.operands

    def a_sub_i(self, t_main: Theorem, t_ops: Sequence[Theorem]) -> Theorem:
        """Replace the operands of a proper application by their labels."""
        op, operands = self._application_match(t_main.succedent, "a-sub-i")
        if len(t_ops) != len(operands):
            raise RuleShapeError("(a-sub-i) needs one premise per operand")
        gamma = self._same_context("a-sub-i", t_main, *t_ops)
        labels = []
        for i, (tp, operand) in enumerate(zip(t_ops, operands)):
            m = tp.succedent
            if m.rhs is None or not syntactic_equal(m.lhs, operand):
                raise RuleShapeError(
                    f"(a-sub-i) operand premise {i + 1} does not match operand"
                )
            labels.append(m.rhs)
        m = self._valid_match(
            Match(
                Application(op, tuple(labels)),
                t_main.succedent.type,
                t_main.succedent.rhs,
            ),
            "a-sub-i",
        )
        return self._mk(Sequent(gamma, m), "a-sub-i", (t_main, *t_ops), ())

    def a_sub_ii(self, t_main: Theorem, t_ops: Sequence[Theorem]) -> Theorem:
        """Replace simple operands of a proper application by the
        constructions they label."""
        op, operands = self._application_match(t_main.succedent, "a-sub-ii")
        if len(t_ops) != len(operands):
            raise RuleShapeError("(a-sub-ii) needs one premise per operand")
        gamma = self._same_context("a-sub-ii", t_main, *t_ops)
        replacements = []
        for i, (tp, operand) in enumerate(zip(t_ops, operands)):
            m = tp.succedent
            if m.rhs is None or not syntactic_equal(m.rhs, operand):
                raise RuleShapeError(
                    f"(a-sub-ii) operand {i + 1} is not the label of premise "
                    f"{i + 1}"
                )
            replacements.append(m.lhs)
        m = self._valid_match(
            Match(
                Application(op, tuple(replacements)),
                t_main.succedent.type,
                t_main.succedent.rhs,
            ),
            "a-sub-ii",
        )
        return self._mk(Sequent(gamma, m), "a-sub-ii", (t_main, *t_ops), ())

    def a_inst(
        self,
        t_main: Theorem,
        t_inner: Theorem,
        fvar: Variable,
        opvars: Sequence[Variable],
    ) -> Theorem:
        """Discharge fresh names for the parts of a proper application
        (a proper application has proper parts)."""
        op, operands = self._application_match(t_main.succedent, "a-inst")
        opvars = tuple(opvars)
        if len(opvars) != len(operands):
            raise RuleShapeError("(a-inst) needs one variable per operand")
        phi = self._type_of(op, "a-inst")
        if fvar.type != phi:
            raise RuleShapeError(
                "(a-inst) function variable must have the operator type"
            )
        discharged = {Match(op, phi, fvar)}
        for operand, ov in zip(operands, opvars):
            tau = self._type_of(operand, "a-inst")
            if ov.type != tau:
                raise RuleShapeError(
                    "(a-inst) operand variable must have the operand type"
                )
            discharged.add(Match(operand, tau, ov))
        gamma = t_main.antecedent
        if t_inner.antecedent != gamma | discharged:
            raise RuleShapeError(
                "(a-inst) inner premise context must be the outer context "
                "plus the part matches"
            )
        m = t_inner.succedent
        self._fresh(
            [fvar, *opvars],
            [
                ("the context", gamma),
                ("the succedent", m),
                ("the operator", op),
                ("the operands", operands),
            ],
            "a-inst",
        )
        return self._mk(
            Sequent(gamma, m), "a-inst", (t_main, t_inner), (fvar, opvars)
        )

    def ext(
        self,
        t1: Theorem,
        t2: Theorem,
        fhat: Construction,
        ghat: Construction,
        xs: Sequence[Variable],
        y: Variable,
    ) -> Theorem:
        """Extensionality: functions with the same graph are congruent."""
        xs = tuple(xs)
        if not (
            is_simple_proper(fhat, self.signature)
            and is_simple_proper(ghat, self.signature)
        ):
            raise RuleShapeError("(ext) needs simple function constructions")
        phi = self._type_of(fhat, "ext")
        if self._type_of(ghat, "ext") != phi or not isinstance(phi, FunctionType):
            raise RuleShapeError("(ext) needs two functions of one type")
        if tuple(v.type for v in xs) != phi.params or y.type != phi.result:
            raise RuleShapeError("(ext) variable types must fit the function type")
        fx = Application(fhat, xs)
        gx = Application(ghat, xs)
        m_f = Match(fx, phi.result, y)
        m_g = Match(gx, phi.result, y)
        gamma = self._discharge(t1, m_f, "ext")
        if t1.succedent != m_g:
            raise RuleShapeError("(ext) first premise must conclude the g-match")
        if self._discharge(t2, m_g, "ext") != gamma or t2.succedent != m_f:
            raise RuleShapeError("(ext) second premise is not the round trip")
        self._fresh(
            [*xs, y],
            [("the context", gamma), ("f", fhat), ("g", ghat)],
            "ext",
        )
        m = self._valid_match(Match(ghat, phi, fhat), "ext")
        return self._mk(Sequent(gamma, m), "ext", (t1, t2), (fhat, ghat, xs, y))

    def a_imp_bot(
        self,
        t1: Theorem,
        t2: Theorem,
        operands: Sequence[Construction],
        opvars: Sequence[Variable],
        result_type: Type,
    ) -> Theorem:
        """Gated literal rule: an application whose operator type disagrees
        with its operand types is improper.  Off by default."""
        if not self.config.allow_a_imp_bot:
            raise GatedRuleError(
                "(a-imp-bot) is disabled; enable it explicitly to experiment"
            )
        operands = tuple(operands)
        opvars = tuple(opvars)
        m1 = t1.succedent
        if m1.rhs is None or not isinstance(m1.rhs, Variable):
            raise RuleShapeError(
                "(a-imp-bot) first premise must match the operator with a "
                "variable"
            )
        phi = m1.type
        if not isinstance(phi, FunctionType) or phi.result != result_type:
            raise RuleShapeError(
                "(a-imp-bot) operator type must be a function type into the "
                "stated result type"
            )
        taus = tuple(self._type_of(x, "a-imp-bot") for x in operands)
        if phi == FunctionType(taus, result_type):
            raise RuleShapeError(
                "(a-imp-bot) condition violated: operator type matches the "
                "operand types"
            )
        if len(opvars) != len(operands):
            raise RuleShapeError("(a-imp-bot) needs one variable per operand")
        extra = {
            Match(x, tau, ov) for x, tau, ov in zip(operands, taus, opvars)
        }
        gamma = t1.antecedent
        if t2.antecedent != gamma | extra:
            raise RuleShapeError("(a-imp-bot) second premise context mismatch")
        self._fresh(
            [*opvars],
            [("the context", gamma), ("the operands", operands)],
            "a-imp-bot",
        )
        m = self._valid_match(
            Match(Application(m1.lhs, operands), result_type, None), "a-imp-bot"
        )
        return self._mk(
            Sequent(gamma, m),
            "a-imp-bot",
            (t1, t2),
            (operands, opvars, result_type),
        )

    # -- operational rules -------------------------------------------------

    def _simple_o(self, c: Construction, rule: str) -> Construction:
        if not is_simple_proper(c, self.signature):
            raise RuleShapeError(f"({rule}) needs a simple proper o-construction")
        if self._type_of(c, rule) != O:
            raise RuleShapeError(f"({rule}) construction must have type o")
        return c

    def _class_of(self, c: Construction, rule: str) -> Type:
        """Type τ of a class construction c : (τ)->o."""
        t = self._type_of(c, rule)
        if (
            not isinstance(t, FunctionType)
            or len(t.params) != 1
            or t.result != O
        ):
            raise RuleShapeError(f"({rule}) needs a class of type (t)->o")
        return t.params[0]

    def _always_proper_class(self, c: Construction, rule: str) -> Type:
        """Classes in INST positions: simple, or an abstraction (both are
        proper under every assignment)."""
        if not (is_simple_proper(c, self.signature) or isinstance(c, Abstraction)):
            raise RuleShapeError(
                f"({rule}) class must be simple or an abstraction"
            )
        return self._class_of(c, rule)

    def _expect_succedent_rhs(self, t: Theorem, rhs: Construction, rule: str):
        if t.succedent.rhs != rhs:
            raise RuleShapeError(
                f"({rule}) premise succedent must be labelled "
                f"{'T' if rhs == T_ACQ else 'F'}"
            )

    def not_i(
        self, t1: Theorem, t2: Theorem, o_hat: Construction, o_prime: Construction
    ) -> Theorem:
        """If assuming ô ≅ ô′ yields patently incompatible conclusions,
        then ~(ô) ≅ ô′."""
        self._simple_o(o_hat, "not-i")
        self._simple_o(o_prime, "not-i")
        discharged = Match(o_hat, O, o_prime)
        gamma = self._discharge(t1, discharged, "not-i")
        if self._discharge(t2, discharged, "not-i") != gamma:
            raise RuleShapeError("(not-i) premise contexts disagree")
        if not patently_incompatible(t1.succedent, t2.succedent, self.signature):
            raise IncompatibilityError(
                "(not-i) premise succedents are not patently incompatible"
            )
        m = self._valid_match(
            Match(Application(Acquisition("not"), (o_hat,)), O, o_prime), "not-i"
        )
        return self._mk(Sequent(gamma, m), "not-i", (t1, t2), (o_hat, o_prime))

    def ra(self, t1: Theorem, t2: Theorem, o_hat: Construction) -> Theorem:
        """Redundant assumption: ô is T or F, so drop the case split."""
        self._simple_o(o_hat, "ra")
        m_t = Match(o_hat, O, T_ACQ)
        m_f = Match(o_hat, O, F_ACQ)
        gamma = self._discharge(t1, m_t, "ra")
        if self._discharge(t2, m_f, "ra") != gamma:
            raise RuleShapeError("(ra) premise contexts disagree")
        if t1.succedent != t2.succedent:
            raise RuleShapeError("(ra) premise succedents disagree")
        return self._mk(Sequent(gamma, t1.succedent), "ra", (t1, t2), (o_hat,))

    def _inst(
        self,
        t: Theorem,
        discharged: Match,
        rule: str,
        extra_scope: Sequence[tuple[str, object]],
    ) -> Theorem:
        if discharged.rhs is None or not isinstance(discharged.rhs, Variable):
            raise RuleShapeError(
                f"({rule}) discharged match must be labelled by a fresh variable"
            )
        gamma = self._discharge(t, discharged, rule)
        self._fresh(
            [discharged.rhs],
            [("the context", gamma), ("the succedent", t.succedent), *extra_scope],
            rule,
        )
        return self._mk(
            Sequent(gamma, t.succedent), rule, (t,), (discharged,)
        )

    def not_inst(self, t: Theorem, discharged: Match) -> Theorem:
        """Negations of proper constructions are proper: name the value."""
        lhs = discharged.lhs
        if not (
            isinstance(lhs, Application)
            and lhs.operator == Acquisition("not")
            and len(lhs.operands) == 1
        ):
            raise RuleShapeError("(not-inst) discharged match must be a negation")
        self._simple_o(lhs.operands[0], "not-inst")
        return self._inst(t, discharged, "not-inst", [("~'s argument", lhs)])

    def imp_i(
        self, t: Theorem, o_hat: Construction, o_prime: Construction
    ) -> Theorem:
        """From Γ, ô:T ⟶ ô′:T conclude the conditional is true."""
        self._simple_o(o_hat, "imp-i")
        self._simple_o(o_prime, "imp-i")
        gamma = self._discharge(t, Match(o_hat, O, T_ACQ), "imp-i")
        if t.succedent != Match(o_prime, O, T_ACQ):
            raise RuleShapeError(
                "(imp-i) premise succedent must label the consequent T"
            )
        m = self._valid_match(
            Match(Application(Acquisition("imp"), (o_hat, o_prime)), O, T_ACQ),
            "imp-i",
        )
        return self._mk(Sequent(gamma, m), "imp-i", (t,), (o_hat, o_prime))

    def imp_e(self, t1: Theorem, t2: Theorem) -> Theorem:
        """Modus ponens on true conditionals."""
        gamma = self._same_context("imp-e", t1, t2)
        m1 = t1.succedent
        lhs = m1.lhs
        if not (
            isinstance(lhs, Application)
            and lhs.operator == Acquisition("imp")
            and len(lhs.operands) == 2
            and m1.rhs == T_ACQ
        ):
            raise RuleShapeError(
                "(imp-e) first premise must be a true conditional"
            )
        if t2.succedent != Match(lhs.operands[0], O, T_ACQ):
            raise RuleShapeError(
                "(imp-e) second premise must label the antecedent T"
            )
        m = Match(lhs.operands[1], O, T_ACQ)
        return self._mk(Sequent(gamma, m), "imp-e", (t1, t2), ())

    def imp_inst(self, t: Theorem, discharged: Match) -> Theorem:
        """Conditionals over proper constructions are proper."""
        lhs = discharged.lhs
        if not (
            isinstance(lhs, Application)
            and lhs.operator == Acquisition("imp")
            and len(lhs.operands) == 2
        ):
            raise RuleShapeError(
                "(imp-inst) discharged match must be a conditional"
            )
        for operand in lhs.operands:
            self._simple_o(operand, "imp-inst")
        return self._inst(t, discharged, "imp-inst", [("⊃'s arguments", lhs)])

    def sigma_i(self, t: Theorem) -> Theorem:
        """A true membership witnesses the existential."""
        m1 = t.succedent
        if (
            not isinstance(m1.lhs, Application)
            or len(m1.lhs.operands) != 1
            or m1.rhs != T_ACQ
        ):
            raise RuleShapeError(
                "(sigma-i) premise must label a unary class application T"
            )
        cls = m1.lhs.operator
        tau = self._class_of(cls, "sigma-i")
        m = self._valid_match(
            Match(
                Application(Acquisition(builtin_name("some", tau)), (cls,)),
                O,
                T_ACQ,
            ),
            "sigma-i",
        )
        return self._mk(Sequent(t.antecedent, m), "sigma-i", (t,), ())

    def _quantifier_match(self, m: Match, head: str, rule: str):
        lhs = m.lhs
        if (
            isinstance(lhs, Application)
            and isinstance(lhs.operator, Acquisition)
            and not lhs.operator.is_quoted
            and len(lhs.operands) == 1
        ):
            split = parse_builtin(lhs.operator.target)
            if split is not None and split[0] == head:
                return lhs.operands[0]
        raise RuleShapeError(f"({rule}) premise is not a {head}-application")

    def sigma_e(self, t1: Theorem, t2: Theorem, var: Variable) -> Theorem:
        """Use a fresh witness of a true existential."""
        self._expect_succedent_rhs(t1, T_ACQ, "sigma-e")
        cls = self._quantifier_match(t1.succedent, "some", "sigma-e")
        tau = self._class_of(cls, "sigma-e")
        if var.type != tau:
            raise RuleShapeError("(sigma-e) witness variable must range over τ")
        discharged = Match(Application(cls, (var,)), O, T_ACQ)
        gamma = self._discharge(t2, discharged, "sigma-e")
        if gamma != t1.antecedent:
            raise RuleShapeError("(sigma-e) premise contexts disagree")
        m = t2.succedent
        self._fresh(
            [var],
            [("the context", gamma), ("the succedent", m), ("the class", cls)],
            "sigma-e",
        )
        return self._mk(Sequent(gamma, m), "sigma-e", (t1, t2), (var,))

    def sigma_inst(self, t: Theorem, discharged: Match) -> Theorem:
        """Existentials over always-proper classes are proper."""
        cls = self._quantifier_match(discharged, "some", "sigma-inst")
        self._always_proper_class(cls, "sigma-inst")
        return self._inst(t, discharged, "sigma-inst", [("the class", cls)])

    def pi_i(self, t: Theorem, var: Variable) -> Theorem:
        """Generalize a membership over a fresh variable."""
        m1 = t.succedent
        if (
            not isinstance(m1.lhs, Application)
            or len(m1.lhs.operands) != 1
            or m1.lhs.operands[0] != var
            or m1.rhs != T_ACQ
        ):
            raise RuleShapeError(
                "(pi-i) premise must label a class applied to the variable T"
            )
        cls = m1.lhs.operator
        tau = self._class_of(cls, "pi-i")
        if var.type != tau:
            raise RuleShapeError("(pi-i) variable must range over τ")
        self._fresh(
            [var],
            [("the context", t.antecedent), ("the class", cls)],
            "pi-i",
        )
        m = self._valid_match(
            Match(
                Application(Acquisition(builtin_name("all", tau)), (cls,)),
                O,
                T_ACQ,
            ),
            "pi-i",
        )
        return self._mk(Sequent(t.antecedent, m), "pi-i", (t,), (var,))

    def pi_e(self, t: Theorem, target: Construction) -> Theorem:
        """Instantiate a true universal at any simple proper construction."""
        self._expect_succedent_rhs(t, T_ACQ, "pi-e")
        cls = self._quantifier_match(t.succedent, "all", "pi-e")
        tau = self._class_of(cls, "pi-e")
        if not is_simple_proper(target, self.signature):
            raise RuleShapeError("(pi-e) target must be a variable or acquisition")
        if not subsumes(tau, self._type_of(target, "pi-e")):
            raise RuleShapeError("(pi-e) target type does not fit the class")
        m = self._valid_match(
            Match(Application(cls, (target,)), O, T_ACQ), "pi-e"
        )
        return self._mk(Sequent(t.antecedent, m), "pi-e", (t,), (target,))

    def pi_inst(self, t: Theorem, discharged: Match) -> Theorem:
        """Universals over always-proper classes are proper."""
        cls = self._quantifier_match(discharged, "all", "pi-inst")
        self._always_proper_class(cls, "pi-inst")
        return self._inst(t, discharged, "pi-inst", [("the class", cls)])

    def eq_i(self, t: Theorem) -> Theorem:
        """A proper match yields a true identity."""
        m1 = t.succedent
        if m1.rhs is None:
            raise RuleShapeError("(eq-i) needs a proper premise match")
        tau = m1.type
        m = self._valid_match(
            Match(
                Application(
                    Acquisition(builtin_name("eq", tau)), (m1.lhs, m1.rhs)
                ),
                O,
                T_ACQ,
            ),
            "eq-i",
        )
        return self._mk(Sequent(t.antecedent, m), "eq-i", (t,), ())

    def eq_e(self, t: Theorem) -> Theorem:
        """A true identity with a simple right side yields the match."""
        self._expect_succedent_rhs(t, T_ACQ, "eq-e")
        lhs = t.succedent.lhs
        if not (
            isinstance(lhs, Application)
            and isinstance(lhs.operator, Acquisition)
            and not lhs.operator.is_quoted
            and len(lhs.operands) == 2
        ):
            raise RuleShapeError("(eq-e) premise is not an identity application")
        split = parse_builtin(lhs.operator.target)
        if split is None or split[0] != "eq":
            raise RuleShapeError("(eq-e) premise is not an identity application")
        x, label = lhs.operands
        if not is_simple_proper(label, self.signature):
            raise RuleShapeError(
                "(eq-e) the second identity argument must be simple"
            )
        op_type = self.signature.type_of(lhs.operator.target)
        assert isinstance(op_type, FunctionType)
        m = self._valid_match(Match(x, op_type.params[0], label), "eq-e")
        return self._mk(Sequent(t.antecedent, m), "eq-e", (t,), ())

    def eq_inst(self, t: Theorem, discharged: Match) -> Theorem:
        """Identities between simple proper constructions are proper."""
        lhs = discharged.lhs
        ok = (
            isinstance(lhs, Application)
            and isinstance(lhs.operator, Acquisition)
            and not lhs.operator.is_quoted
            and len(lhs.operands) == 2
        )
        if ok:
            split = parse_builtin(lhs.operator.target)
            ok = split is not None and split[0] == "eq"
        if not ok:
            raise RuleShapeError("(eq-inst) discharged match must be an identity")
        for operand in lhs.operands:
            if not is_simple_proper(operand, self.signature):
                raise RuleShapeError(
                    "(eq-inst) identity arguments must be simple"
                )
        return self._inst(t, discharged, "eq-inst", [("='s arguments", lhs)])

    def iota_i(self, t1: Theorem, t2: Theorem, var: Variable) -> Theorem:
        """Membership plus uniqueness: the described object is the member."""
        m1 = t1.succedent
        if (
            not isinstance(m1.lhs, Application)
            or len(m1.lhs.operands) != 1
            or m1.rhs != T_ACQ
        ):
            raise RuleShapeError(
                "(iota-i) first premise must label a class application T"
            )
        cls = m1.lhs.operator
        x_hat = m1.lhs.operands[0]
        if not is_simple_proper(x_hat, self.signature):
            raise RuleShapeError("(iota-i) the member must be simple")
        tau = self._class_of(cls, "iota-i")
        if var.type != tau:
            raise RuleShapeError("(iota-i) uniqueness variable must range over τ")
        discharged = Match(Application(cls, (var,)), O, T_ACQ)
        gamma = self._discharge(t2, discharged, "iota-i")
        if gamma != t1.antecedent:
            raise RuleShapeError("(iota-i) premise contexts disagree")
        if t2.succedent != Match(var, tau, x_hat):
            raise RuleShapeError(
                "(iota-i) uniqueness premise must match the variable with "
                "the member"
            )
        self._fresh(
            [var],
            [
                ("the context", gamma),
                ("the class", cls),
                ("the member", x_hat),
            ],
            "iota-i",
        )
        m = self._valid_match(
            Match(
                Application(Acquisition(builtin_name("the", tau)), (cls,)),
                tau,
                x_hat,
            ),
            "iota-i",
        )
        return self._mk(Sequent(gamma, m), "iota-i", (t1, t2), (var,))

    def iota_e(self, t: Theorem) -> Theorem:
        """The only F is an F."""
        m1 = t.succedent
        if m1.rhs is None:
            raise RuleShapeError("(iota-e) needs a proper premise")
        cls = self._quantifier_match(m1, "the", "iota-e")
        m = self._valid_match(
            Match(Application(cls, (m1.rhs,)), O, T_ACQ), "iota-e"
        )
        return self._mk(Sequent(t.antecedent, m), "iota-e", (t,), ())

    def iota_inst(
        self, t1: Theorem, t2: Theorem, var_x: Variable, var_o: Variable
    ) -> Theorem:
        """Discharge a description assumption given the properness premise.

        Both rule variables are eigenvariables; the singularization
        function is partial, which is why the second premise exists.
        """
        cls = None
        tau = None
        discharged = None
        for cand in t1.antecedent:
            lhs = cand.lhs
            if (
                cand.rhs == var_x
                and isinstance(lhs, Application)
                and isinstance(lhs.operator, Acquisition)
                and not lhs.operator.is_quoted
                and len(lhs.operands) == 1
            ):
                split = parse_builtin(lhs.operator.target)
                if split is not None and split[0] == "the":
                    discharged = cand
                    cls = lhs.operands[0]
                    tau = cand.type
                    break
        if discharged is None:
            raise RuleShapeError(
                "(iota-inst) no description match labelled by the variable"
            )
        if var_x.type != tau:
            raise RuleShapeError("(iota-inst) variable must range over τ")
        gamma = t1.antecedent - {discharged}
        if t2.antecedent != gamma:
            raise RuleShapeError("(iota-inst) premise contexts disagree")
        if t2.succedent != Match(Application(cls, (var_x,)), O, var_o):
            raise RuleShapeError(
                "(iota-inst) second premise must label the membership with "
                "a fresh variable"
            )
        m = t1.succedent
        self._fresh(
            [var_x, var_o],
            [("the context", gamma), ("the succedent", m), ("the class", cls)],
            "iota-inst",
        )
        return self._mk(
            Sequent(gamma, m), "iota-inst", (t1, t2), (var_x, var_o)
        )

    # -- dispatch -----------------------------------------------------------

    def apply(self, rule, premises: Sequence[Theorem], params: Sequence) -> Theorem:
        """Apply a rule by identifier; the uniform entry point for replay."""
        name = rule.value if isinstance(rule, RuleId) else str(rule)
        handler = _HANDLERS.get(name)
        if handler is None:
            raise KernelError(f"unknown rule {name}")
        return handler(self, tuple(premises), tuple(params))

    def apply_structural(self, rule, premises, params) -> Theorem:
        if RuleId(rule if isinstance(rule, str) else rule.value) not in STRUCTURAL_RULES:
            raise KernelError(f"{rule} is not a structural rule")
        return self.apply(rule, premises, params)

    def apply_form(self, rule, premises, params) -> Theorem:
        if RuleId(rule if isinstance(rule, str) else rule.value) not in FORM_RULES:
            raise KernelError(f"{rule} is not a form rule")
        return self.apply(rule, premises, params)

    def apply_operational(self, rule, premises, params) -> Theorem:
        if RuleId(rule if isinstance(rule, str) else rule.value) not in OPERATIONAL_RULES:
            raise KernelError(f"{rule} is not an operational rule")
        return self.apply(rule, premises, params)


def replay(thm: Theorem, kernel: Kernel) -> Theorem:
    """Re-execute a theorem's provenance; reproduces an identical sequent."""
    premises = tuple(replay(p, kernel) for p in thm.premises)
    if thm.rule == HYPOTHESIS:
        return kernel.hypothesis(thm.params[0])
    return kernel.apply(thm.rule, premises, thm.params)


_HANDLERS = {
    "ax": lambda k, ps, a: k.ax(a[0], a[1]),
    "wr": lambda k, ps, a: k.wr(ps[0], a[0]),
    "cut": lambda k, ps, a: k.cut(ps[0], ps[1]),
    "efq": lambda k, ps, a: k.efq(ps[0], ps[1], a[0]),
    "exh": lambda k, ps, a: k.exh(ps[0], ps[1], a[0], a[1], a[2]),
    "tm": lambda k, ps, a: k.tm(a[0], a[1]),
    "lambda-inst": lambda k, ps, a: k.lambda_inst(ps[0], a[0], a[1]),
    "beta-con": lambda k, ps, a: k.beta_con(ps[0]),
    "beta-exp": lambda k, ps, a: k.beta_exp(ps[0], ps[1:], a[0], a[1]),
    "a-sub-i": lambda k, ps, a: k.a_sub_i(ps[0], ps[1:]),
    "a-sub-ii": lambda k, ps, a: k.a_sub_ii(ps[0], ps[1:]),
    "a-inst": lambda k, ps, a: k.a_inst(ps[0], ps[1], a[0], a[1]),
    "ext": lambda k, ps, a: k.ext(ps[0], ps[1], a[0], a[1], a[2], a[3]),
    "a-imp-bot": lambda k, ps, a: k.a_imp_bot(ps[0], ps[1], a[0], a[1], a[2]),
    "not-i": lambda k, ps, a: k.not_i(ps[0], ps[1], a[0], a[1]),
    "ra": lambda k, ps, a: k.ra(ps[0], ps[1], a[0]),
    "not-inst": lambda k, ps, a: k.not_inst(ps[0], a[0]),
    "imp-i": lambda k, ps, a: k.imp_i(ps[0], a[0], a[1]),
    "imp-e": lambda k, ps, a: k.imp_e(ps[0], ps[1]),
    "imp-inst": lambda k, ps, a: k.imp_inst(ps[0], a[0]),
    "sigma-i": lambda k, ps, a: k.sigma_i(ps[0]),
    "sigma-e": lambda k, ps, a: k.sigma_e(ps[0], ps[1], a[0]),
    "sigma-inst": lambda k, ps, a: k.sigma_inst(ps[0], a[0]),
    "pi-i": lambda k, ps, a: k.pi_i(ps[0], a[0]),
    "pi-e": lambda k, ps, a: k.pi_e(ps[0], a[0]),
    "pi-inst": lambda k, ps, a: k.pi_inst(ps[0], a[0]),
    "eq-i": lambda k, ps, a: k.eq_i(ps[0]),
    "eq-e": lambda k, ps, a: k.eq_e(ps[0]),
    "eq-inst": lambda k, ps, a: k.eq_inst(ps[0], a[0]),
    "iota-i": lambda k, ps, a: k.iota_i(ps[0], ps[1], a[0]),
    "iota-e": lambda k, ps, a: k.iota_e(ps[0]),
    "iota-inst": lambda k, ps, a: k.iota_inst(ps[0], ps[1], a[0], a[1]),
}
