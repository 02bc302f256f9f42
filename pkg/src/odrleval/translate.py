"""Compositional translation from agreements to first-order formulas.

Each policy set becomes a guarded universal over a Subjects variable:
nonexclusive sets say "members meeting the prerequisite get the policy",
exclusive sets add "non-members are forbidden the policy's actions".
Count constraints become exact-rational sum comparisons, requirements become
time-interval existentials, and suspended policy sets become negations of
the nested translation (evaluated against the enclosing user and asset).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from .agreements import (
    Action,
    Agreement,
    AndPolicy,
    AndPolicySet,
    AndPrq,
    AnySeq,
    Asset,
    Attribution,
    Constraint,
    Count,
    ForEachMember,
    Group,
    InSeq,
    NotConstraint,
    NotPolicySet,
    OrPrq,
    Policy,
    PolicyId,
    PolicySet,
    PrePay,
    Prerequisite,
    PrimitivePolicy,
    PrimitivePolicySet,
    PrinCount,
    Principal,
    PrincipalConstraint,
    Requirement,
    Subject,
    TruePrq,
    XorPrq,
    ids,
    sorted_principals,
    sorted_subjects,
)
from .fol import (
    FALSE,
    INFINITY,
    TRUE,
    AndF,
    Attributed,
    Constant,
    CountApp,
    Eq,
    Exists,
    Forall,
    Formula,
    IdSet,
    Implies,
    Leq,
    Lt,
    NotF,
    Paid,
    Permitted,
    RationalLit,
    Sort,
    SumTerm,
    Term,
    Var,
    mk_and,
    mk_or,
)


class SeqInterpretation(Enum):
    """How nested sequence requirements interleave.

    OVERLAPPING (the adopted reading): an inner inSeq only orders its own
    steps, so other requirements may fall between them.  CONSECUTIVE: an
    inner inSeq's steps must also be adjacent in the overall order.
    """

    OVERLAPPING = "overlapping"
    CONSECUTIVE = "consecutive"


def _subject_const(s: Subject) -> Constant:
    return Constant(s.name, Sort.SUBJECTS)


def _action_const(a: Action) -> Constant:
    return Constant(a.value, Sort.ACTIONS)


def _asset_const(a: Asset) -> Constant:
    return Constant(a.name, Sort.ASSETS)


def _id_set(pids: Iterable[PolicyId]) -> IdSet:
    return IdSet(p.name for p in pids)


class _Translator:
    """One translation run, parameterized by the sequence interpretation.

    Bound variables are named by nesting depth, so sibling scopes reuse
    names (as the typeset translation does) and the output is a pure
    function of the node being translated: conjunctions of policy sets,
    policies, or prerequisites translate to conjunctions of the members'
    translations, syntactically.
    """

    def __init__(self, mode: SeqInterpretation):
        self.mode = mode

    @staticmethod
    def time_var(depth: int) -> Var:
        return Var(f"t{depth + 1}", Sort.TIMES)

    @staticmethod
    def subject_var(depth: int) -> Var:
        # each suspended-policy-set nesting level binds its own name so a
        # nested clause never shadows the enclosing subject variable
        return Var("x" if depth == 0 else f"x{depth + 1}", Sort.SUBJECTS)

    def principal(self, prin: Principal, x: Var) -> Formula:
        if isinstance(prin, Subject):
            return Eq(x, _subject_const(prin))
        return mk_or(self.principal(m, x) for m in prin.members)

    def policy_set(self, ps: PolicySet, user: Principal, asset: Asset, depth: int) -> Formula:
        if isinstance(ps, AndPolicySet):
            return mk_and(self.policy_set(s, user, asset, depth) for s in ps.sets)
        x = self.subject_var(depth)
        pol_ids = ids(ps.policy)
        guard = AndF(
            [
                self.principal(user, x),
                self.prerequisite(ps.prereq, x, pol_ids, user, asset, depth),
            ]
        )
        positive = Forall(x, Implies(guard, self.policy_plus(ps.policy, x, user, asset, depth)))
        if not ps.exclusive:
            return positive
        negative = Forall(
            x, Implies(NotF(self.principal(user, x)), self.policy_minus(ps.policy, x, asset))
        )
        return AndF([positive, negative])

    def policy_plus(
        self, p: Policy, x: Var, user: Principal, asset: Asset, depth: int
    ) -> Formula:
        if isinstance(p, AndPolicy):
            return mk_and(self.policy_plus(q, x, user, asset, depth) for q in p.policies)
        prq = self.prerequisite(p.prereq, x, frozenset((p.policy_id,)), user, asset, depth)
        return Implies(prq, Permitted(x, _action_const(p.action), _asset_const(asset)))

    def policy_minus(self, p: Policy, x: Var, asset: Asset) -> Formula:
        # prohibitions ignore the policy's prerequisite entirely
        if isinstance(p, AndPolicy):
            return mk_and(self.policy_minus(q, x, asset) for q in p.policies)
        return NotF(Permitted(x, _action_const(p.action), _asset_const(asset)))

    def count_sum(self, pol_ids: frozenset[PolicyId], prin: Principal) -> Term:
        terms = [
            CountApp(_subject_const(s), Constant(pid.name, Sort.POLIDS))
            for s in sorted_subjects(prin)
            for pid in sorted(pol_ids)
        ]
        return terms[0] if len(terms) == 1 else SumTerm(terms)

    def prerequisite(
        self,
        prq: Prerequisite,
        x: Var,
        pol_ids: frozenset[PolicyId],
        prin: Principal,
        asset: Asset,
        depth: int,
    ) -> Formula:
        if isinstance(prq, TruePrq):
            return TRUE
        if isinstance(prq, PrincipalConstraint):
            return self.principal(prq.principal, x)
        if isinstance(prq, ForEachMember):
            # the member principal replaces prin for each sub-constraint
            return mk_and(
                self.prerequisite(c, x, pol_ids, member, asset, depth)
                for member in sorted_principals(prq.principal)
                for c in prq.constraints
            )
        if isinstance(prq, Count):
            return Lt(self.count_sum(pol_ids, prin), RationalLit(Fraction(prq.bound)))
        if isinstance(prq, PrinCount):
            # charged against its own principal, even inside forEachMember
            return Lt(self.count_sum(pol_ids, prq.principal), RationalLit(Fraction(prq.bound)))
        if isinstance(prq, (PrePay, Attribution, InSeq, AnySeq)):
            return self.requirement(prq, pol_ids, RationalLit(Fraction(0), Sort.TIMES), INFINITY)
        if isinstance(prq, NotPolicySet):
            return NotF(self.policy_set(prq.policy_set, prin, asset, depth + 1))
        if isinstance(prq, NotConstraint):
            return NotF(self.prerequisite(prq.constraint, x, pol_ids, prin, asset, depth))
        if isinstance(prq, AndPrq):
            return mk_and(
                self.prerequisite(i, x, pol_ids, prin, asset, depth) for i in prq.items
            )
        if isinstance(prq, OrPrq):
            return mk_or(self.prerequisite(i, x, pol_ids, prin, asset, depth) for i in prq.items)
        if isinstance(prq, XorPrq):
            parts = [self.prerequisite(i, x, pol_ids, prin, asset, depth) for i in prq.items]
            return mk_or(
                mk_and([parts[i]] + [NotF(p) for j, p in enumerate(parts) if j != i])
                for i in range(len(parts))
            )
        raise TypeError(f"not a prerequisite: {prq!r}")

    def requirement(
        self,
        req: Requirement,
        pol_ids: frozenset[PolicyId],
        lo: Term,
        hi: Term,
        depth: int = 0,
    ) -> Formula:
        if isinstance(req, PrePay):
            t = self.time_var(depth)
            atom = Paid(RationalLit(req.amount), _id_set(pol_ids), t)
            return Exists(t, AndF([Leq(lo, t), Lt(t, hi), atom]))
        if isinstance(req, Attribution):
            t = self.time_var(depth)
            atom = Attributed(_subject_const(req.subject), t)
            return Exists(t, AndF([Leq(lo, t), Lt(t, hi), atom]))
        if isinstance(req, InSeq):
            return self._sequence(req.steps, pol_ids, lo, hi, depth, permuted=False)
        if isinstance(req, AnySeq):
            if self.mode is SeqInterpretation.OVERLAPPING:
                return mk_and(self.requirement(s, pol_ids, lo, hi, depth) for s in req.steps)
            return self._sequence(req.steps, pol_ids, lo, hi, depth, permuted=True)
        raise TypeError(f"not a requirement: {req!r}")

    def _sequence(
        self,
        steps: tuple[Requirement, ...],
        pol_ids: frozenset[PolicyId],
        lo: Term,
        hi: Term,
        depth: int,
        *,
        permuted: bool,
    ) -> Formula:
        k = len(steps)
        if k == 1:
            return self.requirement(steps[0], pol_ids, lo, hi, depth)
        cuts = [self.time_var(depth + i) for i in range(k - 1)]
        inner = depth + k - 1
        bounds = list(zip([lo] + cuts, cuts + [hi]))
        ordering: list[Formula] = [Lt(a, b) for a, b in bounds]
        if permuted:
            body_alternatives = mk_or(
                mk_and(
                    self.requirement(steps[i], pol_ids, a, b, inner)
                    for i, (a, b) in zip(perm, bounds)
                )
                for perm in itertools.permutations(range(k))
            )
            body: Formula = AndF(ordering + [body_alternatives])
        else:
            parts = [
                self.requirement(step, pol_ids, a, b, inner)
                for step, (a, b) in zip(steps, bounds)
            ]
            body = AndF(ordering + parts)
        for t in reversed(cuts):
            body = Exists(t, body)
        return body


@lru_cache(maxsize=4096)
def _translate_cached(agr: Agreement, mode: SeqInterpretation) -> Formula:
    return _Translator(mode).policy_set(agr.body, agr.user, agr.asset, 0)


def translate_agreement(
    agr: Agreement, mode: SeqInterpretation = SeqInterpretation.OVERLAPPING
) -> Formula:
    return _translate_cached(agr, mode)


@dataclass(frozen=True)
class TranslationContext:
    """Parameters a prerequisite is translated under.

    ids are the policy identifiers the prerequisite counts against; prin is
    the principal it applies to (the agreement's user unless overridden by
    forEachMember); asset and subject_var come from the enclosing clause.
    """

    ids: frozenset[PolicyId]
    prin: Principal
    asset: Asset
    subject_var: Var = Var("x", Sort.SUBJECTS)
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING


def translate_prerequisite(prq: Prerequisite, ctx: TranslationContext) -> Formula:
    tr = _Translator(ctx.mode)
    return tr.prerequisite(prq, ctx.subject_var, frozenset(ctx.ids), ctx.prin, ctx.asset, 0)


def translate_policy_positive(p: Policy, ctx: TranslationContext) -> Formula:
    tr = _Translator(ctx.mode)
    return tr.policy_plus(p, ctx.subject_var, ctx.prin, ctx.asset, 0)


def translate_policy_negative(p: Policy, ctx: TranslationContext) -> Formula:
    return _Translator(ctx.mode).policy_minus(p, ctx.subject_var, ctx.asset)


def translate_requirement(
    req: Requirement,
    pol_ids: Iterable[PolicyId],
    t_lo: Union[Term, Fraction, int],
    t_hi: Union[Term, Fraction, int, float],
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
) -> Formula:
    if not isinstance(t_lo, (Var, RationalLit)) and t_lo is not INFINITY:
        t_lo = RationalLit(Fraction(t_lo), Sort.TIMES)
    if not isinstance(t_hi, (Var, RationalLit)) and t_hi is not INFINITY:
        t_hi = INFINITY if t_hi == float("inf") else RationalLit(Fraction(t_hi), Sort.TIMES)
    return _Translator(mode).requirement(req, frozenset(pol_ids), t_lo, t_hi)


# --- nested forEachMember normalization ------------------------------------------
#
# forEachMember[prin; ..., forEachMember[prin'; cs'], ...] translates to a
# formula independent of the outer member binding, so the inner constraint
# lifts out as a sibling conjunct.  The rewrite keeps prerequisite size
# linear, which the tractable path's polynomial bound relies on.


def _flatten_fem(fem: ForEachMember) -> list[ForEachMember]:
    plain: list[Constraint] = []
    lifted: list[ForEachMember] = []
    for c in fem.constraints:
        if isinstance(c, ForEachMember):
            lifted.extend(_flatten_fem(c))
        else:
            plain.append(c)
    out = [ForEachMember(fem.principal, plain)] if plain else []
    return out + lifted


def flatten_for_each_member(prq: Prerequisite) -> Prerequisite:
    """Rewrite away nested forEachMember constraints, preserving semantics."""
    if isinstance(prq, ForEachMember):
        parts = _flatten_fem(prq)
        return parts[0] if len(parts) == 1 else AndPrq(parts)
    if isinstance(prq, AndPrq):
        return AndPrq(flatten_for_each_member(i) for i in prq.items)
    if isinstance(prq, OrPrq):
        return OrPrq(flatten_for_each_member(i) for i in prq.items)
    if isinstance(prq, XorPrq):
        return XorPrq(flatten_for_each_member(i) for i in prq.items)
    if isinstance(prq, NotConstraint) and isinstance(prq.constraint, ForEachMember):
        parts = _flatten_fem(prq.constraint)
        if len(parts) == 1:
            return NotConstraint(parts[0])
        return OrPrq(NotConstraint(p) for p in parts)
    return prq
