"""Query answering: the four-way verdict over a set of agreements.

Two routes compute the same answer.  The general route translates, grounds
over the query's closed terms, fixes closed-world literals, and decides
propositional validity by assignment enumeration (decidable for the whole
language, exponential by nature).  The tractable route applies only to
queries whose agreements never suspend a policy set (fragment Q1): it checks
joint satisfiability pairwise, then decides each agreement's grant/forbid
bits from an index of its policy sets, evaluating prerequisites directly
against the environment in polynomial time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional

from .agreements import (
    Action,
    Agreement,
    AndPrq,
    AnySeq,
    Asset,
    Attribution,
    Count,
    ForEachMember,
    InSeq,
    NotConstraint,
    NotPolicySet,
    OrPrq,
    PolicyId,
    PrePay,
    Prerequisite,
    PrinCount,
    PrincipalConstraint,
    Requirement,
    Subject,
    TruePrq,
    XorPrq,
    collect_actions,
    collect_policy_ids,
    collect_subjects,
    ids,
    in_fragment_q1,
    iter_primitive_policies,
    iter_primitive_policy_sets,
    principals,
    subjects,
)
from .environment import (
    Bound,
    Environment,
    attributed_exists,
    check_consistent,
    lookup_count,
    paid_exists,
)
from .fol import (
    Constant,
    IdSet,
    Implies,
    NotF,
    Permitted,
    RationalLit,
    Sort,
    TermUniverse,
    ground,
    mk_and,
    propositional_valid,
    substitute_literals,
)
from .translate import SeqInterpretation, flatten_for_each_member, translate_agreement

INF = float("inf")


@dataclass(frozen=True)
class Query:
    """(A, s, act, a, E): may subject s do act to asset a, given agreements A
    and environment E?  Policy ids must be unique across all agreements."""

    agreements: tuple[Agreement, ...]
    subject: Subject
    action: Action
    asset: Asset
    env: Environment

    def __init__(self, agreements, subject, action, asset, env):
        distinct = tuple(dict.fromkeys(agreements))
        object.__setattr__(self, "agreements", distinct)
        object.__setattr__(self, "subject", subject)
        object.__setattr__(self, "action", action)
        object.__setattr__(self, "asset", asset)
        object.__setattr__(self, "env", env)
        seen: dict[PolicyId, int] = {}
        for i, agr in enumerate(distinct):
            for pid in set(collect_policy_ids(agr)):
                if pid in seen:
                    raise ValueError(
                        f"policy id {pid.name!r} appears in agreements "
                        f"#{seen[pid] + 1} and #{i + 1}; ids must be unique across a query"
                    )
                seen[pid] = i


class VerdictKind(Enum):
    GRANTED = "granted"
    DENIED = "denied"
    UNREGULATED = "unregulated"
    INCONSISTENT = "inconsistent"


PHRASES = {
    VerdictKind.GRANTED: "Permission granted",
    VerdictKind.DENIED: "Permission denied",
    VerdictKind.UNREGULATED: "Permission unregulated",
    VerdictKind.INCONSISTENT: "Query inconsistent",
}

EXIT_CODES = {
    VerdictKind.GRANTED: 0,
    VerdictKind.DENIED: 1,
    VerdictKind.UNREGULATED: 2,
    VerdictKind.INCONSISTENT: 3,
}


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    path: str  # "general" | "tractable"
    detail: Optional[str] = None

    @property
    def phrase(self) -> str:
        return PHRASES[self.kind]

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]


# --- policy set index (the S+ / S- sets) ------------------------------------------


@dataclass(frozen=True)
class GrantTuple:
    """One way a policy set can grant: outer prerequisite (counting against
    the whole set's ids), inner prerequisite (counting against the policy's
    own id), and the granted action."""

    outer_prq: Prerequisite
    set_ids: frozenset[PolicyId]
    inner_prq: Prerequisite
    policy_id: PolicyId
    action: Action


@dataclass(frozen=True)
class PolicySetIndex:
    splus: tuple[GrantTuple, ...]
    sminus: frozenset[Action]


def build_index(ps) -> PolicySetIndex:
    splus = []
    sminus = set()
    for prim_set in iter_primitive_policy_sets(ps):
        set_ids = ids(prim_set.policy)
        for pol in iter_primitive_policies(prim_set.policy):
            splus.append(
                GrantTuple(prim_set.prereq, set_ids, pol.prereq, pol.policy_id, pol.action)
            )
            if prim_set.exclusive:
                sminus.add(pol.action)
    return PolicySetIndex(tuple(splus), frozenset(sminus))


# --- prerequisite evaluation (Holds / ReqHolds) ------------------------------------


def _count_total(env: Environment, subs: Iterable[Subject], pol_ids: Iterable[PolicyId]) -> int:
    return sum(lookup_count(env, s, pid) for s in subs for pid in pol_ids)


def holds(
    prq: Prerequisite,
    subject: Subject,
    pol_ids: frozenset[PolicyId],
    prin_u,
    env: Environment,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    chain_strict: bool = True,
) -> bool:
    """Does the prerequisite hold for the subject against the environment?

    Direct recursion over prerequisite structure; agrees with the E-validity
    of the prerequisite's translation.  Suspended policy sets are outside
    this fragment and rejected.
    """
    if isinstance(prq, TruePrq):
        return True
    if isinstance(prq, PrincipalConstraint):
        return subject in subjects(prq.principal)
    if isinstance(prq, ForEachMember):
        return all(
            holds(c, subject, pol_ids, member, env, mode=mode, chain_strict=chain_strict)
            for member in principals(prq.principal)
            for c in prq.constraints
        )
    if isinstance(prq, Count):
        return _count_total(env, subjects(prin_u), pol_ids) < prq.bound
    if isinstance(prq, PrinCount):
        return _count_total(env, subjects(prq.principal), pol_ids) < prq.bound
    if isinstance(prq, NotConstraint):
        return not holds(
            prq.constraint, subject, pol_ids, prin_u, env, mode=mode, chain_strict=chain_strict
        )
    if isinstance(prq, AndPrq):
        return all(
            holds(i, subject, pol_ids, prin_u, env, mode=mode, chain_strict=chain_strict)
            for i in prq.items
        )
    if isinstance(prq, OrPrq):
        return any(
            holds(i, subject, pol_ids, prin_u, env, mode=mode, chain_strict=chain_strict)
            for i in prq.items
        )
    if isinstance(prq, XorPrq):
        truths = sum(
            holds(i, subject, pol_ids, prin_u, env, mode=mode, chain_strict=chain_strict)
            for i in prq.items
        )
        return truths == 1
    if isinstance(prq, (PrePay, Attribution, InSeq, AnySeq)):
        return (
            req_holds(prq, pol_ids, env, Fraction(0), INF, mode=mode, chain_strict=chain_strict)
            is not None
        )
    if isinstance(prq, NotPolicySet):
        raise ValueError("suspended policy sets are outside the tractable fragment")
    raise TypeError(f"not a prerequisite: {prq!r}")


def req_holds(
    req: Requirement,
    pol_ids: frozenset[PolicyId],
    env: Environment,
    t_lo: Bound,
    t_hi: Bound,
    *,
    lo_strict: bool = False,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    chain_strict: bool = True,
) -> Optional[Fraction]:
    """Earliest time the requirement is fully met within the window, or None.

    Sequences are evaluated greedily: taking the earliest witness for each
    step never eliminates a satisfying schedule for the rest (shrinking a
    step's completion time only widens the next step's window), so the greedy
    chain is complete and keeps evaluation polynomial.  chain_strict makes
    successive steps' events strictly later than the previous step's witness
    (matching the translation's strictly increasing cut points); disabling it
    reproduces the looser published recursion that admits simultaneity.
    """
    if isinstance(req, PrePay):
        return paid_exists(env, req.amount, pol_ids, t_lo, t_hi, lo_strict=lo_strict)
    if isinstance(req, Attribution):
        return attributed_exists(env, req.subject, t_lo, t_hi, lo_strict=lo_strict)

    def chain(steps) -> Optional[Fraction]:
        witness: Optional[Fraction] = None
        lo, strict = t_lo, lo_strict
        for step in steps:
            witness = req_holds(
                step, pol_ids, env, lo, t_hi, lo_strict=strict, mode=mode, chain_strict=chain_strict
            )
            if witness is None:
                return None
            lo, strict = witness, chain_strict
        return witness

    if isinstance(req, InSeq):
        return chain(req.steps)
    if isinstance(req, AnySeq):
        if mode is SeqInterpretation.OVERLAPPING:
            times = [
                req_holds(
                    s, pol_ids, env, t_lo, t_hi, lo_strict=lo_strict, mode=mode,
                    chain_strict=chain_strict,
                )
                for s in req.steps
            ]
            return None if any(t is None for t in times) else max(times)
        completions = [
            c for c in (chain(perm) for perm in itertools.permutations(req.steps)) if c is not None
        ]
        return min(completions) if completions else None
    raise TypeError(f"not a requirement: {req!r}")


# --- per-agreement validity (the tractable route) -----------------------------------


def _grant_witness(
    agr: Agreement,
    subject: Subject,
    action: Action,
    asset: Asset,
    env: Environment,
    *,
    mode: SeqInterpretation,
    chain_strict: bool,
) -> Optional[GrantTuple]:
    if subject not in subjects(agr.user):
        return None
    if agr.asset != asset:
        return None
    for tup in build_index(agr.body).splus:
        if tup.action != action:
            continue
        outer = flatten_for_each_member(tup.outer_prq)
        inner = flatten_for_each_member(tup.inner_prq)
        if holds(
            outer, subject, tup.set_ids, agr.user, env, mode=mode, chain_strict=chain_strict
        ) and holds(
            inner,
            subject,
            frozenset((tup.policy_id,)),
            agr.user,
            env,
            mode=mode,
            chain_strict=chain_strict,
        ):
            return tup
    return None


def fplus_valid_single(
    agr: Agreement,
    subject: Subject,
    action: Action,
    asset: Asset,
    env: Environment,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    chain_strict: bool = True,
) -> bool:
    """Does this single agreement make the permission E-valid?"""
    if not check_consistent(env):
        return True
    return (
        _grant_witness(agr, subject, action, asset, env, mode=mode, chain_strict=chain_strict)
        is not None
    )


def fminus_valid_single(
    agr: Agreement, subject: Subject, action: Action, asset: Asset, env: Environment
) -> bool:
    """Does this single agreement make the prohibition E-valid?

    Only exclusivity forbids: the subject must be outside the user principal
    and some exclusive policy set must mention a policy with this action.
    """
    if not check_consistent(env):
        return True
    return (
        subject not in subjects(agr.user)
        and agr.asset == asset
        and action in build_index(agr.body).sminus
    )


@dataclass(frozen=True)
class _Conflict:
    forbidding: int
    granting: int
    subject: Subject
    action: Action


def _find_conflict(
    agreements: tuple[Agreement, ...],
    env: Environment,
    *,
    mode: SeqInterpretation,
    chain_strict: bool,
) -> Optional[_Conflict]:
    indexed = [(agr, build_index(agr.body)) for agr in agreements]
    for i, (agr_ex, idx_ex) in enumerate(indexed):
        if not idx_ex.sminus:
            continue
        outside = subjects(agr_ex.user)
        for j, (agr_gr, _) in enumerate(indexed):
            if agr_ex.asset != agr_gr.asset:
                continue
            candidates = sorted(subjects(agr_gr.user) - outside)
            if not candidates:
                continue
            for s in candidates:
                for act in sorted(idx_ex.sminus, key=lambda a: a.value):
                    w = _grant_witness(
                        agr_gr, s, act, agr_gr.asset, env, mode=mode, chain_strict=chain_strict
                    )
                    if w is not None:
                        return _Conflict(i, j, s, act)
    return None


def jointly_satisfiable(
    agreements: Iterable[Agreement],
    env: Environment,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    chain_strict: bool = True,
) -> bool:
    """Is the conjunction of the agreements satisfied in some E-relevant model?

    Fails iff the environment is inconsistent or some agreement exclusively
    forbids an action that another agreement validly grants to a subject
    outside the forbidding agreement's user.
    """
    agreements = tuple(agreements)
    if not check_consistent(env):
        return False
    return _find_conflict(agreements, env, mode=mode, chain_strict=chain_strict) is None


def answer_tractable(
    q: Query,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    chain_strict: bool = True,
) -> Verdict:
    if not in_fragment_q1(q.agreements):
        raise ValueError("query is outside the tractable fragment (mentions not[ps])")
    if not check_consistent(q.env):
        return Verdict(VerdictKind.INCONSISTENT, "tractable", "environment inconsistent")
    conflict = _find_conflict(q.agreements, q.env, mode=mode, chain_strict=chain_strict)
    if conflict is not None:
        return Verdict(
            VerdictKind.INCONSISTENT,
            "tractable",
            f"agreement #{conflict.forbidding + 1} exclusively forbids "
            f"{conflict.action} which agreement #{conflict.granting + 1} grants "
            f"to {conflict.subject.name}",
        )
    grant = None
    for i, agr in enumerate(q.agreements):
        w = _grant_witness(
            agr, q.subject, q.action, q.asset, q.env, mode=mode, chain_strict=chain_strict
        )
        if w is not None:
            grant = (i, w)
            break
    forbid = None
    for i, agr in enumerate(q.agreements):
        if fminus_valid_single(agr, q.subject, q.action, q.asset, q.env):
            forbid = i
            break
    if grant is not None and forbid is not None:
        # unreachable after the joint-satisfiability check; kept for the
        # four-way mapping's completeness
        return Verdict(VerdictKind.INCONSISTENT, "tractable", "grant and prohibition both valid")
    if grant is not None:
        i, w = grant
        return Verdict(
            VerdictKind.GRANTED,
            "tractable",
            f"agreement #{i + 1} grants via policy {w.policy_id.name}",
        )
    if forbid is not None:
        return Verdict(
            VerdictKind.DENIED,
            "tractable",
            f"agreement #{forbid + 1} exclusively forbids {q.action} to non-users",
        )
    return Verdict(VerdictKind.UNREGULATED, "tractable", "no agreement grants or forbids")


# --- the general route ---------------------------------------------------------------


def term_universe(q: Query) -> TermUniverse:
    """Closed terms mentioned by the query, per sort."""
    subs = {q.subject} | {f.subject for f in q.env.attributed} | {c.subject for c in q.env.counts}
    actions = {q.action}
    assets = {q.asset}
    pol_ids = {c.policy_id for c in q.env.counts}
    id_sets = {IdSet(i.name for i in f.ids) for f in q.env.paid}
    for f in q.env.paid:
        pol_ids.update(f.ids)
    for agr in q.agreements:
        subs |= collect_subjects(agr)
        actions |= collect_actions(agr)
        assets.add(agr.asset)
        pol_ids.update(collect_policy_ids(agr))
        for prim in iter_primitive_policy_sets(agr.body):
            id_sets.add(IdSet(i.name for i in ids(prim.policy)))
            for pol in iter_primitive_policies(prim.policy):
                id_sets.add(IdSet((pol.policy_id.name,)))
    times = {f.time for f in q.env.paid} | {f.time for f in q.env.attributed}
    return TermUniverse(
        subjects=tuple(Constant(s.name, Sort.SUBJECTS) for s in sorted(subs)),
        actions=tuple(Constant(a.value, Sort.ACTIONS) for a in sorted(actions, key=lambda a: a.value)),
        assets=tuple(Constant(a.name, Sort.ASSETS) for a in sorted(assets)),
        polids=tuple(Constant(i.name, Sort.POLIDS) for i in sorted(pol_ids)),
        setpolids=tuple(sorted(id_sets, key=lambda s: s.names)),
        times=tuple(RationalLit(t, Sort.TIMES) for t in sorted(times)),
    )


def query_formulas(q: Query, mode: SeqInterpretation = SeqInterpretation.OVERLAPPING):
    """The pair (f_q_plus, f_q_minus) whose E-validity decides the verdict."""
    conj = mk_and([translate_agreement(agr, mode) for agr in q.agreements])
    atom = Permitted(
        Constant(q.subject.name, Sort.SUBJECTS),
        Constant(q.action.value, Sort.ACTIONS),
        Constant(q.asset.name, Sort.ASSETS),
    )
    return Implies(conj, atom), Implies(conj, NotF(atom))


def answer_general(
    q: Query,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    max_assignments: int = 2**20,
    max_ground_nodes: int = 10**6,
) -> tuple[bool, bool]:
    """(f_q_plus E-valid?, f_q_minus E-valid?) by grounding and enumeration."""
    if not check_consistent(q.env):
        return True, True
    fplus, fminus = query_formulas(q, mode)
    universe = term_universe(q)
    bits = []
    for f in (fplus, fminus):
        grounded = ground(f, universe, max_nodes=max_ground_nodes)
        fixed = substitute_literals(grounded, q.env)
        bits.append(propositional_valid(fixed, max_assignments=max_assignments))
    return bits[0], bits[1]


def _verdict_from_bits(fplus: bool, fminus: bool, path: str, detail: str) -> Verdict:
    if fplus and fminus:
        kind = VerdictKind.INCONSISTENT
    elif fplus:
        kind = VerdictKind.GRANTED
    elif fminus:
        kind = VerdictKind.DENIED
    else:
        kind = VerdictKind.UNREGULATED
    return Verdict(kind, path, detail)


def answer(
    q: Query,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    chain_strict: bool = True,
    force_general: bool = False,
    max_assignments: int = 2**20,
    max_ground_nodes: int = 10**6,
) -> Verdict:
    """Four-way verdict, dispatching to the tractable route when possible."""
    if in_fragment_q1(q.agreements) and not force_general:
        return answer_tractable(q, mode=mode, chain_strict=chain_strict)
    fplus, fminus = answer_general(
        q, mode=mode, max_assignments=max_assignments, max_ground_nodes=max_ground_nodes
    )
    return _verdict_from_bits(
        fplus, fminus, "general", f"fplus_valid={fplus}, fminus_valid={fminus}"
    )
