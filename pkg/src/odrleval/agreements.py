"""Core AST for ODRL-style agreements.

An agreement binds a user principal and an asset to a policy set; policy
sets guard policies behind prerequisites (constraints, requirements,
conditions).  Every node is a frozen dataclass: values compare structurally,
hash, and can be shared freely across concurrent query evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, TypeAlias, Union


def cached_hash(cls):
    """Memoize a frozen dataclass's structural hash on the instance.

    AST and formula values are deeply nested and used as dict keys in hot
    loops; recomputing the recursive hash per lookup dominates otherwise.
    """
    generated = cls.__hash__

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = generated(self)
            object.__setattr__(self, "_h", h)
        return h

    cls.__hash__ = __hash__
    return cls


class Action(Enum):
    """Closed action vocabulary."""

    PLAY = "play"
    PRINT = "print"
    DISPLAY = "display"

    def __str__(self) -> str:
        return self.value


ACTION_NAMES = {a.value: a for a in Action}


@dataclass(frozen=True, order=True)
class Subject:
    """An atomic agent, identified by a case-sensitive name."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("subject name must be nonempty")


@dataclass(frozen=True, order=True)
class Asset:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("asset name must be nonempty")


@dataclass(frozen=True, order=True)
class PolicyId:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("policy id must be nonempty")


def principal_key(prin: "Principal"):
    """Stable sort key: subjects before groups, then recursively by name."""
    if isinstance(prin, Subject):
        return (0, prin.name)
    return (1, tuple(principal_key(m) for m in prin.members))


@dataclass(frozen=True)
class Group:
    """A nonempty set of principals, stored in canonical sorted order."""

    members: tuple["Principal", ...]

    def __init__(self, members: Iterable["Principal"]):
        canon = tuple(sorted(set(members), key=principal_key))
        if not canon:
            raise ValueError("groups must be nonempty")
        object.__setattr__(self, "members", canon)


Principal: TypeAlias = Union[Subject, Group]


# --- requirements: facts the user can bring about ---------------------------


@dataclass(frozen=True)
class PrePay:
    amount: Fraction

    def __post_init__(self):
        object.__setattr__(self, "amount", Fraction(self.amount))
        if self.amount < 0:
            raise ValueError("prepayment amount must be nonnegative")


@dataclass(frozen=True)
class Attribution:
    subject: Subject


@dataclass(frozen=True)
class InSeq:
    """Requirements that must be met in order."""

    steps: tuple["Requirement", ...]

    def __init__(self, steps: Iterable["Requirement"]):
        steps = tuple(steps)
        if not steps:
            raise ValueError("inSeq needs at least one requirement")
        object.__setattr__(self, "steps", steps)


@dataclass(frozen=True)
class AnySeq:
    """Requirements that may be met in any order."""

    steps: tuple["Requirement", ...]

    def __init__(self, steps: Iterable["Requirement"]):
        steps = tuple(steps)
        if not steps:
            raise ValueError("anySeq needs at least one requirement")
        object.__setattr__(self, "steps", steps)


Requirement: TypeAlias = Union[PrePay, Attribution, InSeq, AnySeq]


# --- constraints: facts outside the user's influence ------------------------


@dataclass(frozen=True)
class PrincipalConstraint:
    """Holds of a subject iff it is one of the principal's subjects."""

    principal: Principal


@dataclass(frozen=True)
class Count:
    """Total uses of the governed policies stay below the bound."""

    bound: int

    def __post_init__(self):
        if not isinstance(self.bound, int) or isinstance(self.bound, bool) or self.bound < 0:
            raise ValueError("count bound must be a natural number")


@dataclass(frozen=True)
class PrinCount:
    """Like Count, but charged against prin's subjects instead of the user's."""

    principal: Principal
    bound: int

    def __post_init__(self):
        if not isinstance(self.bound, int) or isinstance(self.bound, bool) or self.bound < 0:
            raise ValueError("count bound must be a natural number")


@dataclass(frozen=True)
class ForEachMember:
    """Every member of the principal must satisfy every listed constraint."""

    principal: Principal
    constraints: tuple["Constraint", ...]

    def __init__(self, principal: Principal, constraints: Iterable["Constraint"]):
        constraints = tuple(constraints)
        if not constraints:
            raise ValueError("forEachMember needs at least one constraint")
        object.__setattr__(self, "principal", principal)
        object.__setattr__(self, "constraints", constraints)


Constraint: TypeAlias = Union[PrincipalConstraint, ForEachMember, Count, PrinCount]


# --- prerequisites ----------------------------------------------------------


@dataclass(frozen=True)
class TruePrq:
    """The prerequisite that always holds."""


TRUE_PRQ = TruePrq()


@dataclass(frozen=True)
class NotPolicySet:
    """Suspending policy set: holds iff the policy set's translation is false.

    The one construct outside the tractable fragment.
    """

    policy_set: "PolicySet"


@dataclass(frozen=True)
class NotConstraint:
    constraint: Constraint


def _nonempty(items, what: str):
    items = tuple(items)
    if not items:
        raise ValueError(f"{what} needs at least one operand")
    return items


@dataclass(frozen=True)
class AndPrq:
    items: tuple["Prerequisite", ...]

    def __init__(self, items: Iterable["Prerequisite"]):
        object.__setattr__(self, "items", _nonempty(items, "and"))


@dataclass(frozen=True)
class OrPrq:
    items: tuple["Prerequisite", ...]

    def __init__(self, items: Iterable["Prerequisite"]):
        object.__setattr__(self, "items", _nonempty(items, "or"))


@dataclass(frozen=True)
class XorPrq:
    items: tuple["Prerequisite", ...]

    def __init__(self, items: Iterable["Prerequisite"]):
        object.__setattr__(self, "items", _nonempty(items, "xor"))


Prerequisite: TypeAlias = Union[
    TruePrq, Constraint, Requirement, NotPolicySet, NotConstraint, AndPrq, OrPrq, XorPrq
]


# --- policies and policy sets -----------------------------------------------


@dataclass(frozen=True)
class PrimitivePolicy:
    """prq ==>_id act: the id anchors usage counting."""

    prereq: Prerequisite
    policy_id: PolicyId
    action: Action


@dataclass(frozen=True)
class AndPolicy:
    policies: tuple["Policy", ...]

    def __init__(self, policies: Iterable["Policy"]):
        object.__setattr__(self, "policies", _nonempty(policies, "policy conjunction"))


Policy: TypeAlias = Union[PrimitivePolicy, AndPolicy]


@dataclass(frozen=True)
class PrimitivePolicySet:
    """prq --> p, or prq |-> p when exclusive.

    The exclusive form additionally forbids every subject outside the
    agreement's user from the actions the policy mentions.
    """

    prereq: Prerequisite
    policy: Policy
    exclusive: bool = False


@dataclass(frozen=True)
class AndPolicySet:
    sets: tuple["PolicySet", ...]

    def __init__(self, sets: Iterable["PolicySet"]):
        object.__setattr__(self, "sets", _nonempty(sets, "policy set conjunction"))


PolicySet: TypeAlias = Union[PrimitivePolicySet, AndPolicySet]


@dataclass(frozen=True)
class Agreement:
    user: Principal
    asset: Asset
    body: PolicySet

    def __post_init__(self):
        seen = set()
        for pid in collect_policy_ids(self):
            if pid in seen:
                raise ValueError(f"duplicate policy id {pid.name!r} within one agreement")
            seen.add(pid)


for _cls in (
    Subject, Asset, PolicyId, Group, PrePay, Attribution, InSeq, AnySeq,
    PrincipalConstraint, Count, PrinCount, ForEachMember, TruePrq, NotPolicySet,
    NotConstraint, AndPrq, OrPrq, XorPrq, PrimitivePolicy, AndPolicy,
    PrimitivePolicySet, AndPolicySet, Agreement,
):
    cached_hash(_cls)


# --- auxiliary functions ----------------------------------------------------


@lru_cache(maxsize=None)
def subjects(prin: Principal) -> frozenset[Subject]:
    """All subjects appearing anywhere in a principal."""
    if isinstance(prin, Subject):
        return frozenset((prin,))
    out: set[Subject] = set()
    for m in prin.members:
        out |= subjects(m)
    return frozenset(out)


def principals(prin: Principal) -> frozenset[Principal]:
    """Immediate members of a principal; a subject is its own singleton."""
    if isinstance(prin, Subject):
        return frozenset((prin,))
    return frozenset(prin.members)


def sorted_subjects(prin: Principal) -> tuple[Subject, ...]:
    return tuple(sorted(subjects(prin)))


def sorted_principals(prin: Principal) -> tuple[Principal, ...]:
    return tuple(sorted(principals(prin), key=principal_key))


def ids(policy: Policy) -> frozenset[PolicyId]:
    """Identifiers of every primitive policy mentioned in a policy."""
    if isinstance(policy, PrimitivePolicy):
        return frozenset((policy.policy_id,))
    out: set[PolicyId] = set()
    for p in policy.policies:
        out |= ids(p)
    return frozenset(out)


def iter_primitive_policy_sets(ps: PolicySet) -> Iterator[PrimitivePolicySet]:
    """Primitive policy sets under and-nesting (not inside prerequisites)."""
    if isinstance(ps, PrimitivePolicySet):
        yield ps
    else:
        for sub in ps.sets:
            yield from iter_primitive_policy_sets(sub)


def iter_primitive_policies(policy: Policy) -> Iterator[PrimitivePolicy]:
    if isinstance(policy, PrimitivePolicy):
        yield policy
    else:
        for p in policy.policies:
            yield from iter_primitive_policies(p)


def _iter_prq_nodes(prq: Prerequisite) -> Iterator[Prerequisite]:
    """Deep walk of a prerequisite, descending into suspended policy sets."""
    yield prq
    if isinstance(prq, (AndPrq, OrPrq, XorPrq)):
        for item in prq.items:
            yield from _iter_prq_nodes(item)
    elif isinstance(prq, NotConstraint):
        yield from _iter_prq_nodes(prq.constraint)
    elif isinstance(prq, ForEachMember):
        for c in prq.constraints:
            yield from _iter_prq_nodes(c)
    elif isinstance(prq, NotPolicySet):
        yield from iter_all_prerequisites(prq.policy_set)


def iter_all_prerequisites(ps: PolicySet) -> Iterator[Prerequisite]:
    """Every prerequisite node reachable from a policy set, however nested."""
    for prim in iter_primitive_policy_sets(ps):
        yield from _iter_prq_nodes(prim.prereq)
        for pol in iter_primitive_policies(prim.policy):
            yield from _iter_prq_nodes(pol.prereq)


def _iter_policies_deep(ps: PolicySet) -> Iterator[PrimitivePolicy]:
    """Primitive policies including those inside suspended policy sets."""
    for prim in iter_primitive_policy_sets(ps):
        yield from iter_primitive_policies(prim.policy)
    for prq in iter_all_prerequisites(ps):
        if isinstance(prq, NotPolicySet):
            for inner in iter_primitive_policy_sets(prq.policy_set):
                yield from iter_primitive_policies(inner.policy)


def collect_policy_ids(agr: Agreement) -> list[PolicyId]:
    """All ids mentioned by an agreement, duplicates preserved."""
    return [p.policy_id for p in _iter_policies_deep(agr.body)]


def collect_subjects(agr: Agreement) -> frozenset[Subject]:
    """Every subject constant an agreement mentions."""
    out: set[Subject] = set(subjects(agr.user))
    for prq in iter_all_prerequisites(agr.body):
        if isinstance(prq, PrincipalConstraint):
            out |= subjects(prq.principal)
        elif isinstance(prq, ForEachMember):
            out |= subjects(prq.principal)
        elif isinstance(prq, PrinCount):
            out |= subjects(prq.principal)
        elif isinstance(prq, Attribution):
            out.add(prq.subject)
        elif isinstance(prq, NotPolicySet):
            # the suspended set is evaluated against the enclosing user
            pass
    return frozenset(out)


def collect_actions(agr: Agreement) -> frozenset[Action]:
    return frozenset(p.action for p in _iter_policies_deep(agr.body))


def in_fragment_q1(agreements: Iterable[Agreement]) -> bool:
    """True iff no agreement mentions a suspended policy set (not[ps])."""
    return not any(
        isinstance(prq, NotPolicySet)
        for agr in agreements
        for prq in iter_all_prerequisites(agr.body)
    )
