"""Seeded random generators for agreements, environments, and queries.

Shared by the differential test suites and the fuzz / oracle-check commands.
Shapes are deliberately small and collision-happy (few subjects, one asset,
amounts from a short menu) so that all four verdicts show up and the oracle's
model universe stays enumerable.
"""

from __future__ import annotations

import random
import string
from fractions import Fraction
from typing import Optional

from .agreements import (
    TRUE_PRQ,
    Action,
    Agreement,
    AndPolicy,
    AndPolicySet,
    AndPrq,
    AnySeq,
    Asset,
    Attribution,
    Count,
    ForEachMember,
    Group,
    InSeq,
    NotConstraint,
    NotPolicySet,
    OrPrq,
    PolicyId,
    PrePay,
    PrimitivePolicy,
    PrimitivePolicySet,
    PrinCount,
    Principal,
    PrincipalConstraint,
    Subject,
    XorPrq,
    ids,
    iter_primitive_policies,
    iter_primitive_policy_sets,
)
from .engine import Query
from .environment import AttributedFact, CountFact, Environment, PaidFact
from .agreements import collect_policy_ids

SUBJECT_POOL = ("Alice", "Bob", "Carol", "Dave")
OUTSIDER = "Eve"
AMOUNTS = (Fraction(1), Fraction(5), Fraction(5, 2))
ACTIONS = tuple(Action)


def random_principal(rng: random.Random, depth: int = 0) -> Principal:
    if depth >= 2 or rng.random() < 0.55:
        return Subject(rng.choice(SUBJECT_POOL))
    members = [random_principal(rng, depth + 1) for _ in range(rng.randint(1, 3))]
    return Group(members)


def random_requirement(rng: random.Random, depth: int = 0):
    roll = rng.random()
    if depth >= 2 or roll < 0.35:
        return PrePay(rng.choice(AMOUNTS))
    if roll < 0.6:
        return Attribution(Subject(rng.choice(SUBJECT_POOL)))
    steps = [random_requirement(rng, depth + 1) for _ in range(rng.randint(1, 3))]
    return InSeq(steps) if roll < 0.8 else AnySeq(steps)


def random_constraint(rng: random.Random, depth: int = 0):
    roll = rng.random()
    if roll < 0.35:
        return PrincipalConstraint(random_principal(rng, 1))
    if roll < 0.6:
        return Count(rng.randint(0, 4))
    if roll < 0.85 or depth >= 1:
        return PrinCount(random_principal(rng, 1), rng.randint(0, 4))
    return ForEachMember(
        random_principal(rng, 1),
        [random_constraint(rng, depth + 1) for _ in range(rng.randint(1, 2))],
    )


class _IdAlloc:
    def __init__(self, prefix: str):
        self.prefix = prefix
        self.n = 0

    def fresh(self) -> PolicyId:
        self.n += 1
        return PolicyId(f"{self.prefix}_p{self.n}")


def random_prerequisite(
    rng: random.Random, *, allow_not_ps: bool, depth: int = 0, alloc: Optional[_IdAlloc] = None
):
    roll = rng.random()
    if depth >= 2:
        roll = min(roll, 0.69)  # leaves only
    if roll < 0.20:
        return TRUE_PRQ
    if roll < 0.45:
        return random_constraint(rng)
    if roll < 0.62:
        return random_requirement(rng)
    if roll < 0.70:
        return NotConstraint(random_constraint(rng))
    if roll < 0.93:
        items = [
            random_prerequisite(rng, allow_not_ps=allow_not_ps, depth=depth + 1, alloc=alloc)
            for _ in range(rng.randint(1, 3))
        ]
        kind = rng.choice((AndPrq, OrPrq, XorPrq))
        return kind(items)
    if allow_not_ps:
        if alloc is None:
            alloc = _IdAlloc("n")
        inner = random_policy_set(rng, alloc, allow_not_ps=False, depth=depth + 1)
        return NotPolicySet(inner)
    return random_constraint(rng)


def random_policy(rng: random.Random, alloc: _IdAlloc, *, allow_not_ps: bool, depth: int = 0):
    if depth < 1 and rng.random() < 0.25:
        return AndPolicy(
            random_policy(rng, alloc, allow_not_ps=allow_not_ps, depth=depth + 1)
            for _ in range(rng.randint(1, 2))
        )
    return PrimitivePolicy(
        random_prerequisite(rng, allow_not_ps=allow_not_ps, alloc=alloc),
        alloc.fresh(),
        rng.choice(ACTIONS),
    )


def random_policy_set(
    rng: random.Random, alloc: _IdAlloc, *, allow_not_ps: bool, depth: int = 0
):
    if depth < 1 and rng.random() < 0.25:
        return AndPolicySet(
            random_policy_set(rng, alloc, allow_not_ps=allow_not_ps, depth=depth + 1)
            for _ in range(rng.randint(1, 2))
        )
    return PrimitivePolicySet(
        random_prerequisite(rng, allow_not_ps=allow_not_ps, alloc=alloc),
        random_policy(rng, alloc, allow_not_ps=allow_not_ps),
        exclusive=rng.random() < 0.3,
    )


def random_agreement(rng: random.Random, index: int, *, allow_not_ps: bool = False) -> Agreement:
    alloc = _IdAlloc(f"a{index}")
    user = random_principal(rng)
    asset = Asset("doc" if rng.random() < 0.93 else "other")
    body = random_policy_set(rng, alloc, allow_not_ps=allow_not_ps)
    return Agreement(user, asset, body)


def _payment_candidates(agreements) -> list[tuple[Fraction, tuple[PolicyId, ...]]]:
    """(amount, id-set) pairs some requirement in the agreements could match."""
    out = []

    def scan_prq(prq, id_set):
        if isinstance(prq, PrePay):
            out.append((prq.amount, id_set))
        elif isinstance(prq, (InSeq, AnySeq)):
            for s in prq.steps:
                scan_prq(s, id_set)
        elif isinstance(prq, (AndPrq, OrPrq, XorPrq)):
            for i in prq.items:
                scan_prq(i, id_set)
        elif isinstance(prq, NotPolicySet):
            scan_ps(prq.policy_set)

    def scan_ps(ps):
        for prim in iter_primitive_policy_sets(ps):
            set_ids = tuple(sorted(ids(prim.policy)))
            scan_prq(prim.prereq, set_ids)
            for pol in iter_primitive_policies(prim.policy):
                scan_prq(pol.prereq, (pol.policy_id,))

    for agr in agreements:
        scan_ps(agr.body)
    return out


def random_environment(rng: random.Random, agreements, *, max_facts: int = 6) -> Environment:
    facts = []
    pay_candidates = _payment_candidates(agreements)
    all_ids = sorted({pid for agr in agreements for pid in collect_policy_ids(agr)})
    times = [Fraction(t) for t in range(0, 7)]
    for _ in range(rng.randint(0, max_facts)):
        roll = rng.random()
        if roll < 0.4 and pay_candidates:
            amount, id_set = rng.choice(pay_candidates)
            if rng.random() < 0.15:  # near miss: wrong amount
                amount = rng.choice(AMOUNTS)
            facts.append(PaidFact(amount, id_set, rng.choice(times)))
        elif roll < 0.55 and all_ids:
            k = rng.randint(1, min(2, len(all_ids)))
            facts.append(
                PaidFact(rng.choice(AMOUNTS), rng.sample(all_ids, k), rng.choice(times))
            )
        elif roll < 0.75:
            facts.append(
                AttributedFact(Subject(rng.choice(SUBJECT_POOL)), rng.choice(times))
            )
        elif all_ids:
            facts.append(
                CountFact(
                    Subject(rng.choice(SUBJECT_POOL)), rng.choice(all_ids), rng.randint(0, 3)
                )
            )
    env = Environment.from_facts(facts)
    if rng.random() < 0.03 and all_ids:
        # occasional inconsistent environment
        s = Subject(rng.choice(SUBJECT_POOL))
        pid = rng.choice(all_ids)
        env = Environment(
            env.paid, env.attributed,
            env.counts + (CountFact(s, pid, 7), CountFact(s, pid, 8)),
        )
    return env


def random_query(
    rng: random.Random,
    *,
    allow_not_ps: bool = False,
    max_agreements: int = 3,
    max_facts: int = 6,
) -> Query:
    n = rng.choices(range(0, max_agreements + 1), weights=[1] + [8] * max_agreements)[0]
    agreements = tuple(
        random_agreement(rng, i + 1, allow_not_ps=allow_not_ps) for i in range(n)
    )
    env = random_environment(rng, agreements, max_facts=max_facts)
    subject = Subject(OUTSIDER if rng.random() < 0.2 else rng.choice(SUBJECT_POOL))
    asset = Asset("doc" if rng.random() < 0.95 else "other")
    return Query(agreements, subject, rng.choice(ACTIONS), asset, env)


def random_token_soup(rng: random.Random, max_tokens: int = 40) -> str:
    """Arbitrary token streams for parser robustness fuzzing."""
    pieces = []
    vocab = (
        "agreement for about with and or xor not true count forEachMember prePay "
        "attribution inSeq anySeq play print display may Alice Bob { } [ ] ( ) , ; "
        "--> |-> ==> ==>_id < > 5 5.00 11/2 0"
    ).split()
    for _ in range(rng.randint(0, max_tokens)):
        if rng.random() < 0.9:
            pieces.append(rng.choice(vocab))
        else:
            pieces.append(
                "".join(rng.choice(string.printable[:70]) for _ in range(rng.randint(1, 5)))
            )
    return " ".join(pieces)
