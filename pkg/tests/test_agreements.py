import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odrleval.agreements import (
    TRUE_PRQ,
    Action,
    Agreement,
    AndPolicy,
    AndPrq,
    Asset,
    Count,
    Group,
    NotPolicySet,
    PolicyId,
    PrePay,
    PrimitivePolicy,
    PrimitivePolicySet,
    PrincipalConstraint,
    Subject,
    ids,
    in_fragment_q1,
    principals,
    subjects,
)
from odrleval.gen import random_agreement, random_principal

from conftest import load_example

ALICE = Subject("Alice")
BOB = Subject("Bob")
CHARLIE = Subject("Charlie")


def prim(prq, pid, act=Action.PRINT):
    return PrimitivePolicy(prq, PolicyId(pid), act)


class TestSubjects:
    def test_single_subject(self):
        assert subjects(ALICE) == {ALICE}

    def test_flat_group(self):
        assert subjects(Group([ALICE, BOB])) == {ALICE, BOB}

    def test_nested_group_flattens(self):
        prin = Group([Group([ALICE]), Group([ALICE, BOB])])
        assert subjects(prin) == {ALICE, BOB}


class TestPrincipals:
    def test_single_subject(self):
        assert principals(ALICE) == {ALICE}

    def test_flat_group(self):
        assert principals(Group([ALICE, BOB])) == {ALICE, BOB}

    def test_nested_group_keeps_members(self):
        inner = Group([ALICE, BOB])
        prin = Group([inner, CHARLIE])
        assert principals(prin) == {inner, CHARLIE}


class TestIds:
    def test_primitive(self):
        assert ids(prim(Count(5), "id1")) == {PolicyId("id1")}

    def test_conjunction(self):
        p = AndPolicy([prim(TRUE_PRQ, "id1"), prim(TRUE_PRQ, "id2")])
        assert ids(p) == {PolicyId("id1"), PolicyId("id2")}

    def test_nested_conjunction(self):
        p = AndPolicy([AndPolicy([prim(TRUE_PRQ, "id1")]), prim(TRUE_PRQ, "id2")])
        assert ids(p) == {PolicyId("id1"), PolicyId("id2")}


class TestFragmentQ1:
    def test_example_agreement_without_suspension(self):
        assert in_fragment_q1([load_example("ex25")])

    def test_empty_set(self):
        assert in_fragment_q1([])

    def test_suspended_policy_set_detected(self):
        inner = PrimitivePolicySet(TRUE_PRQ, prim(TRUE_PRQ, "q1"))
        agr = Agreement(
            ALICE,
            Asset("f"),
            PrimitivePolicySet(NotPolicySet(inner), prim(TRUE_PRQ, "q2")),
        )
        assert not in_fragment_q1([agr])


class TestInvariants:
    def test_group_normalizes_order_and_duplicates(self):
        assert Group([BOB, ALICE, BOB]) == Group([ALICE, BOB])

    def test_group_nonempty(self):
        with pytest.raises(ValueError):
            Group([])

    def test_count_bound_natural(self):
        with pytest.raises(ValueError):
            Count(-1)

    def test_prepay_nonnegative(self):
        with pytest.raises(ValueError):
            PrePay(-1)

    def test_duplicate_policy_id_in_one_agreement_rejected(self):
        body = PrimitivePolicySet(
            TRUE_PRQ, AndPolicy([prim(TRUE_PRQ, "id"), prim(Count(1), "id")])
        )
        with pytest.raises(ValueError, match="duplicate policy id"):
            Agreement(ALICE, Asset("f"), body)

    def test_duplicate_id_inside_suspended_set_rejected(self):
        inner = PrimitivePolicySet(TRUE_PRQ, prim(TRUE_PRQ, "id"))
        body = PrimitivePolicySet(
            AndPrq([PrincipalConstraint(ALICE), NotPolicySet(inner)]),
            prim(TRUE_PRQ, "id", Action.DISPLAY),
        )
        with pytest.raises(ValueError, match="duplicate policy id"):
            Agreement(ALICE, Asset("f"), body)


principal_st = st.builds(
    lambda seed: random_principal(random.Random(seed)), st.integers(0, 2**32 - 1)
)


@given(principal_st)
@settings(max_examples=300, deadline=None)
def test_subjects_idempotent_under_wrapping(prin):
    assert subjects(Group([prin])) == subjects(prin)


@given(principal_st)
@settings(max_examples=300, deadline=None)
def test_subjects_is_union_over_principals(prin):
    union = frozenset().union(*(subjects(m) for m in principals(prin)))
    assert subjects(prin) == union


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_ids_distributes_over_policy_conjunction(seed):
    rng = random.Random(seed)
    p1 = _first_policy(random_agreement(rng, 1))
    p2 = _first_policy(random_agreement(rng, 2))
    assert ids(AndPolicy([p1, p2])) == ids(p1) | ids(p2)


def _first_policy(agr):
    from odrleval.agreements import iter_primitive_policy_sets

    return next(iter_primitive_policy_sets(agr.body)).policy
