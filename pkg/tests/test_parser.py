import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odrleval.agreements import (
    TRUE_PRQ,
    Action,
    AndPolicy,
    AndPrq,
    Asset,
    Count,
    Group,
    InSeq,
    PolicyId,
    PrimitivePolicy,
    PrimitivePolicySet,
    PrinCount,
    PrincipalConstraint,
    Subject,
)
from odrleval.gen import random_agreement, random_token_soup
from odrleval.parser import (
    DslParseError,
    parse_agreement,
    parse_agreements,
    parse_query,
    pretty,
)

from conftest import load_example, load_examples

ALICE = Subject("Alice")
BOB = Subject("Bob")


class TestParseAgreement:
    def test_example_shared_print_budget(self):
        agr = load_example("ex21")
        assert agr.user == Group([ALICE, BOB])
        assert agr.asset == Asset("The_Report")
        body = agr.body
        assert isinstance(body, PrimitivePolicySet)
        assert body.prereq == TRUE_PRQ and not body.exclusive
        assert isinstance(body.policy, AndPolicy)
        p1, p2 = body.policy.policies
        assert p1 == PrimitivePolicy(Count(5), PolicyId("id1"), Action.PRINT)
        assert p2 == PrimitivePolicy(
            AndPrq([PrincipalConstraint(ALICE), Count(2)]), PolicyId("id2"), Action.PRINT
        )

    def test_bare_action_abbreviation(self):
        agr = parse_agreement("agreement for Alice about f with print")
        assert agr.body == PrimitivePolicySet(
            TRUE_PRQ, PrimitivePolicy(TRUE_PRQ, PolicyId("agr1_p1"), Action.PRINT)
        )

    def test_exclusive_arrow(self):
        agr = load_example("ex26")
        assert isinstance(agr.body, PrimitivePolicySet)
        assert agr.body.exclusive
        assert isinstance(agr.body.prereq, InSeq)

    def test_multiple_agreements_per_file(self):
        agrs = load_examples("ex43")
        assert len(agrs) == 2
        assert agrs[0].user == ALICE and agrs[1].user == BOB
        assert agrs[1].body.exclusive

    def test_auto_ids_skip_explicit_collisions(self):
        agr = parse_agreement(
            "agreement for Alice about f with and[print, count[1] ==>_agr1_p1 display]"
        )
        pids = {p.policy_id.name for p in agr.body.policy.policies}
        assert pids == {"agr1_p1", "agr1_p2"}

    def test_duplicate_explicit_id_rejected(self):
        with pytest.raises(DslParseError, match="duplicate policy id"):
            parse_agreement(
                "agreement for Alice about f with and[true ==>_id print, true ==>_id display]"
            )

    def test_prin_count_postfix(self):
        agr = load_example("ex23")
        policy = agr.body.policy
        assert policy.prereq == PrinCount(ALICE, 1)


class TestParseQuery:
    def test_direct_mapping(self):
        assert parse_query("may Alice play latestJingle") == (
            ALICE, Action.PLAY, Asset("latestJingle"),
        )

    def test_example_query_terms(self):
        assert parse_query("may Charlie print file") == (
            Subject("Charlie"), Action.PRINT, Asset("file"),
        )

    def test_unknown_action(self):
        with pytest.raises(DslParseError, match="unknown action"):
            parse_query("may Alice dance f")


class TestPretty:
    def test_single_use_print_agreement(self):
        assert pretty(load_example("ex23")) == (
            "agreement for {Alice, Bob} about The_Report "
            "with true --> (Alice<count[1]> ==>_id print)"
        )

    def test_fixpoint_after_one_cycle(self, data_dir):
        text = (data_dir / "ex25.odrl").read_text()
        once = pretty(parse_agreement(text))
        assert pretty(parse_agreement(once)) == once

    def test_group_canonical_order(self):
        agr = parse_agreement("agreement for {Bob, Alice} about f with print")
        assert pretty(agr).startswith("agreement for {Alice, Bob} ")


class TestDiagnostics:
    def test_syntax_error_has_span_inside_input(self):
        text = "agreement for Alice about f with -->"
        with pytest.raises(DslParseError) as exc:
            parse_agreement(text)
        span = exc.value.diagnostics[0].span
        assert 0 <= span.start <= span.end <= len(text)
        assert span.line >= 1 and span.column >= 1

    def test_count_bound_must_be_natural(self):
        with pytest.raises(DslParseError, match="natural"):
            parse_agreement("agreement for Alice about f with count[2.5] --> print")

    def test_reserved_word_as_subject(self):
        with pytest.raises(DslParseError, match="reserved"):
            parse_agreement("agreement for count about f with print")

    def test_error_recovery_reports_both_agreements(self):
        text = (
            "agreement for Alice about f with dance\n"
            "agreement for Bob about g with or[true]\n"
        )
        with pytest.raises(DslParseError) as exc:
            parse_agreements(text)
        assert len(exc.value.diagnostics) == 2


agreement_st = st.builds(
    lambda seed, with_not: random_agreement(random.Random(seed), 1, allow_not_ps=with_not),
    st.integers(0, 2**32 - 1),
    st.booleans(),
)


@given(agreement_st)
@settings(max_examples=400, deadline=None)
def test_round_trip(agr):
    text = pretty(agr)
    reparsed = parse_agreement(text)
    assert reparsed == agr
    assert pretty(reparsed) == text


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=300, deadline=None)
def test_token_soup_never_crashes(seed):
    soup = random_token_soup(random.Random(seed))
    try:
        parse_agreements(soup)
    except DslParseError:
        pass
