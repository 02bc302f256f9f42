from fractions import Fraction

import pytest

from odrleval.agreements import PolicyId, Subject
from odrleval.environment import (
    EMPTY_ENVIRONMENT,
    AttributedFact,
    CountFact,
    Environment,
    PaidFact,
    attributed_exists,
    check_consistent,
    format_environment,
    lookup_count,
    paid_exists,
    parse_environment,
)

ALICE = Subject("Alice")
BOB = Subject("Bob")
ID = PolicyId("id")
INF = float("inf")


def count(s, pid, n):
    return CountFact(s, PolicyId(pid), n)


class TestConsistency:
    def test_empty(self):
        assert check_consistent(EMPTY_ENVIRONMENT)

    def test_conflicting_counts(self):
        env = Environment(counts=[count(ALICE, "id", 2), count(ALICE, "id", 3)])
        assert not check_consistent(env)

    def test_duplicate_equal_counts_fine(self):
        env = Environment(counts=[count(ALICE, "id", 2), count(ALICE, "id", 2)])
        assert check_consistent(env)


class TestLookupCount:
    def test_stored(self):
        env = Environment(counts=[count(ALICE, "id1", 4)])
        assert lookup_count(env, ALICE, PolicyId("id1")) == 4

    def test_closed_world_default(self):
        assert lookup_count(EMPTY_ENVIRONMENT, BOB, PolicyId("id9")) == 0

    def test_after_one_use(self):
        # Alice printed once under the single-use policy; Bob has not
        env = Environment(counts=[count(ALICE, "id", 1)])
        assert lookup_count(env, ALICE, ID) == 1
        assert lookup_count(env, BOB, ID) == 0


class TestPaidExists:
    def test_single_fact(self):
        env = Environment(paid=[PaidFact(5, [ID], 3)])
        assert paid_exists(env, 5, [ID], 0, INF) == 3

    def test_closed_world(self):
        assert paid_exists(EMPTY_ENVIRONMENT, 5, [ID], 0, INF) is None

    def test_filter_then_min(self):
        env = Environment(paid=[PaidFact(5, [ID], 3), PaidFact(5, [ID], 1)])
        assert paid_exists(env, 5, [ID], 2, INF) == 3

    def test_upper_bound_exclusive(self):
        env = Environment(paid=[PaidFact(5, [ID], 3)])
        assert paid_exists(env, 5, [ID], 0, 3) is None
        assert paid_exists(env, 5, [ID], 3, INF) == 3

    def test_strict_lower_bound(self):
        env = Environment(paid=[PaidFact(5, [ID], 3)])
        assert paid_exists(env, 5, [ID], 3, INF, lo_strict=True) is None


class TestAttributedExists:
    def test_single_fact(self):
        env = Environment(attributed=[AttributedFact(Subject("Charlie"), 4)])
        assert attributed_exists(env, Subject("Charlie"), 0, INF) == 4

    def test_absent_subject(self):
        env = Environment(attributed=[AttributedFact(Subject("Charlie"), 4)])
        assert attributed_exists(env, Subject("Dana"), 0, INF) is None

    def test_window_filter(self):
        env = Environment(
            attributed=[AttributedFact(Subject("C"), 2), AttributedFact(Subject("C"), 5)]
        )
        assert attributed_exists(env, Subject("C"), 3, 6) == 5


class TestTextFormat:
    def test_round_trip(self):
        text = "paid 5 {id1,id2} @ 1\nattributed Charlie @ 2\ncount Alice id1 = 3\n"
        env = parse_environment(text)
        assert parse_environment(format_environment(env)) == env

    def test_fraction_amounts_and_times(self):
        env = parse_environment("paid 5.00 {id} @ 1/2\n")
        fact = next(iter(env.paid))
        assert fact.amount == 5 and fact.time == Fraction(1, 2)

    def test_comments_and_blanks(self):
        env = parse_environment("# nothing\n\ncount Alice id = 1  # trailing\n")
        assert lookup_count(env, ALICE, ID) == 1

    def test_bad_line_reports_number(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_environment("count Alice id = 1\npaid five {id} @ 1\n")

    def test_duplicate_paid_facts_deduplicated(self):
        env = parse_environment("paid 5 {id} @ 1\npaid 5 {id} @ 1\n")
        assert len(env.paid) == 1

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            PaidFact(-1, [ID], 0)
        with pytest.raises(ValueError):
            AttributedFact(ALICE, -2)
