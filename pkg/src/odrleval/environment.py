"""Ground fact store: payments, attributions, and usage counts.

An environment is a conjunction of positive ground facts evaluated under a
closed-world assumption: a missing payment or attribution is false, and a
missing count is zero.  Environments are immutable; "updating" usage counts
between queries means building a new environment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from .agreements import PolicyId, Subject

Bound = Union[Fraction, float]  # a time bound: an exact rational, or float inf


@dataclass(frozen=True)
class PaidFact:
    """An amount paid towards the policies in ids at a point in time."""

    amount: Fraction
    ids: tuple[PolicyId, ...]
    time: Fraction

    def __init__(self, amount, ids: Iterable[PolicyId], time):
        amount = Fraction(amount)
        time = Fraction(time)
        if amount < 0:
            raise ValueError("paid amount must be nonnegative")
        if time < 0:
            raise ValueError("fact timestamps must be nonnegative")
        object.__setattr__(self, "amount", amount)
        object.__setattr__(self, "ids", tuple(sorted(set(ids))))
        object.__setattr__(self, "time", time)


@dataclass(frozen=True)
class AttributedFact:
    subject: Subject
    time: Fraction

    def __init__(self, subject: Subject, time):
        time = Fraction(time)
        if time < 0:
            raise ValueError("fact timestamps must be nonnegative")
        object.__setattr__(self, "subject", subject)
        object.__setattr__(self, "time", time)


@dataclass(frozen=True)
class CountFact:
    """count(subject, policy_id) = value."""

    subject: Subject
    policy_id: PolicyId
    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or isinstance(self.value, bool) or self.value < 0:
            raise ValueError("count values must be natural numbers")


Fact = Union[PaidFact, AttributedFact, CountFact]


@dataclass(frozen=True)
class Environment:
    paid: frozenset[PaidFact] = frozenset()
    attributed: frozenset[AttributedFact] = frozenset()
    counts: tuple[CountFact, ...] = ()

    def __init__(self, paid=(), attributed=(), counts=()):
        object.__setattr__(self, "paid", frozenset(paid))
        object.__setattr__(self, "attributed", frozenset(attributed))
        # identical duplicates impose nothing; keep conflicting ones for the
        # consistency check
        object.__setattr__(
            self,
            "counts",
            tuple(sorted(set(counts), key=lambda c: (c.subject, c.policy_id, c.value))),
        )

    @staticmethod
    def from_facts(facts: Iterable[Fact]) -> "Environment":
        paid, attributed, counts = [], [], []
        for f in facts:
            if isinstance(f, PaidFact):
                paid.append(f)
            elif isinstance(f, AttributedFact):
                attributed.append(f)
            elif isinstance(f, CountFact):
                counts.append(f)
            else:
                raise TypeError(f"not a fact: {f!r}")
        return Environment(paid, attributed, counts)


EMPTY_ENVIRONMENT = Environment()


def check_consistent(env: Environment) -> bool:
    """False iff two conjuncts give the same (subject, id) different counts."""
    seen: dict[tuple[Subject, PolicyId], int] = {}
    for c in env.counts:
        key = (c.subject, c.policy_id)
        if key in seen and seen[key] != c.value:
            return False
        seen[key] = c.value
    return True


def lookup_count(env: Environment, subject: Subject, policy_id: PolicyId) -> int:
    """Stored count, defaulting to zero.  Assumes a consistent environment."""
    for c in env.counts:
        if c.subject == subject and c.policy_id == policy_id:
            return c.value
    return 0


def _in_window(t: Fraction, lo: Bound, hi: Bound, lo_strict: bool) -> bool:
    if lo_strict:
        if not lo < t:
            return False
    elif not lo <= t:
        return False
    return t < hi


def paid_exists(
    env: Environment,
    amount: Fraction,
    ids: Iterable[PolicyId],
    t_lo: Bound,
    t_hi: Bound,
    *,
    lo_strict: bool = False,
) -> Optional[Fraction]:
    """Earliest time of a payment fact matching amount and id-set exactly,
    within the half-open window [t_lo, t_hi) (lower bound open when lo_strict).
    """
    amount = Fraction(amount)
    ids = tuple(sorted(set(ids)))
    hits = [
        f.time
        for f in env.paid
        if f.amount == amount and f.ids == ids and _in_window(f.time, t_lo, t_hi, lo_strict)
    ]
    return min(hits) if hits else None


def attributed_exists(
    env: Environment,
    subject: Subject,
    t_lo: Bound,
    t_hi: Bound,
    *,
    lo_strict: bool = False,
) -> Optional[Fraction]:
    """Earliest time the subject was acknowledged within the window."""
    hits = [
        f.time
        for f in env.attributed
        if f.subject == subject and _in_window(f.time, t_lo, t_hi, lo_strict)
    ]
    return min(hits) if hits else None


# --- text format ----------------------------------------------------------------
#
#   paid <amount> {id,...} @ <time>
#   attributed <subject> @ <time>
#   count <subject> <id> = <n>
#
# One fact per line; blank lines and '#' comments are ignored.

_IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
_RAT = r"\d+(?:\.\d+|/\d+)?"
_PAID_RE = re.compile(rf"^paid\s+({_RAT})\s+\{{([^}}]*)\}}\s+@\s+({_RAT})$")
_ATTR_RE = re.compile(rf"^attributed\s+({_IDENT})\s+@\s+({_RAT})$")
_COUNT_RE = re.compile(rf"^count\s+({_IDENT})\s+({_IDENT})\s*=\s*(\d+)$")


def _parse_rational(text: str) -> Fraction:
    return Fraction(text)


def parse_environment(text: str) -> Environment:
    facts: list[Fact] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _PAID_RE.match(line):
            names = [n.strip() for n in m.group(2).split(",") if n.strip()]
            if not names:
                raise ValueError(f"line {lineno}: paid fact needs at least one policy id")
            facts.append(
                PaidFact(_parse_rational(m.group(1)), (PolicyId(n) for n in names),
                         _parse_rational(m.group(3)))
            )
        elif m := _ATTR_RE.match(line):
            facts.append(AttributedFact(Subject(m.group(1)), _parse_rational(m.group(2))))
        elif m := _COUNT_RE.match(line):
            facts.append(CountFact(Subject(m.group(1)), PolicyId(m.group(2)), int(m.group(3))))
        else:
            raise ValueError(f"line {lineno}: unrecognized fact: {line!r}")
    return Environment.from_facts(facts)


def _fmt_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def format_environment(env: Environment) -> str:
    lines = []
    for f in sorted(env.paid, key=lambda f: (f.time, f.amount, f.ids)):
        ids = ",".join(i.name for i in f.ids)
        lines.append(f"paid {_fmt_rational(f.amount)} {{{ids}}} @ {_fmt_rational(f.time)}")
    for f in sorted(env.attributed, key=lambda f: (f.time, f.subject)):
        lines.append(f"attributed {f.subject.name} @ {_fmt_rational(f.time)}")
    for c in env.counts:
        lines.append(f"count {c.subject.name} {c.policy_id.name} = {c.value}")
    return "\n".join(lines) + ("\n" if lines else "")
