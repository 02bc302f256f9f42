"""3-SAT to permission-query reduction, plus a truth-table oracle.

Each clause of a 3-CNF becomes one agreement granting `display` to s0 under
three prerequisites, one per literal: a positive literal over variable k
becomes "s0 and the policy set (s_k => print) does NOT hold"; a negative
literal wraps the suspension in xor[true, .], flipping its polarity.  The
formula is satisfiable exactly when the permission does NOT necessarily
follow, so the reduction exercises the general decision route and witnesses
why suspended policy sets make query answering NP-hard.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Tuple

from .agreements import (
    TRUE_PRQ,
    Action,
    Agreement,
    AndPrq,
    Asset,
    Group,
    NotPolicySet,
    PolicyId,
    PrimitivePolicy,
    PrimitivePolicySet,
    PrincipalConstraint,
    Subject,
    XorPrq,
    in_fragment_q1,
)
from .engine import Query
from .environment import EMPTY_ENVIRONMENT

Literal = Tuple[int, bool]  # (1-based variable index, polarity)


@dataclass(frozen=True)
class Cnf3:
    """A 3-CNF with no valid clauses (no clause mentions P and not-P)."""

    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]

    def __init__(self, num_vars: int, clauses: Iterable[Iterable[Literal]]):
        clauses = tuple(tuple(c) for c in clauses)
        if num_vars < 0:
            raise ValueError("variable count must be nonnegative")
        for c in clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c!r} does not have exactly 3 literals")
            seen: dict[int, bool] = {}
            for var, pol in c:
                if not 1 <= var <= num_vars:
                    raise ValueError(f"variable P{var} out of range 1..{num_vars}")
                if var in seen and seen[var] != pol:
                    raise ValueError(f"clause {c!r} is valid (mentions P{var} both ways)")
                seen[var] = pol
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "clauses", clauses)


def reduce_cnf(phi: Cnf3) -> Query:
    """The query whose positive formula is E-valid iff phi is unsatisfiable."""
    user = Group(Subject(f"s{i}") for i in range(phi.num_vars + 1))
    asset = Asset("a")
    s0 = Subject("s0")
    agreements = []
    for ci, clause in enumerate(phi.clauses, start=1):
        prqs = []
        for lj, (var, positive) in enumerate(clause, start=1):
            inner = PrimitivePolicySet(
                TRUE_PRQ,
                PrimitivePolicy(
                    PrincipalConstraint(Subject(f"s{var}")),
                    PolicyId(f"agr{ci}_c{lj}_p1"),
                    Action.PRINT,
                ),
            )
            suspended = NotPolicySet(inner)
            cond = suspended if positive else XorPrq([TRUE_PRQ, suspended])
            prqs.append(AndPrq([PrincipalConstraint(s0), cond]))
        body = PrimitivePolicySet(
            TRUE_PRQ,
            PrimitivePolicy(AndPrq(prqs), PolicyId(f"agr{ci}_p1"), Action.DISPLAY),
        )
        agreements.append(Agreement(user, asset, body))
    q = Query(tuple(agreements), s0, Action.DISPLAY, asset, EMPTY_ENVIRONMENT)
    # the construction is the point: it must leave the tractable fragment
    assert not q.agreements or not in_fragment_q1(q.agreements)
    return q


def sat_bruteforce(phi: Cnf3, *, max_vars: int = 20) -> bool:
    """Truth-table satisfiability; the reduction's independent oracle."""
    if phi.num_vars > max_vars:
        raise ValueError(f"{phi.num_vars} variables exceed the truth-table cap {max_vars}")
    for values in itertools.product((False, True), repeat=phi.num_vars):
        if all(any(values[var - 1] == pol for var, pol in clause) for clause in phi.clauses):
            return True
    return False


def parse_dimacs(text: str) -> Cnf3:
    """DIMACS CNF, restricted to exactly-3-literal clauses."""
    num_vars = None
    clauses: list[tuple[Literal, ...]] = []
    pending: list[Literal] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed problem line: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append((abs(lit), lit > 0))
    if pending:
        clauses.append(tuple(pending))
    if num_vars is None:
        raise ValueError("missing 'p cnf' problem line")
    return Cnf3(num_vars, clauses)
