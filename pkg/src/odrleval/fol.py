"""Many-sorted first-order formulas produced by the agreement translation.

Only the fragment the translation can emit is supported: quantifiers range
over the Subjects and Times sorts, arithmetic atoms are ground comparisons
of exact rationals (with infinity greatest), and the sole uninterpreted
predicate left after closed-world evaluation is Permitted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, TypeAlias, Union

from .agreements import cached_hash
from .environment import Environment, lookup_count


class ResourceLimitExceeded(Exception):
    """Raised when grounding or validity enumeration would exceed its cap."""


class Sort(Enum):
    SUBJECTS = "Subjects"
    ACTIONS = "Actions"
    ASSETS = "Assets"
    POLIDS = "PolIds"
    SETPOLIDS = "SetPolIds"
    REALS = "Reals"
    TIMES = "Times"


# --- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    name: str
    sort: Sort


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class RationalLit:
    """Exact rational literal of sort Reals or Times."""

    value: Fraction
    sort: Sort = Sort.REALS

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class InfinityTerm:
    """The greatest element of sort Times."""


INFINITY = InfinityTerm()


@dataclass(frozen=True)
class IdSet:
    """Canonical SetPolIds constant: sorted, deduplicated id names."""

    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        object.__setattr__(self, "names", tuple(sorted(set(names))))


@dataclass(frozen=True)
class CountApp:
    """count(s, id): uses of policy id charged to subject s, sort Reals."""

    subject: "Term"
    polid: "Term"


@dataclass(frozen=True)
class SumTerm:
    terms: tuple["Term", ...]

    def __init__(self, terms: Iterable["Term"]):
        terms = tuple(terms)
        if not terms:
            raise ValueError("empty sum")
        object.__setattr__(self, "terms", terms)


Term: TypeAlias = Union[Constant, Var, RationalLit, InfinityTerm, IdSet, CountApp, SumTerm]


# --- formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class Permitted:
    subject: Term
    action: Term
    asset: Term


@dataclass(frozen=True)
class Paid:
    amount: Term
    ids: Term
    time: Term


@dataclass(frozen=True)
class Attributed:
    subject: Term
    time: Term


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Lt:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Leq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class NotF:
    body: "Formula"


@dataclass(frozen=True)
class AndF:
    items: tuple["Formula", ...]

    def __init__(self, items: Iterable["Formula"]):
        object.__setattr__(self, "items", tuple(items))


@dataclass(frozen=True)
class OrF:
    items: tuple["Formula", ...]

    def __init__(self, items: Iterable["Formula"]):
        object.__setattr__(self, "items", tuple(items))


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula: TypeAlias = Union[
    TrueF, FalseF, Permitted, Paid, Attributed, Eq, Lt, Leq,
    NotF, AndF, OrF, Implies, Forall, Exists,
]

_ATOMS = (TrueF, FalseF, Permitted, Paid, Attributed, Eq, Lt, Leq)

for _cls in (
    Constant, Var, RationalLit, InfinityTerm, IdSet, CountApp, SumTerm,
    TrueF, FalseF, Permitted, Paid, Attributed, Eq, Lt, Leq,
    NotF, AndF, OrF, Implies, Forall, Exists,
):
    cached_hash(_cls)


def mk_and(items: Iterable[Formula]) -> Formula:
    """Conjunction; empty is true (the m = 0 convention), singleton collapses."""
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return AndF(items)


def mk_or(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return OrF(items)


# --- folding constructors (used after literal evaluation) ---------------------


def fold_not(f: Formula) -> Formula:
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, NotF):
        return f.body
    return NotF(f)


def fold_and(items: Iterable[Formula]) -> Formula:
    kept = []
    for f in items:
        if isinstance(f, FalseF):
            return FALSE
        if not isinstance(f, TrueF):
            kept.append(f)
    return mk_and(kept)


def fold_or(items: Iterable[Formula]) -> Formula:
    kept = []
    for f in items:
        if isinstance(f, TrueF):
            return TRUE
        if not isinstance(f, FalseF):
            kept.append(f)
    return mk_or(kept)


def fold_implies(a: Formula, b: Formula) -> Formula:
    if isinstance(a, FalseF) or isinstance(b, TrueF):
        return TRUE
    if isinstance(a, TrueF):
        return b
    if isinstance(b, FalseF):
        return fold_not(a)
    return Implies(a, b)


# --- term universe and grounding ----------------------------------------------


@dataclass(frozen=True)
class TermUniverse:
    """Per-sort closed terms mentioned in a query; drives quantifier expansion."""

    subjects: tuple[Term, ...] = ()
    actions: tuple[Term, ...] = ()
    assets: tuple[Term, ...] = ()
    polids: tuple[Term, ...] = ()
    setpolids: tuple[Term, ...] = ()
    times: tuple[Term, ...] = ()

    def terms_for(self, sort: Sort) -> tuple[Term, ...]:
        return {
            Sort.SUBJECTS: self.subjects,
            Sort.ACTIONS: self.actions,
            Sort.ASSETS: self.assets,
            Sort.POLIDS: self.polids,
            Sort.SETPOLIDS: self.setpolids,
            Sort.TIMES: self.times,
        }[sort]


def subst_term(t: Term, var: Var, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t == var else t
    if isinstance(t, CountApp):
        return CountApp(subst_term(t.subject, var, value), subst_term(t.polid, var, value))
    if isinstance(t, SumTerm):
        return SumTerm(subst_term(x, var, value) for x in t.terms)
    return t


def substitute(f: Formula, var: Var, value: Term) -> Formula:
    """Substitute a closed term for a variable (closed terms cannot be captured)."""
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Permitted):
        return Permitted(
            subst_term(f.subject, var, value),
            subst_term(f.action, var, value),
            subst_term(f.asset, var, value),
        )
    if isinstance(f, Paid):
        return Paid(
            subst_term(f.amount, var, value),
            subst_term(f.ids, var, value),
            subst_term(f.time, var, value),
        )
    if isinstance(f, Attributed):
        return Attributed(subst_term(f.subject, var, value), subst_term(f.time, var, value))
    if isinstance(f, (Eq, Lt, Leq)):
        return type(f)(subst_term(f.lhs, var, value), subst_term(f.rhs, var, value))
    if isinstance(f, NotF):
        return NotF(substitute(f.body, var, value))
    if isinstance(f, AndF):
        return AndF(substitute(x, var, value) for x in f.items)
    if isinstance(f, OrF):
        return OrF(substitute(x, var, value) for x in f.items)
    if isinstance(f, Implies):
        return Implies(substitute(f.antecedent, var, value), substitute(f.consequent, var, value))
    if isinstance(f, (Forall, Exists)):
        if f.var == var:  # shadowed; translation output never does this
            return f
        return type(f)(f.var, substitute(f.body, var, value))
    raise TypeError(f"not a formula: {f!r}")


def ground(f: Formula, universe: TermUniverse, *, max_nodes: int = 10**6) -> Formula:
    """Expand quantifiers into finite conjunctions/disjunctions over the universe.

    Substitution is capture-free because only closed terms are plugged in.
    Empty universes yield true for forall and false for exists.
    """
    budget = [max_nodes]

    def spend():
        budget[0] -= 1
        if budget[0] < 0:
            raise ResourceLimitExceeded(f"grounding exceeds {max_nodes} nodes")

    def subst_t(t: Term, env: dict) -> Term:
        if isinstance(t, Var):
            return env.get(t, t)
        if isinstance(t, CountApp):
            return CountApp(subst_t(t.subject, env), subst_t(t.polid, env))
        if isinstance(t, SumTerm):
            return SumTerm(subst_t(x, env) for x in t.terms)
        return t

    def go(g: Formula, env: dict) -> Formula:
        spend()
        if isinstance(g, (TrueF, FalseF)):
            return g
        if isinstance(g, Permitted):
            return Permitted(
                subst_t(g.subject, env), subst_t(g.action, env), subst_t(g.asset, env)
            )
        if isinstance(g, Paid):
            return Paid(subst_t(g.amount, env), subst_t(g.ids, env), subst_t(g.time, env))
        if isinstance(g, Attributed):
            return Attributed(subst_t(g.subject, env), subst_t(g.time, env))
        if isinstance(g, (Eq, Lt, Leq)):
            return type(g)(subst_t(g.lhs, env), subst_t(g.rhs, env))
        if isinstance(g, NotF):
            return NotF(go(g.body, env))
        if isinstance(g, AndF):
            return AndF(go(x, env) for x in g.items)
        if isinstance(g, OrF):
            return OrF(go(x, env) for x in g.items)
        if isinstance(g, Implies):
            return Implies(go(g.antecedent, env), go(g.consequent, env))
        if isinstance(g, (Forall, Exists)):
            if g.var.sort not in (Sort.SUBJECTS, Sort.TIMES):
                raise ValueError(f"cannot ground quantifier over sort {g.var.sort.value}")
            parts = [go(g.body, {**env, g.var: t}) for t in universe.terms_for(g.var.sort)]
            return mk_and(parts) if isinstance(g, Forall) else mk_or(parts)
        raise TypeError(f"not a formula: {g!r}")

    return go(f, {})


# --- closed-world evaluation ----------------------------------------------------


_NUMERIC = (RationalLit, InfinityTerm, CountApp, SumTerm)


def eval_numeric(t: Term, env: Environment):
    """Value of a Reals/Times term: a Fraction, or infinity as float('inf')."""
    if isinstance(t, RationalLit):
        return t.value
    if isinstance(t, InfinityTerm):
        return float("inf")
    if isinstance(t, CountApp):
        if not (isinstance(t.subject, Constant) and isinstance(t.polid, Constant)):
            raise ValueError(f"count term is not ground: {t!r}")
        from .agreements import PolicyId, Subject

        return Fraction(lookup_count(env, Subject(t.subject.name), PolicyId(t.polid.name)))
    if isinstance(t, SumTerm):
        return sum(eval_numeric(x, env) for x in t.terms)
    raise ValueError(f"not a numeric term: {t!r}")


def _is_numeric(t: Term) -> bool:
    return isinstance(t, _NUMERIC) or (
        isinstance(t, (Constant, Var)) and t.sort in (Sort.REALS, Sort.TIMES)
    )


def eval_ground_literal(lit: Formula, env: Environment) -> bool:
    """Truth of a ground, Permitted-free literal under the closed world.

    Paid/Attributed hold iff a matching environment conjunct exists; counts
    default to 0; comparisons use exact rational arithmetic with infinity
    greatest; constants of non-numeric sorts are equal iff identical.
    """
    if isinstance(lit, TrueF):
        return True
    if isinstance(lit, FalseF):
        return False
    if isinstance(lit, Paid):
        if not isinstance(lit.ids, IdSet):
            raise ValueError(f"Paid id-set is not ground: {lit!r}")
        amount = eval_numeric(lit.amount, env)
        time = eval_numeric(lit.time, env)
        for fact in env.paid:
            if (
                fact.amount == amount
                and tuple(i.name for i in fact.ids) == lit.ids.names
                and fact.time == time
            ):
                return True
        return False
    if isinstance(lit, Attributed):
        if not isinstance(lit.subject, Constant):
            raise ValueError(f"Attributed subject is not ground: {lit!r}")
        time = eval_numeric(lit.time, env)
        return any(
            fact.subject.name == lit.subject.name and fact.time == time
            for fact in env.attributed
        )
    if isinstance(lit, Eq):
        if _is_numeric(lit.lhs) or _is_numeric(lit.rhs):
            return eval_numeric(lit.lhs, env) == eval_numeric(lit.rhs, env)
        return lit.lhs == lit.rhs
    if isinstance(lit, Lt):
        return eval_numeric(lit.lhs, env) < eval_numeric(lit.rhs, env)
    if isinstance(lit, Leq):
        return eval_numeric(lit.lhs, env) <= eval_numeric(lit.rhs, env)
    if isinstance(lit, NotF) and isinstance(lit.body, _ATOMS):
        return not eval_ground_literal(lit.body, env)
    raise ValueError(f"not a Permitted-free ground literal: {lit!r}")


def substitute_literals(f: Formula, env: Environment) -> Formula:
    """Fix every Permitted-free literal to its closed-world truth value and fold.

    The result mentions only Permitted atoms and boolean structure.
    """
    if isinstance(f, Permitted):
        return f
    if isinstance(f, _ATOMS):
        return TRUE if eval_ground_literal(f, env) else FALSE
    if isinstance(f, NotF):
        return fold_not(substitute_literals(f.body, env))
    if isinstance(f, AndF):
        return fold_and(substitute_literals(x, env) for x in f.items)
    if isinstance(f, OrF):
        return fold_or(substitute_literals(x, env) for x in f.items)
    if isinstance(f, Implies):
        return fold_implies(
            substitute_literals(f.antecedent, env), substitute_literals(f.consequent, env)
        )
    if isinstance(f, (Forall, Exists)):
        raise ValueError("formula must be ground before literal substitution")
    raise TypeError(f"not a formula: {f!r}")


def collect_permitted(f: Formula) -> tuple[Permitted, ...]:
    """Distinct Permitted atoms, in a deterministic order."""
    seen: dict[Permitted, None] = {}

    def go(g: Formula):
        if isinstance(g, Permitted):
            seen.setdefault(g, None)
        elif isinstance(g, NotF):
            go(g.body)
        elif isinstance(g, (AndF, OrF)):
            for x in g.items:
                go(x)
        elif isinstance(g, Implies):
            go(g.antecedent)
            go(g.consequent)
        elif isinstance(g, (Forall, Exists)):
            go(g.body)

    go(f)
    return tuple(sorted(seen, key=render_sexpr))


def eval_propositional(f: Formula, assignment: dict[Permitted, bool]) -> bool:
    """Truth under an assignment; every atom must be Permitted or a constant."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Permitted):
        return assignment[f]
    if isinstance(f, NotF):
        return not eval_propositional(f.body, assignment)
    if isinstance(f, AndF):
        return all(eval_propositional(x, assignment) for x in f.items)
    if isinstance(f, OrF):
        return any(eval_propositional(x, assignment) for x in f.items)
    if isinstance(f, Implies):
        return (not eval_propositional(f.antecedent, assignment)) or eval_propositional(
            f.consequent, assignment
        )
    raise ValueError(f"formula is not propositional over Permitted atoms: {f!r}")


def propositional_valid(f: Formula, *, max_assignments: int = 2**20) -> bool:
    """True iff f holds under every assignment to its Permitted atoms."""
    atoms = collect_permitted(f)
    if 2 ** len(atoms) > max_assignments:
        raise ResourceLimitExceeded(
            f"validity check needs 2^{len(atoms)} assignments, cap is {max_assignments}"
        )
    for values in itertools.product((False, True), repeat=len(atoms)):
        if not eval_propositional(f, dict(zip(atoms, values))):
            return False
    return True


def propositional_satisfiable(f: Formula, *, max_assignments: int = 2**20) -> bool:
    """Exhaustive satisfiability check; self-test partner of propositional_valid."""
    atoms = collect_permitted(f)
    if 2 ** len(atoms) > max_assignments:
        raise ResourceLimitExceeded(
            f"satisfiability check needs 2^{len(atoms)} assignments, cap is {max_assignments}"
        )
    return any(
        eval_propositional(f, dict(zip(atoms, values)))
        for values in itertools.product((False, True), repeat=len(atoms))
    )


def formula_size(f: Formula) -> int:
    if isinstance(f, _ATOMS):
        return 1
    if isinstance(f, NotF):
        return 1 + formula_size(f.body)
    if isinstance(f, (AndF, OrF)):
        return 1 + sum(formula_size(x) for x in f.items)
    if isinstance(f, Implies):
        return 1 + formula_size(f.antecedent) + formula_size(f.consequent)
    if isinstance(f, (Forall, Exists)):
        return 1 + formula_size(f.body)
    raise TypeError(f"not a formula: {f!r}")


# --- canonical s-expression rendering -------------------------------------------


def _fmt_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def render_term(t: Term) -> str:
    if isinstance(t, (Constant, Var)):
        return t.name
    if isinstance(t, RationalLit):
        return _fmt_rational(t.value)
    if isinstance(t, InfinityTerm):
        return "inf"
    if isinstance(t, IdSet):
        return "{" + ",".join(t.names) + "}"
    if isinstance(t, CountApp):
        return f"(count {render_term(t.subject)} {render_term(t.polid)})"
    if isinstance(t, SumTerm):
        return "(+ " + " ".join(render_term(x) for x in t.terms) + ")"
    raise TypeError(f"not a term: {t!r}")


def render_sexpr(f: Formula) -> str:
    """Deterministic single-line s-expression form of a formula."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Permitted):
        return f"(Permitted {render_term(f.subject)} {render_term(f.action)} {render_term(f.asset)})"
    if isinstance(f, Paid):
        return f"(Paid {render_term(f.amount)} {render_term(f.ids)} {render_term(f.time)})"
    if isinstance(f, Attributed):
        return f"(Attributed {render_term(f.subject)} {render_term(f.time)})"
    if isinstance(f, Eq):
        return f"(= {render_term(f.lhs)} {render_term(f.rhs)})"
    if isinstance(f, Lt):
        return f"(< {render_term(f.lhs)} {render_term(f.rhs)})"
    if isinstance(f, Leq):
        return f"(<= {render_term(f.lhs)} {render_term(f.rhs)})"
    if isinstance(f, NotF):
        return f"(not {render_sexpr(f.body)})"
    if isinstance(f, AndF):
        return "(and " + " ".join(render_sexpr(x) for x in f.items) + ")"
    if isinstance(f, OrF):
        return "(or " + " ".join(render_sexpr(x) for x in f.items) + ")"
    if isinstance(f, Implies):
        return f"(implies {render_sexpr(f.antecedent)} {render_sexpr(f.consequent)})"
    if isinstance(f, Forall):
        return f"(forall ({f.var.name} {f.var.sort.value}) {render_sexpr(f.body)})"
    if isinstance(f, Exists):
        return f"(exists ({f.var.name} {f.var.sort.value}) {render_sexpr(f.body)})"
    raise TypeError(f"not a formula: {f!r}")
