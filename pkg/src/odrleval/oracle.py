"""Brute-force reference semantics by E-relevant model enumeration.

A model over the query's closed terms is determined by (a) the closed-world
truth of every Permitted-free ground literal, fixed by the environment, and
(b) a free choice of truth value for each ground Permitted atom.  E-validity
is then a conjunction over all such models, checked by definition.  This is
deliberately independent of the engine's literal-substitution pipeline and
exists to differentially test it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Tuple

from .environment import Environment, check_consistent
from .fol import (
    FALSE,
    TRUE,
    AndF,
    Attributed,
    Eq,
    Exists,
    FalseF,
    Forall,
    Formula,
    Implies,
    Leq,
    Lt,
    NotF,
    OrF,
    Paid,
    Permitted,
    ResourceLimitExceeded,
    TrueF,
    collect_permitted,
    eval_ground_literal,
    ground,
)
from .engine import Query, Verdict, VerdictKind, _verdict_from_bits, query_formulas, term_universe
from .translate import SeqInterpretation


def atom_universe(q: Query) -> Tuple[Permitted, ...]:
    """All ground Permitted atoms over the query's closed terms."""
    u = term_universe(q)
    return tuple(
        Permitted(s, act, a)
        for s in u.subjects
        for act in u.actions
        for a in u.assets
    )


@dataclass
class ModelSketch:
    """An E-relevant model: a Permitted assignment plus the environment that
    fixes everything else."""

    assignment: Dict[Permitted, bool]
    env: Environment


def enumerate_models(q: Query, *, max_atoms: int = 20) -> Iterator[ModelSketch]:
    """All E-relevant models of the query; empty when E is inconsistent."""
    if not check_consistent(q.env):
        return
    atoms = atom_universe(q)
    if len(atoms) > max_atoms:
        raise ResourceLimitExceeded(
            f"{len(atoms)} Permitted atoms exceed the model-enumeration cap {max_atoms}"
        )
    for values in itertools.product((False, True), repeat=len(atoms)):
        yield ModelSketch(dict(zip(atoms, values)), q.env)


def eval_in_model(f: Formula, assignment: Dict[Permitted, bool], env: Environment) -> bool:
    """Truth of a ground formula in one E-relevant model."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Permitted):
        try:
            return assignment[f]
        except KeyError:
            raise ValueError(f"Permitted atom outside the model's universe: {f!r}") from None
    if isinstance(f, (Paid, Attributed, Eq, Lt, Leq)):
        return eval_ground_literal(f, env)
    if isinstance(f, NotF):
        return not eval_in_model(f.body, assignment, env)
    if isinstance(f, AndF):
        return all(eval_in_model(x, assignment, env) for x in f.items)
    if isinstance(f, OrF):
        return any(eval_in_model(x, assignment, env) for x in f.items)
    if isinstance(f, Implies):
        return (not eval_in_model(f.antecedent, assignment, env)) or eval_in_model(
            f.consequent, assignment, env
        )
    if isinstance(f, (Forall, Exists)):
        raise ValueError("model evaluation needs a ground formula")
    raise TypeError(f"not a formula: {f!r}")


def _reduce_model_independent(f: Formula, env: Environment) -> tuple[Formula, bool]:
    """Collapse maximal Permitted-free subformulas to their constant truth.

    A Permitted-free ground formula holds either in every E-relevant model
    or in none, so its value is model-independent and can be computed once
    instead of per model.  Returns (reduced formula, is it constant).
    """
    if isinstance(f, Permitted):
        return f, False
    if isinstance(f, (TrueF, FalseF, Paid, Attributed, Eq, Lt, Leq)):
        return (TRUE if eval_ground_literal(f, env) else FALSE), True
    if isinstance(f, NotF):
        body, const = _reduce_model_independent(f.body, env)
        if const:
            return (FALSE if isinstance(body, TrueF) else TRUE), True
        return NotF(body), False
    if isinstance(f, (AndF, OrF)):
        parts = [_reduce_model_independent(x, env) for x in f.items]
        if all(const for _, const in parts):
            truths = (isinstance(p, TrueF) for p, _ in parts)
            value = all(truths) if isinstance(f, AndF) else any(truths)
            return (TRUE if value else FALSE), True
        return type(f)(p for p, _ in parts), False
    if isinstance(f, Implies):
        ante, aconst = _reduce_model_independent(f.antecedent, env)
        cons, cconst = _reduce_model_independent(f.consequent, env)
        if aconst and cconst:
            value = isinstance(ante, FalseF) or isinstance(cons, TrueF)
            return (TRUE if value else FALSE), True
        return Implies(ante, cons), False
    raise ValueError(f"model reduction needs a ground formula: {f!r}")


def _compile(f: Formula, index: Dict[Permitted, int]):
    """Closure evaluating a reduced formula against an atom-value tuple."""
    if isinstance(f, TrueF):
        return lambda values: True
    if isinstance(f, FalseF):
        return lambda values: False
    if isinstance(f, Permitted):
        i = index[f]
        return lambda values: values[i]
    if isinstance(f, NotF):
        body = _compile(f.body, index)
        return lambda values: not body(values)
    if isinstance(f, AndF):
        parts = [_compile(x, index) for x in f.items]
        return lambda values: all(p(values) for p in parts)
    if isinstance(f, OrF):
        parts = [_compile(x, index) for x in f.items]
        return lambda values: any(p(values) for p in parts)
    if isinstance(f, Implies):
        ante = _compile(f.antecedent, index)
        cons = _compile(f.consequent, index)
        return lambda values: (not ante(values)) or cons(values)
    raise ValueError(f"cannot compile: {f!r}")


def evalid(f: Formula, q: Query, *, max_atoms: int = 20) -> bool:
    """Does f hold in every E-relevant model of the query?

    Atoms of the universe that do not occur in the grounded formula cannot
    change its truth value, so the enumeration ranges over the occurring
    atoms only; the result equals the conjunction over the full model
    stream.
    """
    if not check_consistent(q.env):
        return True
    universe = atom_universe(q)
    if len(universe) > max_atoms:
        raise ResourceLimitExceeded(
            f"{len(universe)} Permitted atoms exceed the model-enumeration cap {max_atoms}"
        )
    g = ground(f, term_universe(q))
    reduced, _ = _reduce_model_independent(g, q.env)
    atoms = collect_permitted(reduced)
    evaluate = _compile(reduced, {a: i for i, a in enumerate(atoms)})
    return all(
        evaluate(values) for values in itertools.product((False, True), repeat=len(atoms))
    )


def oracle_bits(
    q: Query,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    max_atoms: int = 20,
) -> Tuple[bool, bool]:
    fplus, fminus = query_formulas(q, mode)
    return evalid(fplus, q, max_atoms=max_atoms), evalid(fminus, q, max_atoms=max_atoms)


def oracle_verdict(
    q: Query,
    *,
    mode: SeqInterpretation = SeqInterpretation.OVERLAPPING,
    max_atoms: int = 20,
) -> Verdict:
    fplus, fminus = oracle_bits(q, mode=mode, max_atoms=max_atoms)
    return _verdict_from_bits(
        fplus, fminus, "oracle", f"fplus_valid={fplus}, fminus_valid={fminus}"
    )
