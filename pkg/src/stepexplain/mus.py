"""Deletion-based MUS extraction over facts and constraints.

The derived fact's negation is held hard; facts and constraint selectors
are soft.  Shrinking starts from the solver's assumption core and removes
constraints first (clues before implicit ones), then facts (negative
before positive), refining the working set with every new core.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import Explanation, lit_key
from .oracle import Instance


class NotUnsat(Exception):
    """The query is satisfiable, so there is nothing to explain."""


@dataclass(frozen=True)
class MusQuery:
    hard: int | None
    soft_facts: frozenset[int]
    soft_constraints: tuple[str, ...]


@dataclass(frozen=True)
class MusResult:
    facts: frozenset[int]
    constraints: tuple[str, ...]


def _fact_order(lit: int):
    return (0 if lit < 0 else 1, lit_key(lit))


def deletion_order(inst: Instance, facts: Iterable[int], constraints: Iterable[str]) -> list:
    theory = inst.theory
    cons = sorted(constraints, key=lambda c: (theory[c].is_implicit, theory.index[c]))
    return [("c", c) for c in cons] + [("f", f) for f in sorted(facts, key=_fact_order)]


def extract_mus(inst: Instance, q: MusQuery, verify: bool = True) -> MusResult:
    hard = () if q.hard is None else (q.hard,)
    res = inst.solve(sorted(q.soft_facts, key=_fact_order), q.soft_constraints, hard=hard)
    if res.satisfiable:
        raise NotUnsat("hard literal, facts and constraints are jointly satisfiable")
    core_facts, core_cons = inst.split_core(res.core)
    core_facts &= q.soft_facts
    work = deletion_order(inst, core_facts, [c for c in q.soft_constraints if c in core_cons])
    keep: list = []
    pending = list(work)
    while pending:
        item = pending.pop(0)
        trial = keep + pending
        res = _solve_items(inst, trial, hard)
        if res.satisfiable:
            keep.append(item)
            continue
        facts, cons = inst.split_core(res.core)
        pending = [x for x in pending if (x[1] in cons if x[0] == "c" else x[1] in facts)]
    result = MusResult(
        frozenset(x[1] for x in keep if x[0] == "f"),
        inst.theory.ordered(x[1] for x in keep if x[0] == "c"),
    )
    if verify:
        _verify(inst, keep, hard)
    return result


def _solve_items(inst: Instance, items, hard):
    facts = [x[1] for x in items if x[0] == "f"]
    cons = [x[1] for x in items if x[0] == "c"]
    return inst.solve(facts, cons, hard=hard)


def _verify(inst: Instance, keep, hard):
    if _solve_items(inst, keep, hard).satisfiable:
        raise AssertionError("extracted set is not unsatisfiable")
    for i in range(len(keep)):
        if not _solve_items(inst, keep[:i] + keep[i + 1:], hard).satisfiable:
            raise AssertionError(f"extracted set is not minimal: {keep[i]} is redundant")


def mus_to_explanation(q: MusQuery, r: MusResult) -> Explanation:
    return Explanation(r.facts, r.constraints, frozenset({-q.hard}))
