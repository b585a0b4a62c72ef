"""Maximal consequence (cautious consequences) of a partial interpretation."""

from __future__ import annotations

from typing import Iterable

from .model import PartialInterpretation
from .oracle import Instance, OracleFactory


class TheoryUnsatisfiable(Exception):
    pass


def cautious(inst: Instance, facts: Iterable[int], constraints: Iterable[str] | None = None) -> frozenset[int]:
    """Grid literals entailed by ``facts`` and the active constraints of ``inst``.

    Literals in ``facts`` are included.  Only atoms touched by the active
    constraints can be entailed beyond the facts, so the search is
    restricted to those.
    """
    facts = frozenset(facts)
    active = inst.ids if constraints is None else tuple(constraints)
    res = inst.solve(facts, active)
    if not res.satisfiable:
        raise TheoryUnsatisfiable("facts and constraints have no common model")
    atoms = inst.theory.atoms_of(active)
    known = {abs(l) for l in facts}
    cand = {l for l in res.model if abs(l) in atoms and abs(l) not in known}
    while cand:
        # ask for a model flipping at least one candidate, steering every
        # candidate towards its opposite value
        phases = {abs(l): l < 0 for l in cand}
        res = inst.solve(facts, active, phases=phases, block=[-l for l in cand])
        if not res.satisfiable:
            break
        cand &= res.model
    return facts | frozenset(cand)


def max_consequence(interp, theory, constraints: Iterable[str] | None = None,
                    oracle: OracleFactory | None = None) -> PartialInterpretation:
    """The precision-maximal interpretation entailed by ``interp`` and the theory."""
    lits = interp.literals if isinstance(interp, PartialInterpretation) else frozenset(interp)
    oracle = oracle or OracleFactory(theory)
    ids = theory.ordered(c.id for c in theory.constraints) if constraints is None else theory.ordered(constraints)
    inst = oracle.instance(ids)
    return PartialInterpretation(cautious(inst, lits, ids))


def is_consistent(interp, theory, constraints: Iterable[str] | None = None,
                  oracle: OracleFactory | None = None) -> bool:
    """True iff ``interp`` together with the theory has a model."""
    lits = interp.literals if isinstance(interp, PartialInterpretation) else frozenset(interp)
    if any(-l in lits for l in lits):
        return False
    oracle = oracle or OracleFactory(theory)
    ids = theory.ordered(c.id for c in theory.constraints) if constraints is None else theory.ordered(constraints)
    return oracle.instance(ids).solve(lits, ids).satisfiable
