"""Explanation cost, its optimistic estimate, and ordered candidate subsets."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .model import Constraint, Theory, lit_key


class EmptyConstraintSet(ValueError):
    pass


@dataclass(frozen=True)
class CostParams:
    clue_base: float = 100
    multi_implicit_base: float = 100
    constraint_weight: float = 5
    fact_weight: float = 1

    def __post_init__(self):
        for k, v in asdict(self).items():
            if v < 0:
                raise ValueError(f"cost parameter {k} must be non-negative")

    def scaled(self, k: float) -> CostParams:
        return CostParams(*(v * k for v in asdict(self).values()))


DEFAULT_PARAMS = CostParams()


def basecost(constraints: Sequence[Constraint], params: CostParams = DEFAULT_PARAMS) -> float:
    if not constraints:
        raise EmptyConstraintSet("an explanation uses at least one constraint")
    nc = sum(1 for c in constraints if c.is_clue)
    if nc == 0:
        return 0 if len(constraints) == 1 else params.multi_implicit_base
    return params.clue_base * nc


def f(facts: Iterable[int], constraints: Sequence[Constraint], derived: Iterable[int] = (),
      params: CostParams = DEFAULT_PARAMS) -> float:
    n_facts = len(frozenset(facts))
    return basecost(constraints, params) + params.fact_weight * n_facts + \
        params.constraint_weight * len(constraints)


def g(constraints: Sequence[Constraint], params: CostParams = DEFAULT_PARAMS) -> float:
    return basecost(constraints, params)


def tie_key(theory: Theory, cost: float, constraint_ids: Iterable[str], derived: Iterable[int]):
    """Total order on explanations: cost, then constraint positions, then derived literals."""
    return (
        cost,
        tuple(sorted(theory.index[c] for c in constraint_ids)),
        tuple(sorted(lit_key(l) for l in derived)),
    )


def candidate_subsets(theory: Theory, params: CostParams = DEFAULT_PARAMS, exhaustive: bool = False,
                      search_space: Iterable[str] | None = None) -> Iterator[tuple[tuple[str, ...], float]]:
    """Yield ``(constraint ids, g)`` in non-decreasing order of ``g``.

    Puzzle mode: each implicit constraint alone; then every clue with all
    implicit constraints and the implicit set alone; then clue pairs,
    triples and so on, each with all implicit constraints.  Exhaustive mode
    walks every non-empty subset instead.
    """
    space = theory.ordered(search_space) if search_space is not None else \
        tuple(c.id for c in theory.constraints)
    implicit = tuple(c for c in space if theory[c].is_implicit)
    clues = tuple(c for c in space if theory[c].is_clue)
    by = theory.by_id

    def gval(ids):
        return g([by[c] for c in ids], params)

    if exhaustive:
        yield from _exhaustive(implicit, clues, gval)
        return

    for c in implicit:
        yield (c,), gval((c,))
    tier = [(theory.ordered((c, *implicit)), c) for c in clues]
    if len(implicit) > 1:
        tier.append((implicit, None))
    tier = [(ids, gval(ids)) for ids, _ in tier]
    # stable sort keeps clue order among equal estimates
    tier.sort(key=lambda t: t[1])
    yield from tier
    for k in range(2, len(clues) + 1):
        for combo in combinations(clues, k):
            ids = theory.ordered((*combo, *implicit))
            yield ids, gval(ids)


def _exhaustive(implicit, clues, gval):
    def implicit_subsets(min_size):
        for k in range(min_size, len(implicit) + 1):
            yield from combinations(implicit, k)

    tiers = [(0, lambda: ((c,) for c in implicit))]
    if len(implicit) > 1:
        tiers.append((1, lambda: implicit_subsets(2)))
    for k in range(1, len(clues) + 1):
        def gen(k=k):
            for combo in combinations(clues, k):
                for imp in implicit_subsets(0):
                    yield combo + imp
        tiers.append((k + 1, gen))
    groups = []
    for rank, gen in tiers:
        sample = next(iter(gen()), None)
        if sample is not None:
            groups.append((gval(sample), rank, gen))
    groups.sort(key=lambda t: (t[0], t[1]))
    for _, _, gen in groups:
        for ids in gen():
            yield ids, gval(ids)
