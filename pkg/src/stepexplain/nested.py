"""By-contradiction sub-sequences for hard steps.

For a step (E, S, N) and each n in N, start from E plus the negation of n
and keep explaining with constraints from S only, accepting a sub-step
only if it is strictly cheaper than the parent step.  The run succeeds
once the interpretation holds a literal and its complement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .explain import Explainer, ExplanationSequence, SequenceStep
from .model import Explanation, is_consistent_set, lit_key

DEFAULT_THRESHOLD = 100
EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True)
class NestedSequence:
    target: int
    steps: tuple[Explanation, ...]
    complete: bool
    blocking_cost: float | None = None  # cheapest sub-step when incomplete


def prune_unused(start: frozenset[int], steps: list[Explanation]) -> list[Explanation]:
    """Drop sub-steps whose derivations never feed the final contradiction."""
    if not steps:
        return steps
    # the last step clashes with whatever it negates, so that fact is needed too
    needed = (set(steps[-1].facts) | {-l for l in steps[-1].derived}) - start
    kept = [steps[-1]]
    for e in reversed(steps[:-1]):
        if e.derived & needed:
            kept.append(e)
            needed -= e.derived
            needed |= e.facts - start
    return kept[::-1]


def nested_for(explainer: Explainer, step: Explanation, target: int, prune: bool = True,
               keep_incomplete: bool = False) -> NestedSequence | None:
    # the parent S is small, so every subset of it is a candidate here
    sub = explainer.child(exhaustive=len(step.constraints) <= EXHAUSTIVE_LIMIT or explainer.exhaustive)
    start = frozenset(step.facts) | {-target}
    cur = set(start)
    recency = [-target]
    steps: list[Explanation] = []
    while is_consistent_set(cur):
        e = sub.min_explanation(cur, step.constraints, bound=step.cost, recency=recency)
        if e is None:
            if not keep_incomplete:
                return None
            blocking = sub.min_explanation(cur, step.constraints, recency=recency)
            return NestedSequence(target, tuple(steps), False, blocking.cost)
        steps.append(e)
        cur |= e.derived
        recency.extend(sorted(e.derived, key=lit_key))
    if prune:
        steps = prune_unused(start, steps)
    return NestedSequence(target, tuple(steps), True)


def nested_explanations(explainer: Explainer, step: Explanation, prune: bool = True,
                        keep_incomplete: bool = False) -> list[NestedSequence]:
    """Contradiction sequences for the derived facts of ``step``, in literal order.

    A fact whose run needs a sub-step at least as costly as the parent is
    skipped, or reported with ``complete=False`` if ``keep_incomplete``.
    """
    out = []
    for n in sorted(step.derived, key=lit_key):
        ns = nested_for(explainer, step, n, prune, keep_incomplete)
        if ns is not None:
            out.append(ns)
    return out


def nesting_hook(explainer: Explainer, threshold: float = DEFAULT_THRESHOLD, prune: bool = True,
                 keep_incomplete: bool = False):
    def hook(e: Explanation) -> Explanation:
        if e.cost < threshold:
            return e
        return replace(e, nested=tuple(nested_explanations(explainer, e, prune, keep_incomplete)))
    return hook


def attach_nested(seq: ExplanationSequence, explainer: Explainer, threshold: float = DEFAULT_THRESHOLD,
                  prune: bool = True, keep_incomplete: bool = False) -> ExplanationSequence:
    """Copy of ``seq`` where every step costing at least ``threshold`` carries nested sequences."""
    hook = nesting_hook(explainer, threshold, prune, keep_incomplete)
    steps = tuple(SequenceStep(s.index, s.interpretation, hook(s.explanation)) for s in seq.steps)
    return ExplanationSequence(seq.initial, steps, seq.final)
