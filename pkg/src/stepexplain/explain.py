"""Cost-guided explanation search and the greedy sequence builder."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from .consequence import TheoryUnsatisfiable, cautious
from .cost import DEFAULT_PARAMS, CostParams, candidate_subsets, f as cost_f, tie_key
from .model import Explanation, PartialInterpretation, Theory, is_consistent_set, lit_key
from .mus import MusQuery, extract_mus
from .oracle import OracleFactory

log = logging.getLogger(__name__)


class NothingToExplain(Exception):
    """The interpretation already holds every consequence."""


@dataclass
class CacheEntry:
    explanation: Explanation
    full_derived: frozenset[int]  # consequences of E and S beyond E


@dataclass
class CandidateCache:
    """Best explanation found so far for each derivable literal."""

    entries: dict[int, CacheEntry] = field(default_factory=dict)

    def offer(self, target: int, expl: Explanation, full_derived: frozenset[int]) -> bool:
        old = self.entries.get(target)
        if old is not None and old.explanation.cost <= expl.cost:
            return False
        self.entries[target] = CacheEntry(expl, full_derived)
        return True

    def valid(self, interp: frozenset[int], space: frozenset[str]):
        """Entries still usable at ``interp``: target unknown and S inside ``space``.

        E was a subset of an earlier interpretation and interpretations only
        grow, so E stays usable once the entry exists.
        """
        for target, ent in self.entries.items():
            if target in interp or -target in interp:
                continue
            if not set(ent.explanation.constraints) <= space:
                continue
            if not ent.explanation.facts <= interp:
                continue
            yield target, ent

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class SequenceStep:
    index: int
    interpretation: PartialInterpretation  # after the step
    explanation: Explanation


@dataclass(frozen=True)
class ExplanationSequence:
    initial: PartialInterpretation
    steps: tuple[SequenceStep, ...]
    final: PartialInterpretation

    def __len__(self):
        return len(self.steps)

    @property
    def explanations(self) -> list[Explanation]:
        return [s.explanation for s in self.steps]

    def costs(self) -> list[float]:
        return [s.explanation.cost for s in self.steps]

    def max_cost(self) -> float:
        return max(self.costs(), default=0)

    def mean_cost(self) -> float:
        c = self.costs()
        return sum(c) / len(c) if c else 0.0


class Explainer:
    """Search state shared by the steps of one sequence.

    ``use_cache`` toggles the cross-step candidate cache; the per-subset
    memo of candidate explanations is a pure function of its key and is
    always on.
    """

    def __init__(self, theory: Theory, params: CostParams = DEFAULT_PARAMS,
                 oracle: OracleFactory | None = None, exhaustive: bool = False,
                 use_cache: bool = True, verify_mus: bool = False, memo: dict | None = None):
        self.theory = theory
        self.params = params
        self.oracle = oracle or OracleFactory(theory)
        self.exhaustive = exhaustive
        self.use_cache = use_cache
        self.verify_mus = verify_mus
        self.cache = CandidateCache()
        self.memo = {} if memo is None else memo
        self.calls = {"subsets": 0, "mus": 0}

    def child(self, exhaustive: bool | None = None) -> Explainer:
        """A searcher with a fresh cache sharing oracle and memo."""
        ex = self.exhaustive if exhaustive is None else exhaustive
        return Explainer(self.theory, self.params, self.oracle, ex,
                         self.use_cache, self.verify_mus, self.memo)

    def cost(self, facts, constraints, derived) -> float:
        by = self.theory.by_id
        return cost_f(facts, [by[c] for c in constraints], derived, self.params)

    def _key(self, e: Explanation):
        return tie_key(self.theory, e.cost, e.constraints, e.derived)

    # -- candidates -------------------------------------------------------

    def candidate_explanations(self, interp, constraints: Iterable[str],
                               recency: Sequence[int] = ()) -> list[tuple[int, Explanation, frozenset[int]]]:
        """One non-redundant explanation per literal newly entailed by ``interp`` and S.

        Returns ``(target, explanation, full derived set)`` triples.  When
        ``interp`` and S have no common model (only inside nested runs),
        returns a single contradiction candidate instead, whose derived
        literal is the complement of the most recent fact in the conflict.
        """
        lits = interp.literals if isinstance(interp, PartialInterpretation) else frozenset(interp)
        ids = self.theory.ordered(constraints)
        atoms = self.theory.atoms_of(ids)
        local = frozenset(l for l in lits if abs(l) in atoms)
        inst = self.oracle.instance(ids)
        key = (ids, local)
        if key in self.memo:
            # facts on foreign atoms never take part, so the memo is exact
            return self.memo[key]
        self.calls["subsets"] += 1
        try:
            cons = cautious(inst, local, ids)
        except TheoryUnsatisfiable:
            return self._contradiction(inst, local, ids, recency)
        out = []
        for n in sorted(cons - local, key=lit_key):
            self.calls["mus"] += 1
            r = extract_mus(inst, MusQuery(-n, local, ids), verify=self.verify_mus)
            full = cautious(inst, r.facts, r.constraints) - r.facts
            derived = full - local
            e = Explanation(r.facts, r.constraints, derived, self.cost(r.facts, r.constraints, derived))
            out.append((n, e, full))
        self.memo[key] = out
        return out

    def _contradiction(self, inst, local, ids, recency):
        r = extract_mus(inst, MusQuery(None, local, ids), verify=self.verify_mus)
        rank = {l: i for i, l in enumerate(recency)}
        pivot = max(r.facts, key=lambda l: (rank.get(l, -1), lit_key(l)))
        facts = r.facts - {pivot}
        derived = frozenset({-pivot})
        e = Explanation(facts, r.constraints, derived, self.cost(facts, r.constraints, derived))
        return [(-pivot, e, derived)]

    # -- search -----------------------------------------------------------

    def min_explanation(self, interp, constraints: Iterable[str] | None = None,
                        bound: float | None = None, recency: Sequence[int] = ()) -> Explanation | None:
        """Cheapest explanation found by scanning subsets in ascending ``g``.

        With ``bound`` set, only explanations strictly cheaper than it
        count, and ``None`` is returned when there are none.
        """
        lits = interp.literals if isinstance(interp, PartialInterpretation) else frozenset(interp)
        space = self.theory.ordered(c.id for c in self.theory.constraints) if constraints is None \
            else self.theory.ordered(constraints)
        inconsistent = not is_consistent_set(lits)
        if inconsistent:
            raise NothingToExplain("interpretation already contradicts itself")
        best = None
        best_key = None

        def consider(e: Explanation):
            nonlocal best, best_key
            if bound is not None and e.cost >= bound:
                return
            k = self._key(e)
            if best is None or k < best_key:
                best, best_key = e, k

        if self.use_cache:
            for target, ent in self.cache.valid(lits, frozenset(space)):
                derived = ent.full_derived - lits
                e = ent.explanation
                consider(replace(e, derived=derived))

        for ids, g in candidate_subsets(self.theory, self.params, self.exhaustive, space):
            if best is not None and g > best.cost:
                break
            if bound is not None and g >= bound:
                break
            for target, e, full in self.candidate_explanations(lits, ids, recency):
                if self.use_cache and -target not in lits:
                    self.cache.offer(target, e, full)
                consider(e)
        if best is None and bound is None:
            raise NothingToExplain("no constraint subset derives anything new")
        return best

    def greedy_explain(self, initial=(), nested: Callable | None = None) -> ExplanationSequence:
        """Build the step-wise sequence from ``initial`` to its maximal consequence.

        ``nested`` is an optional hook mapping each explanation to one with
        nested sequences attached.
        """
        lits = initial.literals if isinstance(initial, PartialInterpretation) else frozenset(initial)
        start = PartialInterpretation(lits)
        everything = self.theory.ordered(c.id for c in self.theory.constraints)
        end = cautious(self.oracle.instance(everything), lits, everything)
        steps = []
        cur = lits
        while cur != end:
            e = self.min_explanation(cur)
            if not e.derived:
                raise AssertionError("search produced an empty derivation")
            if nested is not None:
                e = nested(e)
            cur = cur | e.derived
            steps.append(SequenceStep(len(steps) + 1, PartialInterpretation(cur), e))
            log.debug("step %d cost %s derived %d", len(steps), e.cost, len(e.derived))
        return ExplanationSequence(start, tuple(steps), PartialInterpretation(end))


def candidate_explanations(interp, theory: Theory, constraints: Iterable[str],
                           params: CostParams = DEFAULT_PARAMS) -> list[Explanation]:
    return [e for _, e, _ in Explainer(theory, params).candidate_explanations(interp, constraints)]


def min_explanation(interp, theory: Theory, params: CostParams = DEFAULT_PARAMS, **kw) -> Explanation:
    return Explainer(theory, params, **kw).min_explanation(interp)


def greedy_explain(initial, theory: Theory, params: CostParams = DEFAULT_PARAMS, **kw) -> ExplanationSequence:
    return Explainer(theory, params, **kw).greedy_explain(initial)
