from itertools import combinations

import pytest

from stepexplain.cost import f as cost_f
from stepexplain.explain import Explainer, NothingToExplain, candidate_explanations, greedy_explain
from stepexplain.grounder import generate_bijectivity, generate_transitivity
from stepexplain.model import Theory, Vocabulary

from conftest import MICRO
from oracles import brute_sat, entailed_by_queries


def test_last_cell_of_a_row(pasta):
    v, th = pasta.vocabulary, pasta.theory
    interp = {v.parse_lit(f"~paired(arrabiata,{p})") for p in ("capellini", "tagliolini", "rotini")}
    (e,) = candidate_explanations(interp, th, ["bij:paired:arrabiata"])
    assert e.derived == {v.parse_lit("paired(arrabiata,farfalle)")}
    assert e.facts == interp and e.cost == 0 + 3 + 5


def test_unit_clue_candidate(pasta):
    v, th = pasta.vocabulary, pasta.theory
    (e,) = candidate_explanations(set(), th, ["c6"])
    assert e.facts == frozenset() and e.constraints == ("c6",)
    assert e.derived == {v.parse_lit("~chose(claudia,puttanesca)")}


@pytest.mark.parametrize("cut", [0, 1, 3, 5])
def test_candidates_cover_everything_entailed(puzzles, cut):
    lp = puzzles["micro_2x3"]
    th = lp.theory
    interp = frozenset(sorted(lp.solution)[:cut])
    ex = Explainer(th)
    cands = ex.candidate_explanations(interp, [c.id for c in th.constraints])
    covered = set(interp).union(*[e.derived for _, e, _ in cands])
    assert covered == entailed_by_queries(th, interp)


def triangle_theory():
    v = Vocabulary([("x", ["x1", "x2"]), ("y", ["y1", "y2"]), ("z", ["z1", "z2"])],
                   [("r", "x", "y"), ("s", "y", "z"), ("t", "x", "z")])
    return Theory(v, generate_bijectivity(v) + generate_transitivity(v))


def test_transitivity_step_costs_seven():
    th = triangle_theory()
    v = th.vocabulary
    # r and s fully known, nothing about t
    interp = frozenset(v.parse_lit(s) for s in [
        "r(x1,y1)", "r(x2,y2)", "~r(x1,y2)", "~r(x2,y1)",
        "s(y1,z1)", "s(y2,z2)", "~s(y1,z2)", "~s(y2,z1)"])
    e = Explainer(th).min_explanation(interp)
    assert e.cost == 7 and len(e.facts) == 2
    assert [th[c].kind for c in e.constraints] == ["transitivity"]
    assert brute_min_singleton_cost(th, interp) == 7


def brute_min_singleton_cost(th, interp):
    """Cheapest single-constraint explanation found by trying every fact subset."""
    best = None
    for c in th.constraints:
        local = sorted(l for l in interp if abs(l) in th.atoms(c.id))
        for n in [l for a in range(1, th.n_atoms + 1) for l in (a, -a)]:
            if n in interp or -n in interp:
                continue
            for k in range(len(local) + 1):
                hit = next((E for E in combinations(local, k)
                            if not brute_sat(c.clauses, th.nvars, list(E) + [-n])), None)
                if hit is not None:
                    cost = cost_f(hit, [c], {n})
                    best = cost if best is None else min(best, cost)
                    break
    return best


def test_only_clues_can_fire_at_start(puzzles):
    lp = puzzles["micro_2x3"]
    e = Explainer(lp.theory).min_explanation(set())
    assert e.cost >= 105
    assert any(lp.theory[c].is_clue for c in e.constraints)


def test_pasta_opens_with_a_unit_clue(pasta):
    e = Explainer(pasta.theory).min_explanation(set())
    assert e.constraints == ("c6",) and e.facts == frozenset() and e.cost == 105


def test_micro_sequence_reaches_solution(puzzles):
    lp = puzzles["micro_2x3"]
    seq = greedy_explain(set(), lp.theory)
    assert 1 <= len(seq) <= 9
    assert seq.final.literals == lp.solution == seq.steps[-1].interpretation.literals


def test_nothing_left_gives_empty_sequence(puzzles):
    lp = puzzles["micro_2x3"]
    seq = greedy_explain(lp.solution, lp.theory)
    assert len(seq) == 0 and seq.final.literals == lp.solution
    with pytest.raises(NothingToExplain):
        Explainer(lp.theory).min_explanation(lp.solution)


@pytest.mark.parametrize("name", MICRO)
def test_sequence_invariants(puzzles, name):
    lp = puzzles[name]
    th = lp.theory
    seq = greedy_explain(lp.initial, th)
    cur = set(lp.initial)
    for step in seq.steps:
        e = step.explanation
        assert e.derived and e.facts <= cur and not (e.derived & cur)
        for n in e.derived:
            assert not brute_sat_small(th, e.facts, e.constraints, [-n])
        cur |= e.derived
        assert step.interpretation.literals == cur
    assert cur == seq.final.literals == lp.solution


def brute_sat_small(th, facts, ids, extra):
    from stepexplain.oracle import solve
    return solve([cl for c in ids for cl in th[c].clauses], list(facts) + list(extra), th.nvars).satisfiable


@pytest.mark.parametrize("name", MICRO)
def test_cache_does_not_change_step_cost(puzzles, name):
    lp = puzzles[name]
    th = lp.theory
    seq = greedy_explain(lp.initial, th)
    cur = set(lp.initial)
    for step in seq.steps:
        fresh = Explainer(th, use_cache=False).min_explanation(cur)
        assert fresh.cost == step.explanation.cost
        cur |= step.explanation.derived
