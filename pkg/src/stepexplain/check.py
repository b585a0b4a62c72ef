"""Independent re-verification of a sequence document with the oracle alone.

Nothing produced by the search is trusted: the theory is re-ground from
the embedded puzzle and every step is re-checked for soundness,
non-redundancy, cost, and continuity with the interpretation so far.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .consequence import cautious
from .cost import f as cost_f
from .document import SequenceDocument, StepRecord
from .model import ModelError, Theory, is_consistent_set
from .oracle import Instance
from .puzzle import load_puzzle


@dataclass
class CheckReport:
    steps_checked: int = 0
    nested_checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        state = "OK" if self.ok else f"{len(self.violations)} violation(s)"
        return f"{state}: {self.steps_checked} steps, {self.nested_checked} nested sub-steps checked"


class _Checker:
    def __init__(self, theory: Theory, params):
        self.theory = theory
        self.params = params
        ids = [c.id for c in theory.constraints]
        self.inst = Instance(theory, ids)

    def lits(self, strs, where, report):
        out = set()
        for s in strs:
            try:
                out.add(self.theory.vocabulary.parse_lit(s))
            except (ModelError, KeyError):
                report.violations.append(f"{where}: unknown literal {s!r}")
        return frozenset(out)

    def step(self, rec: StepRecord, interp: frozenset[int], where: str, report: CheckReport,
             allow_clash: bool = False) -> frozenset[int] | None:
        """Check one step against ``interp``; return its derived literals if usable."""
        bad = report.violations
        before = len(bad)
        facts = self.lits(rec.facts, where, report)
        derived = self.lits(rec.derived, where, report)
        ids = rec.constraint_ids
        unknown = [c for c in ids if c not in self.theory.by_id]
        if unknown:
            bad.append(f"{where}: unknown constraints {unknown}")
        if len(bad) > before:
            return None
        if not ids:
            bad.append(f"{where}: uses no constraint")
        if not derived:
            bad.append(f"{where}: derives nothing")
        if facts & derived:
            bad.append(f"{where}: derives one of its own facts")
        if not facts <= interp:
            bad.append(f"{where}: uses facts not yet known")
        if derived & interp:
            bad.append(f"{where}: re-derives known facts")
        if not allow_clash and any(-l in interp for l in derived):
            bad.append(f"{where}: contradicts the current interpretation")
        if not ids or not derived:
            return None
        for c in ids:
            if self.theory[c].kind != next(r.kind for r in rec.constraints if r.id == c):
                bad.append(f"{where}: constraint {c} has the wrong kind")
        expect = cost_f(facts, [self.theory[c] for c in ids], derived, self.params)
        if abs(expect - rec.cost) > 1e-9:
            bad.append(f"{where}: cost {rec.cost} but the cost function gives {expect}")
        fl = sorted(facts)
        for n in sorted(derived):
            if self.inst.solve(fl, ids, hard=[-n]).satisfiable:
                bad.append(f"{where}: {self.theory.vocabulary.lit_str(n)} does not follow")
        block = [-n for n in derived]
        for x in fl:
            rest = [l for l in fl if l != x]
            if not self.inst.solve(rest, ids, block=block).satisfiable:
                bad.append(f"{where}: fact {self.theory.vocabulary.lit_str(x)} is redundant")
        for c in ids:
            rest = [k for k in ids if k != c]
            if not self.inst.solve(fl, rest, block=block).satisfiable:
                bad.append(f"{where}: constraint {c} is redundant")
        return derived if len(bad) == before else None


def check_document(doc: SequenceDocument) -> CheckReport:
    report = CheckReport()
    loaded = load_puzzle(doc.puzzle, check_unique=False)
    theory = loaded.theory
    ck = _Checker(theory, doc.cost_params)
    interp = ck.lits(doc.initial, "initial", report)
    if interp != loaded.initial:
        report.violations.append("initial interpretation differs from the puzzle's")
    for rec in doc.steps:
        where = f"step {rec.index}"
        report.steps_checked += 1
        derived = ck.step(rec, interp, where, report)
        if derived is None:
            derived = ck.lits(rec.derived, where, report)
        for m, nest in enumerate(rec.nested, 1):
            _check_nested(ck, rec, nest, f"{where} nested {m}", report)
        interp = interp | derived
    ids = [c.id for c in theory.constraints]
    end = cautious(ck.inst, loaded.initial, ids)
    final = ck.lits(doc.final, "final", report)
    if interp != end:
        report.violations.append(
            f"sequence ends with {len(interp)} literals but {len(end)} follow from the puzzle")
    if final != end:
        report.violations.append("recorded final interpretation differs from the maximal consequence")
    return report


def _check_nested(ck: _Checker, parent: StepRecord, nest, where, report: CheckReport):
    v = ck.theory.vocabulary
    try:
        target = v.parse_lit(nest.target)
    except (ModelError, KeyError):
        report.violations.append(f"{where}: unknown target {nest.target!r}")
        return
    if nest.target not in parent.derived:
        report.violations.append(f"{where}: target is not derived by the parent step")
    interp = ck.lits(parent.facts, where, report) | {-target}
    allowed = set(parent.constraint_ids)
    for i, sub in enumerate(nest.steps, 1):
        w = f"{where} step {i}"
        report.nested_checked += 1
        if not set(sub.constraint_ids) <= allowed:
            report.violations.append(f"{w}: uses constraints outside the parent step")
        if sub.cost >= parent.cost:
            report.violations.append(f"{w}: cost {sub.cost} is not below the parent cost {parent.cost}")
        if not is_consistent_set(interp):
            report.violations.append(f"{w}: follows an already contradictory interpretation")
        derived = ck.step(sub, interp, w, report, allow_clash=True)
        if derived is None:
            derived = ck.lits(sub.derived, w, report)
        interp = interp | derived
    if nest.complete and is_consistent_set(interp):
        report.violations.append(f"{where}: marked complete but ends without a contradiction")
    if not nest.complete and not is_consistent_set(interp):
        report.violations.append(f"{where}: marked incomplete but ends in a contradiction")
