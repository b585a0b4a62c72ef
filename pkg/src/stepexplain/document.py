"""Versioned JSON document for explanation sequences.

The document embeds the puzzle it was computed from, so ``check``,
``render`` and ``stats`` need nothing else.  Literals are stored in their
text form, e.g. ``~ordered(angie,capellini)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .cost import CostParams
from .explain import ExplanationSequence
from .model import Explanation, Theory, sorted_lits
from .puzzle import PuzzleDocument, SchemaError

SEQUENCE_VERSION = 1


@dataclass(frozen=True)
class ConstraintRef:
    id: str
    kind: str
    text: str


@dataclass(frozen=True)
class StepRecord:
    facts: tuple[str, ...]
    constraints: tuple[ConstraintRef, ...]
    derived: tuple[str, ...]
    cost: float
    index: int | None = None  # top-level steps only
    nested: tuple["NestedRecord", ...] = ()

    @property
    def constraint_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.constraints)

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(c.kind for c in self.constraints)


@dataclass(frozen=True)
class NestedRecord:
    target: str
    complete: bool
    steps: tuple[StepRecord, ...]
    blocking_cost: float | None = None


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    nested: bool = True
    nested_threshold: float = 100
    prune_nested: bool = True
    keep_incomplete: bool = False
    exhaustive_subsets: bool = False


@dataclass(frozen=True)
class SequenceDocument:
    puzzle: PuzzleDocument
    cost_params: CostParams
    settings: Settings
    initial: tuple[str, ...]
    final: tuple[str, ...]
    steps: tuple[StepRecord, ...]
    summary: dict = field(default_factory=dict, compare=True)
    version: int = SEQUENCE_VERSION

    @property
    def name(self) -> str:
        return self.puzzle.name

    # -- serialisation ---------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "name": self.puzzle.name,
            "cost_params": {k: _num(v) for k, v in asdict(self.cost_params).items()},
            "settings": {k: _num(v) if isinstance(v, float) else v for k, v in asdict(self.settings).items()},
            "initial": list(self.initial),
            "final": list(self.final),
            "steps": [_step_out(s) for s in self.steps],
            "summary": self.summary,
            "puzzle": self.puzzle.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Any) -> SequenceDocument:
        if not isinstance(d, dict):
            raise SchemaError("sequence document must be a JSON object")
        if d.get("version") != SEQUENCE_VERSION:
            raise SchemaError(f"unsupported sequence schema version {d.get('version')!r}")
        try:
            steps = tuple(_step_in(s) for s in d["steps"])
            idx = [s.index for s in steps]
            if idx != list(range(1, len(steps) + 1)):
                raise SchemaError("step indices must run 1, 2, ... without gaps")
            return cls(
                PuzzleDocument.from_dict(d["puzzle"]),
                CostParams(**{k: float(v) for k, v in d["cost_params"].items()}),
                Settings(**d.get("settings", {})),
                tuple(d["initial"]),
                tuple(d["final"]),
                steps,
                dict(d.get("summary", {})),
                d["version"],
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed sequence document: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> SequenceDocument:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from None

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.dumps(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> SequenceDocument:
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def _num(x):
    if isinstance(x, bool) or x is None:
        return x
    return int(x) if float(x).is_integer() else x


def _step_out(s: StepRecord) -> dict:
    d: dict[str, Any] = {}
    if s.index is not None:
        d["index"] = s.index
    d["cost"] = _num(s.cost)
    d["facts"] = list(s.facts)
    d["constraints"] = [asdict(c) for c in s.constraints]
    d["derived"] = list(s.derived)
    if s.index is not None:
        d["nested"] = [
            {"target": n.target, "complete": n.complete, "blocking_cost": _num(n.blocking_cost),
             "steps": [_step_out(x) for x in n.steps]}
            for n in s.nested
        ]
    return d


def _step_in(d: dict) -> StepRecord:
    nested = tuple(
        NestedRecord(n["target"], bool(n["complete"]), tuple(_step_in(x) for x in n["steps"]),
                     n.get("blocking_cost"))
        for n in d.get("nested", [])
    )
    return StepRecord(
        tuple(d["facts"]),
        tuple(ConstraintRef(**c) for c in d["constraints"]),
        tuple(d["derived"]),
        d["cost"],
        d.get("index"),
        nested,
    )


# -- conversion from engine objects ---------------------------------------

def _lits(theory: Theory, lits) -> tuple[str, ...]:
    v = theory.vocabulary
    return tuple(v.lit_str(l) for l in sorted_lits(lits))


def explanation_record(theory: Theory, e: Explanation, index: int | None = None) -> StepRecord:
    refs = tuple(ConstraintRef(c, theory[c].kind, theory[c].text) for c in theory.ordered(e.constraints))
    nested = ()
    if index is not None:
        v = theory.vocabulary
        nested = tuple(
            NestedRecord(v.lit_str(n.target), n.complete,
                         tuple(explanation_record(theory, x) for x in n.steps), n.blocking_cost)
            for n in e.nested
        )
    return StepRecord(_lits(theory, e.facts), refs, _lits(theory, e.derived), e.cost, index, nested)


def from_sequence(seq: ExplanationSequence, puzzle: PuzzleDocument, theory: Theory,
                  params: CostParams, settings: Settings = Settings(), with_summary: bool = True) -> SequenceDocument:
    steps = tuple(explanation_record(theory, s.explanation, s.index) for s in seq.steps)
    doc = SequenceDocument(puzzle, params, settings, _lits(theory, seq.initial.literals),
                           _lits(theory, seq.final.literals), steps)
    if with_summary:
        from .stats import emit_stats
        doc = SequenceDocument(doc.puzzle, doc.cost_params, doc.settings, doc.initial, doc.final,
                               doc.steps, emit_stats(doc))
    return doc
