"""Puzzle documents: a versioned JSON schema, validation and theory loading.

A document looks like::

    {"version": 1, "name": "...",
     "types": [{"name": "person", "entities": ["a", "b"]},
               {"name": "price", "entities": ["$4", "$8"], "values": [4, 8]}],
     "relations": [{"name": "paid", "types": ["person", "price"]}],
     "clues": [{"id": "c1", "text": "...", "formula": "(not (paid a $4))"}],
     "solution": ["paid(a,$8)", ...],          # optional, true atoms only
     "initial": ["~paid(b,$8)"]}               # optional

Relations missing for a pair of types are generated as ``<t1>_<t2>``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .grounder import GroundingError, TypeMismatch, VarPool, generate_bijectivity, \
    generate_transitivity, ground_clue
from .model import ModelError, Theory, Vocabulary
from .oracle import OracleFactory

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    pass


class UnsatisfiablePuzzle(Exception):
    pass


class NonUniqueSolution(UserWarning):
    pass


class UnequalDomains(UserWarning):
    pass


@dataclass(frozen=True)
class TypeSpec:
    name: str
    entities: tuple[str, ...]
    values: tuple[float, ...] | None = None


@dataclass(frozen=True)
class RelationSpec:
    name: str
    first: str
    second: str


@dataclass(frozen=True)
class ClueSpec:
    id: str
    text: str
    formula: str


@dataclass(frozen=True)
class PuzzleDocument:
    name: str
    types: tuple[TypeSpec, ...]
    relations: tuple[RelationSpec, ...]
    clues: tuple[ClueSpec, ...]
    solution: tuple[str, ...] | None = None
    initial: tuple[str, ...] = ()
    version: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        types = []
        for t in self.types:
            d: dict[str, Any] = {"name": t.name, "entities": list(t.entities)}
            if t.values is not None:
                d["values"] = [_num(x) for x in t.values]
            types.append(d)
        out: dict[str, Any] = {
            "version": self.version,
            "name": self.name,
            "types": types,
            "relations": [{"name": r.name, "types": [r.first, r.second]} for r in self.relations],
            "clues": [{"id": c.id, "text": c.text, "formula": c.formula} for c in self.clues],
        }
        if self.solution is not None:
            out["solution"] = list(self.solution)
        if self.initial:
            out["initial"] = list(self.initial)
        return out

    @classmethod
    def from_dict(cls, d: Any) -> PuzzleDocument:
        if not isinstance(d, dict):
            raise SchemaError("puzzle document must be a JSON object")
        version = d.get("version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported puzzle schema version {version!r}")
        name = _req(d, "name", str)
        types = []
        for t in _req(d, "types", list):
            if not isinstance(t, dict):
                raise SchemaError("each type must be an object")
            ents = _req(t, "entities", list)
            if not all(isinstance(e, str) for e in ents):
                raise SchemaError(f"entities of type {t.get('name')!r} must be strings")
            vals = t.get("values")
            if vals is not None:
                if not isinstance(vals, list) or len(vals) != len(ents) or \
                        not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in vals):
                    raise SchemaError(f"values of type {t.get('name')!r} must be numbers, one per entity")
                vals = tuple(float(x) for x in vals)
            types.append(TypeSpec(_req(t, "name", str), tuple(ents), vals))
        rels = []
        for r in d.get("relations", []):
            if not isinstance(r, dict):
                raise SchemaError("each relation must be an object")
            ts = _req(r, "types", list)
            if len(ts) != 2 or not all(isinstance(x, str) for x in ts):
                raise SchemaError(f"relation {r.get('name')!r} needs exactly two type names")
            rels.append(RelationSpec(_req(r, "name", str), ts[0], ts[1]))
        clues = []
        for c in _req(d, "clues", list):
            if not isinstance(c, dict):
                raise SchemaError("each clue must be an object")
            clues.append(ClueSpec(str(_req(c, "id", (str, int))), _req(c, "text", str), _req(c, "formula", str)))
        ids = [c.id for c in clues]
        if len(set(ids)) != len(ids):
            raise SchemaError("clue ids must be unique")
        sol = d.get("solution")
        if sol is not None:
            sol = tuple(_strs(sol, "solution"))
        init = tuple(_strs(d.get("initial", []), "initial"))
        return cls(name, tuple(types), tuple(rels), tuple(clues), sol, init, version)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> PuzzleDocument:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from None


def _num(x: float):
    return int(x) if float(x).is_integer() else x


def _req(d, key, typ):
    if key not in d:
        raise SchemaError(f"missing field {key!r}")
    if not isinstance(d[key], typ):
        raise SchemaError(f"field {key!r} has the wrong type")
    return d[key]


def _strs(x, what):
    if not isinstance(x, list) or not all(isinstance(s, str) for s in x):
        raise SchemaError(f"{what} must be a list of literal strings")
    return x


@dataclass
class LoadedPuzzle:
    document: PuzzleDocument
    vocabulary: Vocabulary
    theory: Theory
    initial: frozenset[int]
    solution: frozenset[int] | None = None
    unique: bool = True
    warnings: list[str] = field(default_factory=list)


def build_vocabulary(doc: PuzzleDocument) -> Vocabulary:
    rels = [(r.name, r.first, r.second) for r in doc.relations]
    have = {frozenset((r.first, r.second)) for r in doc.relations}
    names = [t.name for t in doc.types]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if frozenset((a, b)) not in have:
                rels.append((f"{a}_{b}", a, b))
    values = {}
    for t in doc.types:
        if t.values is not None:
            values.update(zip(t.entities, t.values))
    try:
        return Vocabulary([(t.name, t.entities) for t in doc.types], rels, values)
    except ModelError as exc:
        raise SchemaError(str(exc)) from None


def build_theory(doc: PuzzleDocument, vocabulary: Vocabulary | None = None) -> Theory:
    """Clues first, then bijectivity, then transitivity."""
    v = vocabulary or build_vocabulary(doc)
    pool = VarPool(v.n_atoms)
    cons = [ground_clue(c.formula, v, c.id, c.text, pool) for c in doc.clues]
    clash = {c.id for c in cons}
    implicit = generate_bijectivity(v) + generate_transitivity(v)
    for c in implicit:
        if c.id in clash:
            raise SchemaError(f"clue id {c.id!r} collides with a generated constraint")
    return Theory(v, cons + implicit)


def _parse_lits(v: Vocabulary, strs, what) -> frozenset[int]:
    out = set()
    for s in strs:
        try:
            out.add(v.parse_lit(s))
        except (ModelError, KeyError):
            raise TypeMismatch(f"{what} literal {s!r} does not name a grid cell") from None
    if any(-l in out for l in out):
        raise SchemaError(f"{what} literals contradict each other")
    return frozenset(out)


def load_puzzle(doc, check_unique: bool = True) -> LoadedPuzzle:
    """Validate a document (dict, JSON text, path or PuzzleDocument) and ground it.

    Raises SchemaError, a GroundingError subclass such as TypeMismatch, or
    UnsatisfiablePuzzle.  A puzzle whose clues admit several solutions
    triggers a NonUniqueSolution warning.
    """
    if isinstance(doc, Path) or (isinstance(doc, str) and not doc.lstrip().startswith("{")):
        doc = PuzzleDocument.loads(Path(doc).read_text(encoding="utf-8"))
    elif isinstance(doc, str):
        doc = PuzzleDocument.loads(doc)
    elif isinstance(doc, dict):
        doc = PuzzleDocument.from_dict(doc)
    v = build_vocabulary(doc)
    theory = build_theory(doc, v)
    notes = []
    if not v.equal_sizes():
        notes.append("types have different domain sizes")
        warnings.warn(f"{doc.name}: types have different domain sizes", UnequalDomains, stacklevel=2)
    initial = _parse_lits(v, doc.initial, "initial")
    ids = [c.id for c in theory.constraints]
    inst = OracleFactory(theory).fresh(ids)
    res = inst.solve(sorted(initial), ids)
    if not res.satisfiable:
        raise UnsatisfiablePuzzle(f"{doc.name}: the clues and initial facts have no solution")
    solution = None
    if doc.solution is not None:
        pos = _parse_lits(v, doc.solution, "solution")
        if any(l < 0 for l in pos):
            raise SchemaError("solution lists true atoms only")
        solution = frozenset(a if a in pos else -a for a in range(1, v.n_atoms + 1))
        if not inst.solve(sorted(solution), ids).satisfiable:
            raise SchemaError(f"{doc.name}: the stated solution violates the constraints")
    unique = True
    if check_unique:
        model = sorted(res.model)
        unique = not inst.solve(sorted(initial), ids, block=[-l for l in model]).satisfiable
        if not unique:
            notes.append("puzzle has more than one solution")
            warnings.warn(f"{doc.name}: puzzle has more than one solution", NonUniqueSolution, stacklevel=2)
    return LoadedPuzzle(doc, v, theory, initial, solution, unique, notes)


def shipped_puzzles() -> list[str]:
    root = resources.files(__package__) / "puzzles"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def shipped_puzzle(name: str) -> PuzzleDocument:
    root = resources.files(__package__) / "puzzles"
    return PuzzleDocument.loads((root / f"{name}.json").read_text(encoding="utf-8"))


__all__ = [
    "ClueSpec", "GroundingError", "LoadedPuzzle", "NonUniqueSolution", "PuzzleDocument",
    "RelationSpec", "SchemaError", "TypeMismatch", "TypeSpec", "UnequalDomains",
    "UnsatisfiablePuzzle", "build_theory", "build_vocabulary", "load_puzzle",
    "shipped_puzzle", "shipped_puzzles",
]
