"""Vocabulary, atoms, literals, partial interpretations and constraints.

Literals are interned as signed integers: atom ids run from 1 to
``Vocabulary.n_atoms`` and ``-a`` is the negation of atom ``a``.  Every
set of literals in the engine is a ``frozenset`` of such integers; the
:class:`Atom` and :class:`Literal` records only exist at the edges
(parsing, documents, reports).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

CLUE = "clue"
BIJECTIVITY = "bijectivity"
TRANSITIVITY = "transitivity"
KINDS = (CLUE, BIJECTIVITY, TRANSITIVITY)


class ModelError(ValueError):
    pass


class InconsistentInterpretation(ModelError):
    pass


@dataclass(frozen=True)
class Relation:
    name: str
    first: str
    second: str


@dataclass(frozen=True)
class Atom:
    relation: str
    row: str
    col: str

    def __str__(self) -> str:
        return f"{self.relation}({self.row},{self.col})"


@dataclass(frozen=True)
class Literal:
    atom: Atom
    sign: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.sign else f"~{self.atom}"

    def __neg__(self) -> Literal:
        return Literal(self.atom, not self.sign)

    @classmethod
    def parse(cls, text: str) -> Literal:
        text = text.strip()
        sign = not text.startswith("~")
        body = text.lstrip("~").strip()
        if not body.endswith(")") or "(" not in body:
            raise ModelError(f"malformed literal {text!r}")
        rel, args = body[:-1].split("(", 1)
        parts = [a.strip() for a in args.split(",")]
        if len(parts) != 2 or not rel:
            raise ModelError(f"malformed literal {text!r}")
        return cls(Atom(rel.strip(), parts[0], parts[1]), sign)


class Vocabulary:
    """Typed entities plus one binary relation per unordered pair of types.

    ``types`` is a list of ``(name, entities)``; ``relations`` a list of
    ``(name, first_type, second_type)``.  Numeric ``values`` per entity are
    optional and only used by comparison terms in clue formulas.
    """

    def __init__(self, types, relations, values=None):
        self.types: list[tuple[str, tuple[str, ...]]] = [
            (name, tuple(ents)) for name, ents in types
        ]
        self.values: dict[str, float] = dict(values or {})
        self.entity_type: dict[str, str] = {}
        for name, ents in self.types:
            if not ents:
                raise ModelError(f"type {name!r} has an empty domain")
            if len(set(ents)) != len(ents):
                raise ModelError(f"type {name!r} lists an entity twice")
            for e in ents:
                if e in self.entity_type:
                    raise ModelError(
                        f"entity {e!r} belongs to both {self.entity_type[e]!r} and {name!r}"
                    )
                self.entity_type[e] = name
        self.domain = dict(self.types)
        if len(self.domain) != len(self.types):
            raise ModelError("duplicate type name")

        self.relations: list[Relation] = []
        self._by_name: dict[str, Relation] = {}
        self._by_pair: dict[frozenset, Relation] = {}
        for name, t1, t2 in relations:
            rel = Relation(name, t1, t2)
            for t in (t1, t2):
                if t not in self.domain:
                    raise ModelError(f"relation {name!r} uses unknown type {t!r}")
            if t1 == t2:
                raise ModelError(f"relation {name!r} links type {t1!r} to itself")
            if name in self._by_name:
                raise ModelError(f"duplicate relation {name!r}")
            pair = frozenset((t1, t2))
            if pair in self._by_pair:
                other = self._by_pair[pair].name
                raise ModelError(f"relations {other!r} and {name!r} link the same types")
            self.relations.append(rel)
            self._by_name[name] = rel
            self._by_pair[pair] = rel
        for (a, _), (b, _) in combinations(self.types, 2):
            if frozenset((a, b)) not in self._by_pair:
                raise ModelError(f"no relation between types {a!r} and {b!r}")

        # dense atom ids, relation by relation, row-major
        self._atoms: list[Atom] = [None]  # type: ignore[list-item]
        self._ids: dict[Atom, int] = {}
        for rel in self.relations:
            for r in self.domain[rel.first]:
                for c in self.domain[rel.second]:
                    atom = Atom(rel.name, r, c)
                    self._ids[atom] = len(self._atoms)
                    self._atoms.append(atom)

    @property
    def n_atoms(self) -> int:
        return len(self._atoms) - 1

    @property
    def type_names(self) -> list[str]:
        return [name for name, _ in self.types]

    def relation(self, name: str) -> Relation:
        return self._by_name[name]

    def has_relation(self, name: str) -> bool:
        return name in self._by_name

    def relation_between(self, t1: str, t2: str) -> Relation:
        return self._by_pair[frozenset((t1, t2))]

    def atom(self, atom_id: int) -> Atom:
        return self._atoms[abs(atom_id)]

    def atom_id(self, atom: Atom) -> int:
        return self._ids[atom]

    def link(self, a: str, b: str) -> int:
        """Atom id linking entities ``a`` and ``b`` in whichever orientation."""
        rel = self.relation_between(self.entity_type[a], self.entity_type[b])
        if self.entity_type[a] == rel.first:
            return self._ids[Atom(rel.name, a, b)]
        return self._ids[Atom(rel.name, b, a)]

    def atoms_of(self, relation: str) -> Iterator[int]:
        rel = self._by_name[relation]
        for r in self.domain[rel.first]:
            for c in self.domain[rel.second]:
                yield self._ids[Atom(relation, r, c)]

    def literal(self, lit: int) -> Literal:
        return Literal(self._atoms[abs(lit)], lit > 0)

    def encode(self, literal: Literal) -> int:
        try:
            a = self._ids[literal.atom]
        except KeyError:
            raise ModelError(f"unknown atom {literal.atom}") from None
        return a if literal.sign else -a

    def lit_str(self, lit: int) -> str:
        return str(self.literal(lit))

    def parse_lit(self, text: str) -> int:
        return self.encode(Literal.parse(text))

    def equal_sizes(self) -> bool:
        return len({len(ents) for _, ents in self.types}) == 1


def atom_count(v: Vocabulary) -> int:
    """Number of grid cells: sum over relations of |dom1| * |dom2|."""
    return sum(len(v.domain[r.first]) * len(v.domain[r.second]) for r in v.relations)


def lit_key(lit: int) -> tuple[int, int]:
    return (abs(lit), 0 if lit > 0 else 1)


def sorted_lits(lits: Iterable[int]) -> list[int]:
    return sorted(lits, key=lit_key)


class PartialInterpretation:
    """A finite set of literals, consistent unless explicitly allowed not to be."""

    __slots__ = ("literals",)

    def __init__(self, literals: Iterable[int] = (), allow_inconsistent: bool = False):
        lits = frozenset(literals)
        if 0 in lits:
            raise ModelError("0 is not a literal")
        if not allow_inconsistent:
            clash = next((l for l in lits if -l in lits), None)
            if clash is not None:
                raise InconsistentInterpretation(f"atom {abs(clash)} asserted with both signs")
        self.literals = lits

    @property
    def consistent(self) -> bool:
        return not any(-l in self.literals for l in self.literals)

    def is_more_precise(self, other: PartialInterpretation) -> bool:
        return self.literals >= other.literals

    def extend(self, lits: Iterable[int]) -> PartialInterpretation:
        return PartialInterpretation(self.literals | frozenset(lits))

    def __contains__(self, lit: int) -> bool:
        return lit in self.literals

    def __iter__(self):
        return iter(self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __eq__(self, other) -> bool:
        if isinstance(other, PartialInterpretation):
            return self.literals == other.literals
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.literals)

    def __repr__(self) -> str:
        return f"PartialInterpretation({sorted_lits(self.literals)})"


def is_more_precise(a: PartialInterpretation, b: PartialInterpretation) -> bool:
    return a.is_more_precise(b)


def is_consistent_set(lits: Iterable[int]) -> bool:
    s = set(lits)
    return not any(-l in s for l in s)


@dataclass(frozen=True)
class Constraint:
    id: str
    kind: str
    text: str
    clauses: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown constraint kind {self.kind!r}")

    @property
    def is_clue(self) -> bool:
        return self.kind == CLUE

    @property
    def is_implicit(self) -> bool:
        return self.kind != CLUE


@dataclass(frozen=True)
class Explanation:
    """A reasoning step: facts used, constraint ids used, facts derived."""

    facts: frozenset[int]
    constraints: tuple[str, ...]
    derived: frozenset[int]
    cost: float = 0
    nested: tuple = field(default=(), compare=True)

    def __post_init__(self):
        if self.facts & self.derived:
            raise ModelError("an explanation cannot derive one of its own facts")


class Theory:
    """A vocabulary plus an ordered list of grounded constraints.

    Variables 1..n_atoms are grid atoms; auxiliary variables introduced by
    clause-form conversion occupy ids up to ``nvars``.
    """

    def __init__(self, vocabulary: Vocabulary, constraints: Iterable[Constraint], nvars=None):
        self.vocabulary = vocabulary
        self.constraints: tuple[Constraint, ...] = tuple(constraints)
        self.by_id: dict[str, Constraint] = {}
        for c in self.constraints:
            if c.id in self.by_id:
                raise ModelError(f"duplicate constraint id {c.id!r}")
            self.by_id[c.id] = c
        self.index = {c.id: i for i, c in enumerate(self.constraints)}
        top = vocabulary.n_atoms
        for c in self.constraints:
            for cl in c.clauses:
                for l in cl:
                    top = max(top, abs(l))
        self.nvars = max(top, nvars or 0)
        self._atoms: dict[str, frozenset[int]] = {}

    @property
    def n_atoms(self) -> int:
        return self.vocabulary.n_atoms

    def __getitem__(self, cid: str) -> Constraint:
        return self.by_id[cid]

    def __len__(self) -> int:
        return len(self.constraints)

    @property
    def clues(self) -> list[Constraint]:
        return [c for c in self.constraints if c.is_clue]

    @property
    def implicit(self) -> list[Constraint]:
        return [c for c in self.constraints if c.is_implicit]

    def atoms(self, cid: str) -> frozenset[int]:
        """Grid atoms mentioned by a constraint's clauses."""
        got = self._atoms.get(cid)
        if got is None:
            n = self.n_atoms
            got = frozenset(abs(l) for cl in self.by_id[cid].clauses for l in cl if abs(l) <= n)
            self._atoms[cid] = got
        return got

    def atoms_of(self, cids: Iterable[str]) -> frozenset[int]:
        out: set[int] = set()
        for cid in cids:
            out |= self.atoms(cid)
        return frozenset(out)

    def ordered(self, cids: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(set(cids), key=self.index.__getitem__))
