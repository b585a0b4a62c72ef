"""Grounding of typed clue formulas and generation of the implicit axioms.

Clue formulas are written as S-expressions.  Variables start with ``?``;
every other symbol in term position is an entity name::

    (exists ?p person (and (ordered ?p capellini)
                           (or (eq ?p damon) (eq ?p claudia))))

Connectives: ``not and or implies iff``; quantifiers ``exists forall``
taking either ``?var type body`` or a binding list ``(?a t1 ?b t2) body``;
``eq``/``neq`` between terms; ``lt le gt ge`` between numeric terms;
``(+ term k)`` and ``(- term k)`` offset a numeric term.  Any other head
symbol is a relation name applied to two terms, in either orientation.

Equalities and comparisons are decided during grounding, so the clause
set only mentions grid atoms and per-constraint auxiliary variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Union

from .model import BIJECTIVITY, CLUE, TRANSITIVITY, Constraint, Vocabulary


class GroundingError(ValueError):
    def __init__(self, message, clue_id=None):
        self.clue_id = clue_id
        super().__init__(f"clue {clue_id}: {message}" if clue_id else message)


class FormulaSyntaxError(GroundingError):
    pass


class UnboundVariable(GroundingError):
    pass


class TypeMismatch(GroundingError):
    pass


class UnknownRelation(GroundingError):
    pass


# --- formula tree --------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Ent:
    name: str


@dataclass(frozen=True)
class Offset:
    term: "Term"
    amount: float


Term = Union[Var, Ent, Offset]


@dataclass(frozen=True)
class Pred:
    relation: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Compare:
    op: str  # eq neq lt le gt ge
    left: Term
    right: Term


@dataclass(frozen=True)
class Exists:
    var: str
    type: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    type: str
    body: "Formula"


@dataclass(frozen=True)
class Const:
    value: bool


Formula = Union[Pred, Not, And, Or, Implies, Iff, Compare, Exists, Forall, Const]

_COMPARE = {
    "eq": lambda a, b: a == b,
    "neq": lambda a, b: a != b,
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
}
_KEYWORDS = {"not", "and", "or", "implies", "iff", "exists", "forall", "true", "false",
             "+", "-", *_COMPARE}


# --- parsing ------------------------------------------------------------

def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise FormulaSyntaxError("unexpected end of formula")
    tok = tokens[pos]
    if tok == ")":
        raise FormulaSyntaxError("unexpected ')'")
    if tok != "(":
        return tok, pos + 1
    out = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise FormulaSyntaxError("missing ')'")
        if tokens[pos] == ")":
            return out, pos + 1
        item, pos = _read(tokens, pos)
        out.append(item)


def read_sexpr(text: str):
    tokens = _tokenize(text)
    expr, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise FormulaSyntaxError("trailing tokens after formula")
    return expr


def parse_formula(text: str, vocabulary: Vocabulary, clue_id=None) -> Formula:
    """Parse and type-check a closed formula against ``vocabulary``."""
    try:
        expr = read_sexpr(text)
    except FormulaSyntaxError as exc:
        raise FormulaSyntaxError(str(exc), clue_id) from None
    return _Parser(vocabulary, clue_id).formula(expr, {})


class _Parser:
    def __init__(self, vocabulary: Vocabulary, clue_id):
        self.v = vocabulary
        self.cid = clue_id

    def fail(self, cls, msg):
        raise cls(msg, self.cid)

    def formula(self, e, env) -> Formula:
        if isinstance(e, str):
            if e == "true":
                return Const(True)
            if e == "false":
                return Const(False)
            self.fail(FormulaSyntaxError, f"expected a formula, got {e!r}")
        if not e or not isinstance(e[0], str):
            self.fail(FormulaSyntaxError, "empty or malformed sub-formula")
        head, args = e[0], e[1:]
        if head == "not":
            self.arity(head, args, 1)
            return Not(self.formula(args[0], env))
        if head in ("and", "or"):
            parts = tuple(self.formula(a, env) for a in args)
            return And(parts) if head == "and" else Or(parts)
        if head in ("implies", "iff"):
            self.arity(head, args, 2)
            l, r = self.formula(args[0], env), self.formula(args[1], env)
            return Implies(l, r) if head == "implies" else Iff(l, r)
        if head in ("exists", "forall"):
            return self.quantifier(head, args, env)
        if head in _COMPARE:
            self.arity(head, args, 2)
            l, r = self.term(args[0], env), self.term(args[1], env)
            tl, tr = self.term_type(l, env), self.term_type(r, env)
            if tl != tr:
                self.fail(TypeMismatch, f"{head} compares {tl} with {tr}")
            numeric = isinstance(l, Offset) or isinstance(r, Offset) or head not in ("eq", "neq")
            if numeric:
                self.require_numeric(tl)
            return Compare(head, l, r)
        if head in _KEYWORDS:
            self.fail(FormulaSyntaxError, f"{head!r} is not a formula")
        return self.predicate(head, args, env)

    def arity(self, head, args, n):
        if len(args) != n:
            self.fail(FormulaSyntaxError, f"{head} takes {n} argument(s), got {len(args)}")

    def quantifier(self, head, args, env) -> Formula:
        if len(args) == 3 and isinstance(args[0], str):
            bindings = [(args[0], args[1])]
            body = args[2]
        elif len(args) == 2 and isinstance(args[0], list):
            flat = args[0]
            if len(flat) % 2 or not flat:
                self.fail(FormulaSyntaxError, f"{head} binding list needs ?var type pairs")
            bindings = list(zip(flat[::2], flat[1::2]))
            body = args[1]
        else:
            self.fail(FormulaSyntaxError, f"malformed {head}")
        inner = dict(env)
        for var, typ in bindings:
            if not isinstance(var, str) or not var.startswith("?") or len(var) < 2:
                self.fail(FormulaSyntaxError, f"quantified variable must look like ?name, got {var!r}")
            if not isinstance(typ, str) or typ not in self.v.domain:
                self.fail(TypeMismatch, f"unknown type {typ!r} for {var}")
            inner[var] = typ
        node = self.formula(body, inner)
        cls = Exists if head == "exists" else Forall
        for var, typ in reversed(bindings):
            node = cls(var, typ, node)
        return node

    def term(self, e, env) -> Term:
        if isinstance(e, list):
            if len(e) == 3 and e[0] in ("+", "-"):
                inner = self.term(e[1], env)
                try:
                    k = float(e[2])
                except (TypeError, ValueError):
                    self.fail(FormulaSyntaxError, f"offset must be a number, got {e[2]!r}")
                self.require_numeric(self.term_type(inner, env))
                return Offset(inner, k if e[0] == "+" else -k)
            self.fail(FormulaSyntaxError, f"malformed term {e!r}")
        if e.startswith("?"):
            if e not in env:
                self.fail(UnboundVariable, f"variable {e} is not bound")
            return Var(e)
        if e not in self.v.entity_type:
            self.fail(TypeMismatch, f"unknown entity {e!r}")
        return Ent(e)

    def term_type(self, t: Term, env) -> str:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Ent):
            return self.v.entity_type[t.name]
        return self.term_type(t.term, env)

    def require_numeric(self, typ):
        if any(e not in self.v.values for e in self.v.domain[typ]):
            self.fail(TypeMismatch, f"type {typ!r} has no numeric values")

    def predicate(self, head, args, env) -> Formula:
        if not self.v.has_relation(head):
            self.fail(UnknownRelation, f"unknown relation {head!r}")
        self.arity(head, args, 2)
        l, r = self.term(args[0], env), self.term(args[1], env)
        if isinstance(l, Offset) or isinstance(r, Offset):
            self.fail(TypeMismatch, f"{head} takes entities, not arithmetic terms")
        rel = self.v.relation(head)
        tl, tr = self.term_type(l, env), self.term_type(r, env)
        if (tl, tr) == (rel.first, rel.second):
            return Pred(head, l, r)
        if (tl, tr) == (rel.second, rel.first):
            return Pred(head, r, l)
        self.fail(TypeMismatch, f"{head}({rel.first},{rel.second}) applied to ({tl},{tr})")


# --- grounding ----------------------------------------------------------

class VarPool:
    """Hands out fresh auxiliary variable ids above the grid atoms."""

    def __init__(self, start: int):
        self.top = start

    def fresh(self) -> int:
        self.top += 1
        return self.top


def _value(t: Term, env, v: Vocabulary):
    if isinstance(t, Offset):
        return _value(t.term, env, v) + t.amount
    name = env[t.name] if isinstance(t, Var) else t.name
    return name


def _numeric(t: Term, env, v: Vocabulary):
    if isinstance(t, Offset):
        return _numeric(t.term, env, v) + t.amount
    name = env[t.name] if isinstance(t, Var) else t.name
    return v.values[name]


# Ground propositional nodes: True, False, int literal, ("and", [...]), ("or", [...]).

def _mk(op, parts):
    unit, zero = (True, False) if op == "and" else (False, True)
    flat = []
    for p in parts:
        if p is zero:
            return zero
        if p is unit:
            continue
        if isinstance(p, tuple) and p[0] == op:
            flat.extend(p[1])
        else:
            flat.append(p)
    if not flat:
        return unit
    if len(flat) == 1:
        return flat[0]
    return (op, flat)


def _ground(f: Formula, env, v: Vocabulary, positive: bool):
    """Ground ``f`` (or its negation) into negation normal form."""
    if isinstance(f, Const):
        return f.value if positive else not f.value
    if isinstance(f, Pred):
        row = env[f.left.name] if isinstance(f.left, Var) else f.left.name
        col = env[f.right.name] if isinstance(f.right, Var) else f.right.name
        a = v.link(row, col)
        return a if positive else -a
    if isinstance(f, Compare):
        if f.op in ("eq", "neq") and not (isinstance(f.left, Offset) or isinstance(f.right, Offset)):
            res = _COMPARE[f.op](_value(f.left, env, v), _value(f.right, env, v))
        else:
            res = _COMPARE[f.op](_numeric(f.left, env, v), _numeric(f.right, env, v))
        return res if positive else not res
    if isinstance(f, Not):
        return _ground(f.body, env, v, not positive)
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) == positive else "or"
        return _mk(op, [_ground(p, env, v, positive) for p in f.parts])
    if isinstance(f, Implies):
        return _ground(Or((Not(f.left), f.right)), env, v, positive)
    if isinstance(f, Iff):
        both = And((Implies(f.left, f.right), Implies(f.right, f.left)))
        return _ground(both, env, v, positive)
    if isinstance(f, (Exists, Forall)):
        op = "or" if isinstance(f, Exists) == positive else "and"
        parts = []
        for e in v.domain[f.type]:
            inner = dict(env)
            inner[f.var] = e
            parts.append(_ground(f.body, inner, v, positive))
        return _mk(op, parts)
    raise TypeError(f"not a formula node: {f!r}")


def ground_formula(f: Formula, v: Vocabulary):
    return _ground(f, {}, v, True)


def _clauses(node, pool: VarPool) -> list[list[int]]:
    if node is True:
        return []
    if node is False:
        x = pool.fresh()
        return [[x], [-x]]
    if isinstance(node, int):
        return [[node]]
    op, parts = node
    if op == "and":
        out = []
        for p in parts:
            out.extend(_clauses(p, pool))
        return out
    clause: list[int] = []
    defs: list[list[int]] = []
    for p in parts:
        if isinstance(p, int):
            clause.append(p)
            continue
        sub = _clauses(p, pool)
        if len(sub) == 1:
            clause.extend(sub[0])
            continue
        # one-sided definition aux -> p keeps models over grid atoms exact
        aux = pool.fresh()
        clause.append(aux)
        defs.extend([-aux, *cl] for cl in sub)
    return [clause] + defs


def _normalise(clauses) -> tuple[tuple[int, ...], ...]:
    out = []
    seen = set()
    for cl in clauses:
        lits = tuple(dict.fromkeys(cl))
        if any(-l in lits for l in lits):
            continue
        key = frozenset(lits)
        if key in seen:
            continue
        seen.add(key)
        out.append(lits)
    return tuple(out)


def ground_clue(f, v: Vocabulary, id: str, text: str, pool: VarPool | None = None) -> Constraint:
    """Ground a clue formula (tree or S-expression text) into a clue constraint."""
    if isinstance(f, str):
        f = parse_formula(f, v, id)
    if pool is None:
        pool = VarPool(v.n_atoms)
    node = ground_formula(f, v)
    return Constraint(id, CLUE, text, _normalise(_clauses(node, pool)))


# --- implicit constraints -------------------------------------------------

def generate_bijectivity(v: Vocabulary) -> list[Constraint]:
    """One exactly-one constraint per row and per column of every relation."""
    out = []
    for rel in v.relations:
        rows, cols = v.domain[rel.first], v.domain[rel.second]
        for r in rows:
            atoms = [v.link(r, c) for c in cols]
            out.append(Constraint(
                f"bij:{rel.name}:{r}",
                BIJECTIVITY,
                f"{r} is {rel.name}-linked to exactly one {rel.second}",
                _exactly_one(atoms),
            ))
        for c in cols:
            atoms = [v.link(r, c) for r in rows]
            out.append(Constraint(
                f"bij:{rel.name}:{c}",
                BIJECTIVITY,
                f"{c} is {rel.name}-linked to exactly one {rel.first}",
                _exactly_one(atoms),
            ))
    return out


def _exactly_one(atoms):
    clauses = [tuple(atoms)]
    clauses.extend((-a, -b) for a, b in combinations(atoms, 2))
    return tuple(clauses)


def generate_transitivity(v: Vocabulary) -> list[Constraint]:
    """One triangle constraint per unordered triple of types."""
    out = []
    for (t1, d1), (t2, d2), (t3, d3) in combinations(v.types, 3):
        clauses = []
        for a, b, c in product(d1, d2, d3):
            x, y, z = v.link(a, b), v.link(b, c), v.link(a, c)
            clauses.append((-x, -y, z))
            clauses.append((-x, -z, y))
            clauses.append((-y, -z, x))
        r12 = v.relation_between(t1, t2).name
        r23 = v.relation_between(t2, t3).name
        r13 = v.relation_between(t1, t3).name
        out.append(Constraint(
            f"trans:{t1}:{t2}:{t3}",
            TRANSITIVITY,
            f"{r12}, {r23} and {r13} agree: any two links of a {t1}-{t2}-{t3} triangle imply the third",
            tuple(clauses),
        ))
    return out
