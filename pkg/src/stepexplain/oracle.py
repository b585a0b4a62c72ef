"""A small CDCL SAT solver with assumptions and unsat cores.

External literals are DIMACS-style signed ints.  Internally literal ``v``
is code ``2v`` and ``-v`` is ``2v+1``.  Branching is static: lowest
variable id first (or a seeded permutation), positive phase, except for
variables registered as selectors, which default to false.
"""

from __future__ import annotations

import random
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Sequence


class ResourceLimit(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveResult:
    satisfiable: bool
    model: frozenset | None = None
    core: frozenset | None = None

    @property
    def status(self) -> str:
        return "satisfiable" if self.satisfiable else "unsatisfiable"


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class Solver:
    def __init__(self, nvars: int = 0, clauses: Iterable[Sequence[int]] = (), seed: int = 0,
                 conflict_limit: int | None = None):
        self.n = 0
        self.ok = True
        self.conflict_limit = conflict_limit
        self._rng = random.Random(seed) if seed else None
        self._val: list[int] = [0, 0]
        self._level: list[int] = [0]
        self._reason: list = [None]
        self._seen: list[bool] = [False]
        self._phase: list[int] = [0]  # preferred code offset: 0 positive, 1 negative
        self._order: list[int] = []
        self._pos: list[int] = [0]
        self._next = 0
        self._watches: list[list] = [[], []]
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._clauses: list[list[int]] = []
        self._learnts: list[list[int]] = []
        self._original: list[tuple[int, ...]] = []
        self._free_acts: list[int] = []
        self.model_vars: int | None = None
        self.max_learnts = 4000
        self.stats = {"solves": 0, "conflicts": 0, "decisions": 0}
        self._grow(nvars)
        for cl in clauses:
            self.add_clause(cl)

    # -- variables ---------------------------------------------------------

    def _grow(self, nvars: int):
        if nvars <= self.n:
            return
        new = list(range(self.n + 1, nvars + 1))
        if self._rng is not None:
            self._rng.shuffle(new)
        for v in range(self.n + 1, nvars + 1):
            self._val.extend((0, 0))
            self._level.append(0)
            self._reason.append(None)
            self._seen.append(False)
            self._phase.append(0)
            self._pos.append(0)
            self._watches.extend(([], []))
        for v in new:
            self._pos[v] = len(self._order)
            self._order.append(v)
        self.n = nvars

    def new_var(self, selector: bool = False) -> int:
        self._grow(self.n + 1)
        if selector:
            self._phase[self.n] = 1
        return self.n

    def set_phase(self, var: int, positive: bool):
        self._phase[var] = 0 if positive else 1

    # -- clauses -----------------------------------------------------------

    @staticmethod
    def _code(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def add_clause(self, lits: Sequence[int]) -> bool:
        """Add a permanent clause at the root.  Returns False once unsatisfiable."""
        if self._trail_lim:
            raise RuntimeError("clauses can only be added at decision level 0")
        top = max((abs(l) for l in lits), default=0)
        if top > self.n:
            self._grow(top)
        self._original.append(tuple(lits))
        if not self.ok:
            return False
        val = self._val
        codes = []
        for l in lits:
            c = self._code(l)
            if val[c] == 1 or (c ^ 1) in codes:
                return True
            if val[c] == -1 or c in codes:
                continue
            codes.append(c)
        if not codes:
            self.ok = False
            return False
        if len(codes) == 1:
            self._assign(codes[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(codes)
        self._clauses.append(codes)
        return True

    def _attach(self, c: list[int]):
        self._watches[c[0]].append(c)
        self._watches[c[1]].append(c)

    def _rewatch(self):
        self._watches = [[] for _ in range(2 * self.n + 2)]
        for c in self._clauses:
            self._attach(c)
        for c in self._learnts:
            self._attach(c)

    def _reduce_learnts(self):
        keep = self.max_learnts // 2
        short = [c for c in self._learnts if len(c) <= 3]
        long_ = [c for c in self._learnts if len(c) > 3]
        self._learnts = short + long_[-keep:]
        self._rewatch()

    # -- core search -----------------------------------------------------------

    def _assign(self, code: int, reason):
        self._val[code] = 1
        self._val[code ^ 1] = -1
        v = code >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(code)

    def _propagate(self):
        val = self._val
        watches = self._watches
        trail = self._trail
        level = self._level
        reason = self._reason
        lvl = len(self._trail_lim)
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            fl = p ^ 1
            ws = watches[fl]
            n = len(ws)
            i = j = 0
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self._qhead = len(trail)
                        return c
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    level[v] = lvl
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        return None

    def _analyze(self, confl):
        seen = self._seen
        level = self._level
        trail = self._trail
        reason = self._reason
        lvl = len(self._trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        while True:
            start = 0 if p == -1 else 1
            for k in range(start, len(confl)):
                q = confl[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    if level[v] >= lvl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause (local minimisation)
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or not all(seen[x >> 1] or level[x >> 1] == 0 for x in r[1:]):
                kept.append(q)
        for q in learnt[1:]:
            seen[q >> 1] = False
        learnt = kept
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _analyze_final(self, p: int) -> set[int]:
        """Assumption codes responsible for falsifying assumption ``p``."""
        core = {p}
        if not self._trail_lim:
            return core
        seen = self._seen
        seen[p >> 1] = True
        trail = self._trail
        for i in range(len(trail) - 1, self._trail_lim[0] - 1, -1):
            x = trail[i] >> 1
            if not seen[x]:
                continue
            r = self._reason[x]
            if r is None:
                core.add(trail[i])
            else:
                for q in r[1:]:
                    if self._level[q >> 1] > 0:
                        seen[q >> 1] = True
            seen[x] = False
        seen[p >> 1] = False
        return core

    def _cancel_until(self, lvl: int):
        if len(self._trail_lim) <= lvl:
            return
        val = self._val
        pos = self._pos
        nxt = self._next
        stop = self._trail_lim[lvl]
        trail = self._trail
        for i in range(len(trail) - 1, stop - 1, -1):
            c = trail[i]
            val[c] = 0
            val[c ^ 1] = 0
            pp = pos[c >> 1]
            if pp < nxt:
                nxt = pp
        del trail[stop:]
        del self._trail_lim[lvl:]
        self._qhead = len(trail)
        self._next = nxt

    def _pick(self):
        order = self._order
        val = self._val
        i = self._next
        n = len(order)
        while i < n and val[2 * order[i]] != 0:
            i += 1
        self._next = i
        if i == n:
            return None
        v = order[i]
        return 2 * v + self._phase[v]

    def solve(self, assumptions: Sequence[int] = (), conflict_limit: int | None = None,
              phases: dict | None = None, block: Sequence[int] | None = None) -> SolveResult:
        """Decide satisfiability under ``assumptions``.

        On unsat, ``core`` is a subset of the assumptions that already
        conflicts with the clauses.  ``phases`` temporarily overrides the
        preferred polarity of some variables (``{var: bool}``).  ``block``
        is a clause that holds for this call only; it never shows up in a
        core.
        """
        if block is not None:
            return self._solve_blocked(assumptions, conflict_limit, phases, block)
        self.stats["solves"] += 1
        if not self.ok:
            return SolveResult(False, core=frozenset())
        if len(self._learnts) > self.max_learnts:
            self._reduce_learnts()
        limit = conflict_limit if conflict_limit is not None else self.conflict_limit
        top = max((abs(l) for l in assumptions), default=0)
        if top > self.n:
            self._grow(top)
        assumps = [self._code(l) for l in assumptions]
        saved = None
        if phases:
            saved = {v: self._phase[v] for v in phases}
            for v, positive in phases.items():
                self._phase[v] = 0 if positive else 1
        try:
            return self._search(assumps, limit)
        finally:
            if saved:
                for v, ph in saved.items():
                    self._phase[v] = ph

    def _solve_blocked(self, assumptions, conflict_limit, phases, block) -> SolveResult:
        if not self.ok:
            return SolveResult(False, core=frozenset())
        top = max((abs(l) for l in block), default=0)
        if top > self.n:
            self._grow(top)
        codes = []
        for l in block:
            c = self._code(l)
            if self._val[c] == 1 and self._level[c >> 1] == 0:
                return self.solve(assumptions, conflict_limit, phases)
            if self._val[c] == 0 and c not in codes:
                codes.append(c)
        if not codes:
            return SolveResult(False, core=frozenset())
        if len(self._learnts) > self.max_learnts:
            self._reduce_learnts()
        act = self._free_acts.pop() if self._free_acts else self.new_var()
        na = 2 * act + 1
        temp = [na, *codes]
        self._attach(temp)
        mark = len(self._learnts)
        try:
            res = self.solve([*assumptions, act], conflict_limit, phases)
        finally:
            self._cancel_until(0)
            self._detach(temp)
            fresh = self._learnts[mark:]
            if fresh:
                keep = []
                for c in fresh:
                    if na in c:
                        self._detach(c)
                    else:
                        keep.append(c)
                self._learnts[mark:] = keep
            if self._val[na] == 0:
                self._free_acts.append(act)
        if res.satisfiable or res.core is None:
            return res
        return SolveResult(False, core=res.core - {act})

    def _detach(self, c):
        for w in (c[0], c[1]):
            ws = self._watches[w]
            for i, x in enumerate(ws):
                if x is c:
                    del ws[i]
                    break

    def _search(self, assumps, limit) -> SolveResult:
        conflicts = 0
        restart_no = 0
        restart_at = 100 * _luby(0)
        since = 0
        trail_lim = self._trail_lim
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                since += 1
                self.stats["conflicts"] += 1
                if not trail_lim:
                    self.ok = False
                    return SolveResult(False, core=frozenset())
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._attach(learnt)
                    self._learnts.append(learnt)
                    self._assign(learnt[0], learnt)
                if limit is not None and conflicts > limit:
                    self._cancel_until(0)
                    raise ResourceLimit(f"conflict budget of {limit} exceeded")
                if since >= restart_at:
                    restart_no += 1
                    restart_at = 100 * _luby(restart_no)
                    since = 0
                    self._cancel_until(0)
                continue
            d = len(trail_lim)
            if d < len(assumps):
                p = assumps[d]
                vp = self._val[p]
                if vp == 1:
                    trail_lim.append(len(self._trail))
                    continue
                if vp == -1:
                    core = self._analyze_final(p)
                    self._cancel_until(0)
                    return SolveResult(False, core=frozenset(self._ext(c) for c in core))
                trail_lim.append(len(self._trail))
                self._assign(p, None)
                continue
            code = self._pick()
            if code is None:
                top = self.n if self.model_vars is None else self.model_vars
                val = self._val
                model = frozenset(v if val[2 * v] == 1 else -v for v in range(1, top + 1))
                self._cancel_until(0)
                return SolveResult(True, model=model)
            self.stats["decisions"] += 1
            trail_lim.append(len(self._trail))
            self._assign(code, None)

    @staticmethod
    def _ext(code: int) -> int:
        return -(code >> 1) if code & 1 else code >> 1

    def propagate_units(self, assumptions: Sequence[int] = ()):
        """Unit-propagation fixpoint under ``assumptions``.

        Returns ``(True, literals)`` or ``(False, None)`` when propagation
        alone refutes the assumptions.
        """
        if not self.ok:
            return False, None
        top = max((abs(l) for l in assumptions), default=0)
        if top > self.n:
            self._grow(top)
        self._trail_lim.append(len(self._trail))
        try:
            for l in assumptions:
                c = self._code(l)
                if self._val[c] == -1:
                    return False, None
                if self._val[c] == 0:
                    self._assign(c, None)
                if self._propagate() is not None:
                    return False, None
            return True, frozenset(self._ext(c) for c in self._trail)
        finally:
            self._cancel_until(0)

    def value(self, lit: int):
        """Root-level value of ``lit``: True, False or None."""
        v = self._val[self._code(lit)]
        return None if v == 0 or self._level[abs(lit)] != 0 else v == 1

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {len(self._original)}"]
        lines.extend(" ".join(map(str, cl)) + " 0" for cl in self._original)
        return "\n".join(lines) + "\n"


def solve(clauses: Iterable[Sequence[int]], assumptions: Sequence[int] = (), nvars: int = 0) -> SolveResult:
    """One-shot convenience wrapper."""
    s = Solver(nvars, clauses)
    return s.solve(assumptions)


def propagate_units(clauses: Iterable[Sequence[int]], assumptions: Sequence[int] = (), nvars: int = 0):
    s = Solver(nvars, clauses)
    return s.propagate_units(assumptions)


class Instance:
    """A solver over a group of theory constraints, each behind a selector.

    Solve calls name the facts (plain literal assumptions) and the active
    constraints; inactive selectors are left free and default to false,
    which switches their clauses off.  Cores come back split into facts
    and constraint ids.
    """

    def __init__(self, theory, constraint_ids: Iterable[str], seed: int = 0,
                 conflict_limit: int | None = None):
        self.theory = theory
        self.ids = tuple(constraint_ids)
        self.solver = Solver(theory.nvars, seed=seed, conflict_limit=conflict_limit)
        self.solver.model_vars = theory.n_atoms
        self.selector: dict[str, int] = {}
        self.constraint_of: dict[int, str] = {}
        for cid in self.ids:
            s = self.solver.new_var(selector=True)
            self.selector[cid] = s
            self.constraint_of[s] = cid
            for cl in theory[cid].clauses:
                self.solver.add_clause((-s, *cl))
        self.atoms = theory.atoms_of(self.ids)

    def solve(self, facts: Sequence[int] = (), constraints: Iterable[str] | None = None,
              hard: Sequence[int] = (), phases=None, block: Sequence[int] | None = None) -> SolveResult:
        active = self.ids if constraints is None else constraints
        assumptions = list(hard)
        assumptions.extend(self.selector[c] for c in active)
        assumptions.extend(facts)
        return self.solver.solve(assumptions, phases=phases, block=block)

    def split_core(self, core: frozenset):
        cons = frozenset(self.constraint_of[l] for l in core if l in self.constraint_of)
        facts = frozenset(l for l in core if abs(l) <= self.theory.n_atoms)
        return facts, cons

    def to_dimacs(self) -> str:
        return self.solver.to_dimacs()


class OracleFactory:
    """Builds and caches :class:`Instance` objects per constraint group."""

    def __init__(self, theory, seed: int = 0, conflict_limit: int | None = None, maxsize: int = 512):
        self.theory = theory
        self.seed = seed
        self.conflict_limit = conflict_limit
        self.maxsize = maxsize
        self._cache: OrderedDict = OrderedDict()

    def instance(self, constraint_ids: Iterable[str]) -> Instance:
        key = self.theory.ordered(constraint_ids)
        inst = self._cache.get(key)
        if inst is not None:
            self._cache.move_to_end(key)
            return inst
        inst = Instance(self.theory, key, seed=self.seed, conflict_limit=self.conflict_limit)
        self._cache[key] = inst
        if len(self._cache) > self.maxsize:
            self._cache.popitem(last=False)
        return inst

    def fresh(self, constraint_ids: Iterable[str]) -> Instance:
        return Instance(self.theory, self.theory.ordered(constraint_ids), seed=self.seed,
                        conflict_limit=self.conflict_limit)
