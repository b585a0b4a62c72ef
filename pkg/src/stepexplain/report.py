"""Self-contained HTML report: one staircase grid per step."""

from __future__ import annotations

from html import escape

from .document import SequenceDocument, StepRecord
from .puzzle import build_vocabulary
from .stats import category

_CSS = """
body{font-family:sans-serif;margin:1.5em;color:#222}
h1{font-size:1.4em}
.step{border-top:1px solid #bbb;padding:.6em 0}
.meta{font-size:.9em;color:#555}
table.grid{border-collapse:collapse;margin:.4em 0;font-size:.75em}
table.grid td,table.grid th{border:1px solid #999;width:1.6em;height:1.6em;text-align:center;padding:0}
table.grid th.col{writing-mode:vertical-rl;height:6em;font-weight:normal}
table.grid th.row{text-align:right;padding-right:.3em;font-weight:normal;width:auto}
table.grid th.blank,table.grid td.blank{border:none}
td.t{background:#d9f2d9}
td.f{background:#f7e1e1}
td.new{outline:2px solid #1f5fbf;outline-offset:-2px;font-weight:bold}
td.used{background:#ffe9a8}
td.clash{background:#e04848;color:#fff}
ul.cons{margin:.2em 0}
li.clue{font-weight:bold}
details{margin-left:1.5em}
.contra{color:#b00;font-weight:bold}
"""


class _Grid:
    """Staircase layout: first type on top, the rest reversed below."""

    def __init__(self, v):
        self.v = v
        names = v.type_names
        self.cols = names[1:]
        self.rows = names[:1] + names[:0:-1][:-1] if len(names) > 2 else names[:1]

    def html(self, known: set[int], new=frozenset(), used=frozenset(), clash=frozenset()) -> str:
        v = self.v
        order = v.type_names
        out = ['<table class="grid"><tr><th class="blank"></th>']
        for ct in self.cols:
            for e in v.domain[ct]:
                out.append(f'<th class="col">{escape(e)}</th>')
        out.append("</tr>")
        for rt in self.rows:
            for r in v.domain[rt]:
                out.append(f'<tr><th class="row">{escape(r)}</th>')
                for ct in self.cols:
                    shown = rt == order[0] or order.index(ct) < order.index(rt)
                    for c in v.domain[ct]:
                        if not shown or rt == ct:
                            out.append('<td class="blank"></td>')
                            continue
                        a = v.link(r, c)
                        out.append(self._cell(a, known, new, used, clash))
                out.append("</tr>")
        out.append("</table>")
        return "".join(out)

    @staticmethod
    def _cell(a, known, new, used, clash):
        cls = []
        mark = ""
        if a in clash or -a in clash:
            return '<td class="clash">!</td>'
        if a in known:
            cls.append("t")
            mark = "&#9679;"
        elif -a in known:
            cls.append("f")
            mark = "&#215;"
        if a in new or -a in new:
            cls.append("new")
        elif a in used or -a in used:
            cls.append("used")
        return f'<td class="{" ".join(cls)}">{mark}</td>'


def _cons_list(rec: StepRecord) -> str:
    items = "".join(
        f'<li class="{escape(c.kind)}"><code>{escape(c.id)}</code> {escape(c.text)}</li>' for c in rec.constraints
    )
    return f'<ul class="cons">{items}</ul>'


def _lits(v, strs):
    return {v.parse_lit(s) for s in strs}


def render_html(doc: SequenceDocument) -> str:
    v = build_vocabulary(doc.puzzle)
    grid = _Grid(v)
    known = _lits(v, doc.initial)
    parts = [
        "<!DOCTYPE html><html><head><meta charset='utf-8'>",
        f"<title>Explanation of {escape(doc.name)}</title><style>{_CSS}</style></head><body>",
        f"<h1>Step-wise explanation: {escape(doc.name)}</h1>",
        f"<p class='meta'>{len(doc.steps)} steps. Clues:</p><ol>",
    ]
    parts.extend(f"<li>{escape(c.text)}</li>" for c in doc.puzzle.clues)
    parts.append("</ol><h2>Initial grid</h2>")
    parts.append(grid.html(known))
    for rec in doc.steps:
        facts, derived = _lits(v, rec.facts), _lits(v, rec.derived)
        known |= derived
        parts.append(f"<div class='step' id='step{rec.index}'><h3>Step {rec.index}</h3>")
        parts.append(f"<p class='meta'>cost {rec.cost:g}, {escape(category(rec.kinds))}, "
                     f"{len(rec.facts)} fact(s) used, derives: {escape(', '.join(rec.derived))}</p>")
        parts.append(_cons_list(rec))
        parts.append(grid.html(known, derived, facts))
        for nest in rec.nested:
            parts.append(_nested_html(v, grid, rec, nest))
        parts.append("</div>")
    parts.append("</body></html>\n")
    return "".join(parts)


def _nested_html(v, grid, parent: StepRecord, nest) -> str:
    state = "" if nest.complete else f" (incomplete, blocked at cost {nest.blocking_cost:g})"
    out = [f"<details><summary>Why {escape(nest.target)}? Suppose the opposite{state}</summary>"]
    cur = _lits(v, parent.facts) | {-v.parse_lit(nest.target)}
    out.append(grid.html(cur, {-v.parse_lit(nest.target)}))
    for i, sub in enumerate(nest.steps, 1):
        facts, derived = _lits(v, sub.facts), _lits(v, sub.derived)
        clash = {l for l in derived if -l in cur}
        cur = cur | derived
        out.append(f"<p class='meta'>{i}. cost {sub.cost:g}, derives {escape(', '.join(sub.derived))}</p>")
        out.append(_cons_list(sub))
        out.append(grid.html(cur - clash, derived - clash, facts, clash))
        if clash:
            out.append("<p class='contra'>Contradiction, so the assumption is false.</p>")
    out.append("</details>")
    return "".join(out)
