"""Summary statistics over an explanation sequence document."""

from __future__ import annotations

from collections import Counter

from .model import BIJECTIVITY, CLUE, TRANSITIVITY

CATEGORIES = ("1 bij.", "1 trans.", "1 clue", "1 clue+i.", "mult i.", "mult c.")
FACT_BUCKETS = ("0", "1", "2", "3", ">3")


def category(kinds) -> str:
    """Constraint-usage class of a step from the kinds of its constraints."""
    kinds = list(kinds)
    nc = kinds.count(CLUE)
    if nc >= 2:
        return "mult c."
    if len(kinds) == 1:
        return {BIJECTIVITY: "1 bij.", TRANSITIVITY: "1 trans.", CLUE: "1 clue"}[kinds[0]]
    return "1 clue+i." if nc == 1 else "mult i."


def _mean(xs):
    xs = list(xs)
    return round(sum(xs) / len(xs), 4) if xs else None


def _pct(k, n):
    return round(100.0 * k / n, 2) if n else 0.0


def emit_stats(doc) -> dict:
    """Sequence, fact-usage and nesting statistics as a JSON-ready dict.

    ``doc`` is a SequenceDocument (anything with ``steps`` of step records).
    """
    steps = list(doc.steps)
    n = len(steps)
    cats = [category(s.kinds) for s in steps]
    count = Counter(cats)
    costs = [s.cost for s in steps]
    out: dict = {
        "steps": n,
        "mean_cost": _mean(costs),
        "max_cost": max(costs) if costs else None,
        "categories": {c: _pct(count[c], n) for c in CATEGORIES},
        "category_counts": {c: count[c] for c in CATEGORIES},
    }

    facts = {
        "all": _mean(len(s.facts) for s in steps),
        "bij": _mean(len(s.facts) for s, c in zip(steps, cats) if c == "1 bij."),
        "trans": _mean(len(s.facts) for s, c in zip(steps, cats) if c == "1 trans."),
        "clue": _mean(len(s.facts) for s in steps if CLUE in s.kinds),
        "mult_i": _mean(len(s.facts) for s, c in zip(steps, cats) if c == "mult i."),
    }
    out["facts_used"] = facts
    clue_steps = [s for s in steps if CLUE in s.kinds]
    buckets = Counter(str(len(s.facts)) if len(s.facts) <= 3 else ">3" for s in clue_steps)
    out["clue_fact_distribution"] = {b: _pct(buckets[b], len(clue_steps)) for b in FACT_BUCKETS}

    with_nested = [s for s in steps if any(x.complete for x in s.nested)]
    hard = {c: [s for s, k in zip(steps, cats) if k == c] for c in ("1 clue+i.", "mult i.")}
    seqs = [x for s in steps for x in s.nested if x.complete]
    nested_steps = [(s, sub) for s in steps for x in s.nested if x.complete for sub in x.steps]
    ncat = Counter(category(sub.kinds) for _, sub in nested_steps)
    ratios = [sub.cost / s.cost for s, sub in nested_steps if s.cost]
    out["nested"] = {
        "steps_with_nested": _pct(len(with_nested), n),
        "of_clue_i": _pct(sum(1 for s in hard["1 clue+i."] if s in with_nested), len(hard["1 clue+i."])),
        "of_mult_i": _pct(sum(1 for s in hard["mult i."] if s in with_nested), len(hard["mult i."])),
        "sequences": len(seqs),
        "incomplete": sum(1 for s in steps for x in s.nested if not x.complete),
        "mean_length": _mean(len(x.steps) for x in seqs),
        "composition": {c: _pct(ncat[c], len(nested_steps)) for c in CATEGORIES},
        "cost_ratio": {
            "count": len(ratios),
            "min": round(min(ratios), 4) if ratios else None,
            "mean": _mean(ratios),
            "max": round(max(ratios), 4) if ratios else None,
        },
    }
    return out


def format_stats(stats: dict, name: str = "") -> str:
    """Plain-text tables in the layout of the usual puzzle comparison tables."""
    lines = []
    title = f"sequence {name}".strip()
    lines.append(title)
    lines.append(f"  steps {stats['steps']}   mean cost {stats['mean_cost']}   max cost {stats['max_cost']}")
    lines.append("  constraint use: " + "  ".join(f"{c} {v:.2f}%" for c, v in stats["categories"].items()))
    fu = stats["facts_used"]
    lines.append("  mean facts used: " + "  ".join(f"{k} {'-' if v is None else f'{v:.2f}'}" for k, v in fu.items()))
    lines.append("  clue steps using k facts: " +
                 "  ".join(f"{k}: {v:.2f}%" for k, v in stats["clue_fact_distribution"].items()))
    ns = stats["nested"]
    lines.append(f"  nested: {ns['steps_with_nested']:.2f}% of all steps, "
                 f"{ns['of_clue_i']:.2f}% of clue+i. steps, {ns['of_mult_i']:.2f}% of mult i. steps, "
                 f"mean length {ns['mean_length']}")
    lines.append("  nested composition: " + "  ".join(f"{c} {v:.2f}%" for c, v in ns["composition"].items()))
    r = ns["cost_ratio"]
    lines.append(f"  nested/parent cost ratio: n={r['count']} min={r['min']} mean={r['mean']} max={r['max']}")
    return "\n".join(lines) + "\n"
