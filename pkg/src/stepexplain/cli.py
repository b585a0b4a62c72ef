"""Command-line entry point: ``stepexplain explain|stats|check|render``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from .check import check_document
from .cost import CostParams
from .document import SequenceDocument, Settings, from_sequence
from .explain import Explainer
from .grounder import GroundingError
from .nested import nesting_hook
from .oracle import OracleFactory, ResourceLimit
from .puzzle import LoadedPuzzle, SchemaError, UnsatisfiablePuzzle, load_puzzle, shipped_puzzle, \
    shipped_puzzles
from .report import render_html
from .stats import emit_stats, format_stats

EXIT_OK, EXIT_USAGE, EXIT_UNSAT, EXIT_RESOURCE, EXIT_CHECK = 0, 1, 2, 3, 4


def run_explain(loaded: LoadedPuzzle, params: CostParams = CostParams(), settings: Settings = Settings(),
                conflict_limit: int | None = None) -> SequenceDocument:
    """Explain a loaded puzzle and package the result as a document."""
    oracle = OracleFactory(loaded.theory, seed=settings.seed, conflict_limit=conflict_limit)
    ex = Explainer(loaded.theory, params, oracle, exhaustive=settings.exhaustive_subsets)
    hook = None
    if settings.nested:
        hook = nesting_hook(ex, settings.nested_threshold, settings.prune_nested, settings.keep_incomplete)
    seq = ex.greedy_explain(loaded.initial, nested=hook)
    return from_sequence(seq, loaded.document, loaded.theory, params, settings)


def _puzzle_arg(arg: str):
    p = Path(arg)
    if p.exists():
        return p
    if arg in shipped_puzzles():
        return shipped_puzzle(arg)
    raise SchemaError(f"no puzzle file or shipped puzzle named {arg!r} (shipped: {', '.join(shipped_puzzles())})")


def _cost_params(path) -> CostParams:
    if path is None:
        return CostParams()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return CostParams(**{k: float(v) for k, v in data.items()})
    except (OSError, json.JSONDecodeError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaError(f"bad cost parameter file {path}: {exc}") from None


def _write_outputs(doc: SequenceDocument, out: Path, fmt: str) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        written.append(doc.save(out / f"{doc.name}.sequence.json"))
    if fmt in ("html", "both"):
        p = out / f"{doc.name}.html"
        p.write_text(render_html(doc), encoding="utf-8")
        written.append(p)
    return written


def cmd_explain(a) -> int:
    loaded = load_puzzle(_puzzle_arg(a.puzzle))
    for w in loaded.warnings:
        print(f"warning: {w}", file=sys.stderr)
    settings = Settings(a.seed, a.nested, a.nested_threshold, a.prune_nested, a.keep_incomplete,
                        a.exhaustive_subsets)
    doc = run_explain(loaded, _cost_params(a.cost_params), settings, a.conflict_limit)
    for p in _write_outputs(doc, Path(a.out), a.format):
        print(p)
    s = doc.summary
    print(f"{doc.name}: {s['steps']} steps, mean cost {s['mean_cost']}, max cost {s['max_cost']}")
    if a.dimacs:
        ids = [c.id for c in loaded.theory.constraints]
        p = Path(a.out) / f"{doc.name}.cnf"
        p.write_text(OracleFactory(loaded.theory).fresh(ids).to_dimacs(), encoding="utf-8")
        print(p)
    return EXIT_OK


def cmd_stats(a) -> int:
    doc = SequenceDocument.load(a.sequence)
    stats = emit_stats(doc)
    if a.json:
        print(json.dumps(stats, indent=2))
    else:
        print(format_stats(stats, doc.name), end="")
    return EXIT_OK


def cmd_check(a) -> int:
    doc = SequenceDocument.load(a.sequence)
    report = check_document(doc)
    for v in report.violations:
        print(v)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_CHECK


def cmd_render(a) -> int:
    doc = SequenceDocument.load(a.sequence)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    p = out / f"{doc.name}.html"
    p.write_text(render_html(doc), encoding="utf-8")
    print(p)
    return EXIT_OK


def cmd_list(a) -> int:
    for name in shipped_puzzles():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stepexplain", description="Step-wise explanations for logic grid puzzles.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("explain", help="explain a puzzle (file path or shipped name)")
    e.add_argument("puzzle")
    e.add_argument("--nested", action=argparse.BooleanOptionalAction, default=True)
    e.add_argument("--nested-threshold", type=float, default=100)
    e.add_argument("--prune-nested", action=argparse.BooleanOptionalAction, default=True)
    e.add_argument("--keep-incomplete", action="store_true",
                   help="also record nested runs blocked by a sub-step as costly as the parent")
    e.add_argument("--cost-params", metavar="FILE")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--exhaustive-subsets", action="store_true")
    e.add_argument("--conflict-limit", type=int, default=None)
    e.add_argument("--out", default=".")
    e.add_argument("--format", choices=("json", "html", "both"), default="both")
    e.add_argument("--dimacs", action="store_true", help="also dump the full theory as DIMACS CNF")
    e.set_defaults(func=cmd_explain)

    s = sub.add_parser("stats", help="summary tables for a sequence document")
    s.add_argument("sequence")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_stats)

    c = sub.add_parser("check", help="re-verify every step of a sequence document")
    c.add_argument("sequence")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("render", help="HTML report for a sequence document")
    r.add_argument("sequence")
    r.add_argument("--out", default=".")
    r.set_defaults(func=cmd_render)

    ls = sub.add_parser("list", help="names of the shipped puzzles")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING)
    warnings.simplefilter("ignore")
    try:
        return a.func(a)
    except UnsatisfiablePuzzle as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSAT
    except ResourceLimit as exc:
        print(f"error: resource limit reached: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SchemaError, GroundingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
