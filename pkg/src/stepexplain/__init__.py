"""Step-wise, cost-minimal explanations of constraint propagation for logic grid puzzles."""

from .consequence import TheoryUnsatisfiable, is_consistent, max_consequence
from .cost import CostParams, basecost, candidate_subsets, f, g
from .explain import Explainer, ExplanationSequence, NothingToExplain, SequenceStep, greedy_explain, \
    min_explanation
from .model import Constraint, Explanation, Literal, PartialInterpretation, Theory, Vocabulary, \
    atom_count, is_more_precise
from .mus import MusQuery, MusResult, NotUnsat, extract_mus
from .nested import NestedSequence, attach_nested, nested_explanations
from .oracle import OracleFactory, ResourceLimit, Solver, SolveResult
from .puzzle import load_puzzle, shipped_puzzle, shipped_puzzles

__version__ = "0.1.0"
