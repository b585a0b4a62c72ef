import warnings

import pytest

from stepexplain.cli import run_explain
from stepexplain.document import Settings
from stepexplain.puzzle import load_puzzle, shipped_puzzle, shipped_puzzles

MICRO = ["micro_2x3", "micro_3x3", "micro_3x4", "micro_4x3"]


def loaded(name):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return load_puzzle(shipped_puzzle(name))


@pytest.fixture(scope="session")
def puzzles():
    return {name: loaded(name) for name in shipped_puzzles()}


@pytest.fixture(scope="session")
def pasta(puzzles):
    return puzzles["pasta"]


_runs = {}


def explained(name, **settings):
    key = (name, tuple(sorted(settings.items())))
    if key not in _runs:
        _runs[key] = run_explain(loaded(name), settings=Settings(**settings))
    return _runs[key]


@pytest.fixture(scope="session")
def pasta_doc():
    return explained("pasta")
