import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gored.algebra import algebra_basis  # noqa: E402
from gored.cli import fixture_path  # noqa: E402
from gored.presentation import load_presentation  # noqa: E402

FIXTURES = ["ex46", "ex47", "ex47B", "ex47C", "ex48", "loop-x2", "loop-x3"]


@lru_cache(maxsize=None)
def pres(name):
    return load_presentation(fixture_path(name + ".alg"))


@lru_cache(maxsize=None)
def alg(name):
    return algebra_basis(pres(name))


@pytest.fixture(params=FIXTURES)
def fixture_name(request):
    return request.param
