import pathlib

import pytest

from gogkit import load_graph

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_path(name):
    return FIXTURES / f"{name}.json"


@pytest.fixture
def graph():
    def _load(name):
        return load_graph(fixture_path(name))
    return _load
