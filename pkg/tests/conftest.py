import pathlib

import pytest

from compsem.tensor import SemanticTensor, VocabIndex

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "toy"

# 4-dimensional worked example used across the suite: four nouns over the
# basis (far, room, scientific, elect), plus the two observed uses of "show".
NOUN_WEIGHTS = {
    "table": [6.6, 27.0, 0.0, 0.0],
    "map": [5.6, 7.4, 5.4, 0.0],
    "result": [7.0, 0.99, 13.0, 4.2],
    "location": [5.9, 7.3, 6.1, 0.0],
}

SHOW_RELATIONS = [("table", "result"), ("map", "location")]


@pytest.fixture(scope="session")
def toy_vocab():
    return VocabIndex(["far", "room", "scientific", "elect"])


@pytest.fixture(scope="session")
def toy_vectors():
    return {name: SemanticTensor.vector(w) for name, w in NOUN_WEIGHTS.items()}


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES
