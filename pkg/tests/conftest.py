import json
import pathlib

import pytest

from storyloom.embeddings import load_vectors
from storyloom.grammar import parse_grammar, load_grammar

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixed_model():
    return load_vectors(str(DATA / "fixed.vec"))


@pytest.fixture(scope="session")
def spread_model():
    return load_vectors(str(DATA / "spread.vec"))


@pytest.fixture(scope="session")
def toy24_grammar():
    return load_grammar(str(DATA / "toy24.json"))


@pytest.fixture
def six_phenotype_grammar():
    return parse_grammar(json.dumps({
        "a": ["x", "y"],
        "b": ["p", "q", "r"],
        "origin": ["#a# #b#"],
    }))
