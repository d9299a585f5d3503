import json

import numpy as np
import pytest

from src.config.config import config
from src.hypergraph.constructions import omega9
from src.hypergraph.core import ClassShape, OctahedralSystem
from src.hypergraph.f2_space import coboundary_basis
from src.search import result_cache


@pytest.fixture
def shape333():
    return ClassShape((3, 3, 3))


@pytest.fixture
def omega():
    return omega9()


@pytest.fixture
def small_budget():
    return config.budget.with_overrides(max_nodes=2_000_000, max_seconds=120, workers=1)


@pytest.fixture(autouse=True)
def empty_result_cache():
    result_cache.clear_cache()
    yield
    result_cache.clear_cache()


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document to a temp file and return its path"""
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return write


def random_span_member(shape: ClassShape, rng: np.random.Generator) -> OctahedralSystem:
    """A uniformly random octahedral system: a random combination of basis vectors"""
    mask = 0
    for v in coboundary_basis(shape).independent:
        if rng.integers(0, 2):
            mask ^= v
    return OctahedralSystem.from_mask(shape, mask)
