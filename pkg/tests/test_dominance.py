import numpy as np
import pytest

from src.hypergraph.constructions import fan_construction, inductive_upper, omega9, upper_complement
from src.hypergraph.core import ClassShape, OctahedralSystem, VertexRef, has_isolated_vertex, is_octahedral
from src.hypergraph.dominance import (
    build_dominance,
    delete_sink,
    is_sink_clique,
    mutual_arcs_match_twins,
    sink_clique,
    validate_dominance,
)
from src.hypergraph.errors import PreconditionError, ShapeError
from src.hypergraph.f2_space import block_covered, from_columns, iter_span_blocks
from tests.conftest import random_span_member


def _check_contracts(system):
    digraph = build_dominance(system)
    report = validate_dominance(digraph)
    assert report.ok, report.violations
    assert mutual_arcs_match_twins(system) is None
    clique = sink_clique(system)
    assert clique
    assert is_sink_clique(digraph, clique)
    try:
        deleted = delete_sink(system, clique).system
    except ShapeError:
        # a class of size 2 would drop below 2
        assert any(m == 2 for m in system.shape.sizes)
        return
    assert is_octahedral(deleted.shape, deleted.mask)
    assert not has_isolated_vertex(deleted.shape, deleted.mask)


@pytest.mark.parametrize(
    "system",
    [
        omega9(),
        inductive_upper(ClassShape((3, 3, 3))),
        inductive_upper(ClassShape((2, 3, 4, 3))),
        upper_complement(ClassShape((3, 3, 3))),
    ],
    ids=["omega9", "inductive-333", "inductive-2343", "complement-333"],
)
def test_construction_digraphs_satisfy_contracts(system):
    _check_contracts(system)


def test_random_covering_systems_satisfy_contracts(shape333):
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 200:
        system = random_span_member(shape333, rng)
        if not system.edges or has_isolated_vertex(shape333, system.mask):
            continue
        _check_contracts(system)
        checked += 1


def test_omega9_sink_clique_deletion(omega):
    clique = sink_clique(omega)
    deletion = delete_sink(omega, clique)
    assert deletion.system.shape.total < omega.shape.total
    kept = set(deletion.mapping)
    assert not kept & clique


def test_fan_needs_allow_isolated(shape333):
    fan = fan_construction(shape333)
    with pytest.raises(PreconditionError):
        sink_clique(fan)
    assert sink_clique(fan, allow_isolated=True) == frozenset({VertexRef(0, 0)})


def test_delete_sink_rejects_non_sink(omega):
    digraph = build_dominance(omega)
    not_sink = next(
        frozenset({v}) for v in omega.shape.vertices() if not is_sink_clique(digraph, frozenset({v}))
    )
    with pytest.raises(PreconditionError):
        delete_sink(omega, not_sink)


def test_delete_empty_set_is_identity(omega):
    assert delete_sink(omega, []).system == omega


def test_sink_clique_needs_edges(shape333):
    with pytest.raises(PreconditionError):
        sink_clique(OctahedralSystem.empty(shape333))


@pytest.mark.slow
def test_every_covering_333_system_satisfies_contracts(shape333):
    for block in iter_span_blocks(shape333):
        covered = block_covered(block, shape333)
        for idx in covered.nonzero()[0]:
            _check_contracts(OctahedralSystem.from_mask(shape333, from_columns(block[idx])))
