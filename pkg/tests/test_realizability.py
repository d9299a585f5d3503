import pytest

from src.geometry.colourful import depth_system, random_config
from src.geometry.realizability import (
    CircularType,
    contains_origin,
    induced_system,
    is_realizable_2d,
    relabelings,
    type_from_config,
    witness_config,
)
from src.hypergraph.core import ClassShape, OctahedralSystem, is_octahedral
from src.hypergraph.errors import NotGeneralPositionError, ShapeError

EVENLY_SPACED = CircularType(tuple(range(0, 18, 2)))


def test_contains_origin():
    assert contains_origin(0, 6, 12)
    assert contains_origin(1, 8, 15)
    assert not contains_origin(0, 1, 2)
    assert not contains_origin(0, 4, 9 + 8)
    assert not contains_origin(3, 12, 15)


def test_evenly_spaced_type():
    system = induced_system(EVENLY_SPACED)
    assert is_octahedral(system.shape, system.mask)
    assert system.edges
    assert depth_system(witness_config(EVENLY_SPACED)).system.mask == system.mask


def test_clustered_type_has_no_edges():
    system = induced_system(CircularType(tuple(range(9))))
    assert not system.edges


def test_circular_type_validation():
    with pytest.raises(ShapeError):
        CircularType((0, 1, 2))
    with pytest.raises(ShapeError):
        CircularType((0, 9, 2, 3, 4, 5, 6, 7, 8))


def test_slots_and_word():
    t = CircularType.from_slots([(q, q % 2) for q in range(9)])
    assert t.slots() == [(q, q % 2) for q in range(9)]
    word = t.word()
    assert sorted(s for s in word if s.startswith("p")) == sorted(f"p{q}" for q in range(9))
    assert t.normalised().positions[0] == 0
    assert set(t.to_dict()) == {"word", "tangent_parameters"}


def test_type_of_a_configuration_reproduces_its_depth_system():
    compared = 0
    for seed in range(20):
        cfg = random_config(2, (3, 3, 3), seed=seed, require_hull=seed % 2 == 0)
        try:
            t = type_from_config(cfg)
        except NotGeneralPositionError:
            # two points of one class collinear with the origin
            continue
        assert induced_system(t).mask == depth_system(cfg).system.mask
        compared += 1
    assert compared >= 15


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sampled_systems_are_realizable(seed):
    system = depth_system(random_config(2, (3, 3, 3), seed=seed)).system
    verdict = is_realizable_2d(system)
    assert verdict.realizable
    assert verdict.matched.mask == system.mask
    assert depth_system(witness_config(verdict.witness)).system.mask == system.mask
    data = verdict.to_dict()
    assert data["realizable"] is True
    assert data["up_to_iso"] is False
    assert isinstance(data["hull_condition"], bool)


def test_relabeled_system_matches_up_to_isomorphism():
    system = induced_system(EVENLY_SPACED)
    swapped = OctahedralSystem(system.shape, frozenset((e[1], e[0], e[2]) for e in system.edges))
    verdict = is_realizable_2d(swapped, up_to_iso=True)
    assert verdict.realizable
    assert verdict.up_to_iso


def test_relabelings_of_omega9(omega):
    images = relabelings(omega)
    assert len(images) == 18
    assert images[0] == omega
    assert len({s.mask for s in images}) == 18


def test_realizability_needs_333():
    with pytest.raises(ShapeError):
        is_realizable_2d(OctahedralSystem(ClassShape((3, 3)), frozenset({(0, 0)})))


@pytest.mark.slow
def test_omega9_is_not_realizable(omega):
    verdict = is_realizable_2d(omega)
    assert not verdict.realizable
    assert verdict.witness is None
    assert verdict.types_examined > 0


def test_reflection_induces_the_same_system():
    for seed in range(5):
        cfg = random_config(2, (3, 3, 3), seed=seed)
        try:
            t = type_from_config(cfg)
        except NotGeneralPositionError:
            continue
        mirror = t.reflected()
        assert mirror.positions[0] == 0
        assert induced_system(mirror).mask == induced_system(t).mask


def test_mirror_image_of_a_found_witness_is_also_found():
    system = induced_system(EVENLY_SPACED)
    verdict = is_realizable_2d(system)
    mirrored = is_realizable_2d(induced_system(verdict.witness.reflected()))
    assert mirrored.realizable
    assert mirrored.matched.mask == system.mask


def test_parallel_search_matches_serial():
    system = depth_system(random_config(2, (3, 3, 3), seed=1)).system
    serial = is_realizable_2d(system, workers=1)
    parallel = is_realizable_2d(system, workers=2)
    assert serial.realizable and parallel.realizable
    assert parallel.witness == serial.witness
    assert parallel.types_examined == serial.types_examined
