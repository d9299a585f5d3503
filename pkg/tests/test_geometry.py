from fractions import Fraction

import pytest

from src.geometry.colourful import (
    ColourConfig,
    Containment,
    RationalPoint,
    depth_system,
    in_general_position,
    mu_search,
    origin_in_hull,
    origin_in_simplex,
    random_config,
)
from src.geometry.exact import affinely_independent, rank, solve
from src.hypergraph.core import OctahedralSystem, has_isolated_vertex, is_octahedral
from src.hypergraph.errors import NotGeneralPositionError, ShapeError


def _points(*rows):
    return [RationalPoint(tuple(r)) for r in rows]


def test_exact_linear_algebra():
    assert solve([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    assert solve([[1, 2], [2, 4]], [1, 2]) is None
    assert rank([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2
    assert affinely_independent([(0, 0), (1, 0), (0, 1)])
    assert not affinely_independent([(0, 0), (1, 1), (2, 2)])


@pytest.mark.parametrize(
    "rows,expected",
    [
        (((1, 0), (0, 1), (-1, -1)), Containment.INSIDE),
        (((1, 0), (0, 1), (2, 2)), Containment.OUTSIDE),
        (((1, 0), (-1, 0), (0, 1)), Containment.BOUNDARY),
        (((-1,), (2,)), Containment.INSIDE),
        (((Fraction(1, 3),), (Fraction(5, 7),)), Containment.OUTSIDE),
    ],
)
def test_origin_in_simplex(rows, expected):
    assert origin_in_simplex(_points(*rows)) is expected


def test_degenerate_simplex_raises():
    with pytest.raises(NotGeneralPositionError):
        origin_in_simplex(_points((1, 0), (2, 0), (3, 0)))
    with pytest.raises(ShapeError):
        origin_in_simplex(_points((1, 0), (0, 1)))


def test_origin_in_hull():
    assert origin_in_hull(_points((1, 0), (-1, 0)), 2)
    assert origin_in_hull(_points((0, 0)), 2)
    assert origin_in_hull(_points((1, 1), (-2, 1), (0, -1), (5, 5)), 2)
    assert not origin_in_hull(_points((1, 1), (2, 3), (1, 0)), 2)


def test_config_validation():
    with pytest.raises(ShapeError):
        ColourConfig(2, (((1, 0),), ((0, 1),)))
    with pytest.raises(ShapeError):
        ColourConfig(1, (((1,),), ((1, 2),)))
    with pytest.raises(ShapeError):
        ColourConfig(1, (((1,),), ()))


def test_line_depth_example():
    cfg = ColourConfig(1, (((-1,), (2,)), ((1,), (-3,))))
    assert in_general_position(cfg)
    result = depth_system(cfg)
    assert result.count == 2
    assert isinstance(result.system, OctahedralSystem)
    assert result.system.edges == frozenset({(0, 0), (1, 1)})


def test_boundary_simplex_reports_selection():
    cfg = ColourConfig(1, (((0,), (1,)), ((1,), (-1,))))
    with pytest.raises(NotGeneralPositionError) as excinfo:
        depth_system(cfg)
    assert excinfo.value.selection == (0, 0)


def test_small_classes_give_plain_hypergraph():
    cfg = ColourConfig(1, (((-1,),), ((1,), (-3,))))
    result = depth_system(cfg)
    assert not isinstance(result.system, OctahedralSystem)
    assert result.count == 1


@pytest.mark.parametrize("d,sizes,seeds", [(1, (2, 3), range(10)), (2, (3, 3, 3), range(10)), (2, (3, 4, 3), range(3))])
def test_random_configs_are_octahedral(d, sizes, seeds):
    for seed in seeds:
        cfg = random_config(d, sizes, seed=seed)
        assert in_general_position(cfg)
        assert all(cfg.hull_flags())
        system = depth_system(cfg).system
        assert is_octahedral(system.shape, system.mask)
        assert not has_isolated_vertex(system.shape, system.mask)


def test_even_classes_in_three_dimensions():
    for seed in range(2):
        cfg = random_config(3, (4, 4, 4, 4), seed=seed)
        result = depth_system(cfg)
        assert result.count % 2 == 0
        assert is_octahedral(result.system.shape, result.system.mask)


def test_sampling_without_hull_condition():
    cfg = random_config(2, (2, 2, 2), seed=3, require_hull=False)
    system = depth_system(cfg).system
    assert is_octahedral(system.shape, system.mask)


def test_depth_is_invariant_under_scaling():
    cfg = random_config(2, (3, 3, 3), seed=11)
    original = depth_system(cfg).system.mask
    for factor in (Fraction(3), Fraction(1, 7), Fraction(-2)):
        scaled = ColourConfig(cfg.d, tuple(tuple(p.scaled(factor) for p in c) for c in cfg.classes))
        assert depth_system(scaled).system.mask == original


def test_sampling_is_deterministic_per_seed():
    assert random_config(2, (3, 3, 3), seed=5) == random_config(2, (3, 3, 3), seed=5)
    with pytest.raises(ShapeError):
        random_config(2, (3, 3), seed=5)


def test_config_file_form():
    cfg = random_config(2, (3, 3, 3), seed=2)
    data = cfg.to_file()
    assert data.d == 2
    assert ColourConfig.from_file(data) == cfg


def test_mu_search_on_the_line():
    result = mu_search(1, trials=5, seed=0)
    assert result.minimum == 2
    data = result.to_dict()
    assert data["minimum_found"] == 2
    assert data["known_bracket"]["lower"] == 2
    assert data["best_config"]["d"] == 1


def test_mu_search_stops_at_target():
    result = mu_search(1, trials=10, seed=0, target=2)
    assert result.trials == 1


@pytest.mark.slow
def test_many_planar_configs_are_octahedral():
    for seed in range(100):
        system = depth_system(random_config(2, (3, 3, 3), seed=seed)).system
        assert is_octahedral(system.shape, system.mask)
        assert not has_isolated_vertex(system.shape, system.mask)


@pytest.mark.slow
def test_mu_search_in_the_plane_respects_the_minimum():
    result = mu_search(2, trials=200, seed=0, target=5)
    assert result.minimum >= 5
