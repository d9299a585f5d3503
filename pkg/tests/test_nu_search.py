import threading

import pytest

from src.config.config import SearchBudget
from src.hypergraph.core import ClassShape, has_isolated_vertex, is_octahedral
from src.hypergraph.errors import DomainError, ShapeError
from src.search.bounds import bound_report
from src.search import nu_search
from src.search.nu_search import ENUMERATION, SUBSET_SEARCH, min_edges, monotonicity_experiment


def _assert_certified(outcome, expected):
    assert outcome.exhaustive
    assert outcome.nu == expected
    assert outcome.lower == outcome.upper == expected
    witness = outcome.witness
    assert witness.shape == outcome.shape
    assert len(witness) == expected
    assert is_octahedral(witness.shape, witness.mask)
    assert not has_isolated_vertex(witness.shape, witness.mask)
    assert bound_report(outcome.shape).contains(expected)


@pytest.mark.parametrize(
    "sizes,expected",
    [((2, 2), 2), ((3, 3), 4), ((2, 2, 3, 3), 4), ((2, 3, 3, 3), 5)],
)
def test_small_minimums(sizes, expected, small_budget):
    _assert_certified(min_edges(ClassShape(sizes), small_budget), expected)


@pytest.mark.parametrize("sizes", [(3, 3), (2, 2, 3), (2, 3, 3), (3, 3, 3)])
def test_enumeration_and_search_agree(sizes, small_budget):
    shape = ClassShape(sizes)
    enumerated = min_edges(shape, small_budget, method="enum")
    searched = min_edges(shape, small_budget, method="search", shortcut_upper=False)
    assert enumerated.method == ENUMERATION
    assert searched.method == SUBSET_SEARCH
    assert enumerated.nu == searched.nu
    _assert_certified(searched, enumerated.nu)


def test_333_minimum(shape333, small_budget):
    outcome = min_edges(shape333, small_budget)
    _assert_certified(outcome, 5)


def test_search_without_symmetry_agrees(small_budget):
    shape = ClassShape((2, 3, 3))
    plain = min_edges(shape, small_budget, method="search", symmetry=False, shortcut_upper=False)
    reduced = min_edges(shape, small_budget, method="search", shortcut_upper=False)
    assert plain.nu == reduced.nu


def test_witness_is_in_caller_class_order(small_budget):
    outcome = min_edges(ClassShape((3, 2, 3)), small_budget, method="search")
    assert outcome.witness.shape.sizes == (3, 2, 3)
    assert outcome.class_order == (1, 0, 2)
    _assert_certified(outcome, outcome.nu)


def test_budget_exhaustion_reports_interval():
    tiny = SearchBudget(max_nodes=1, max_seconds=60, workers=1)
    outcome = min_edges(ClassShape((3, 3, 3, 3)), tiny, method="search")
    assert not outcome.exhaustive
    assert outcome.nu is None
    assert outcome.lower <= outcome.upper
    assert len(outcome.witness) == outcome.upper
    assert outcome.to_dict()["nu"] is None


def test_unknown_method(small_budget):
    with pytest.raises(DomainError):
        min_edges(ClassShape((2, 2)), small_budget, method="annealing")


def test_shape_with_singleton_class(small_budget):
    with pytest.raises(ShapeError):
        min_edges(ClassShape((1, 3)), small_budget)


def test_visitor_sees_only_minimum_solutions(small_budget):
    seen = []
    outcome = min_edges(ClassShape((2, 3, 3)), small_budget, method="search", visitor=seen.append)
    assert seen
    assert all(len(s) == outcome.nu for s in seen)
    assert all(is_octahedral(s.shape, s.mask) and not has_isolated_vertex(s.shape, s.mask) for s in seen)


def test_parallel_search_is_deterministic(small_budget):
    shape = ClassShape((2, 3, 3, 3))
    one = min_edges(shape, small_budget.with_overrides(workers=1), method="search", shortcut_upper=False)
    two = min_edges(shape, small_budget.with_overrides(workers=2), method="search", shortcut_upper=False)
    assert one.nu == two.nu == 5
    assert one.witness == two.witness


def test_monotonicity_experiment(small_budget):
    entries = monotonicity_experiment(ClassShape((3, 3, 3)), small_budget)
    assert [e.smaller.sizes for e in entries] == [(2, 3, 3)]
    assert entries[0].increasing is True


@pytest.mark.parametrize(
    "sizes,expected",
    [((3, 3, 3, 3), 6), ((2, 2, 3, 3, 3), 5), ((2, 3, 3, 3, 3), 6), ((3, 3, 3, 3, 3), 7)],
)
def test_published_minimums(sizes, expected, small_budget):
    _assert_certified(min_edges(ClassShape(sizes), small_budget), expected)


@pytest.mark.slow
def test_five_classes_of_four():
    budget = SearchBudget(max_nodes=500_000_000, max_seconds=1800)
    _assert_certified(min_edges(ClassShape((4, 4, 4, 4, 4)), budget), 12)


@pytest.fixture
def stop_flag():
    flag = threading.Event()
    nu_search._init_worker(flag)
    yield flag
    nu_search._init_worker(None)


def test_subtree_gives_up_when_stopped(stop_flag):
    tables = nu_search._tables(ClassShape((3, 3, 3, 3)))
    t, node = tables.root_nodes(True)[0]
    stop_flag.set()
    status, mask, nodes = nu_search._search_task(tables.sizes, 6, t, tuple(node), True, 10**9, float("inf"))
    assert status == "stopped"
    assert mask is None
    assert nodes == 1


def test_subtree_runs_while_flag_is_clear(stop_flag):
    tables = nu_search._tables(ClassShape((3, 3, 3, 3)))
    found = None
    for t, node in tables.root_nodes(True):
        status, found, _ = nu_search._search_task(tables.sizes, 6, t, tuple(node), True, 10**9, float("inf"))
        assert status in ("hit", "refuted")
        if found is not None:
            break
    assert found is not None


def test_parallel_level_stops_after_first_hit(small_budget):
    tables = nu_search._tables(ClassShape((3, 3, 3, 3)))
    limit = 10**9
    serial = nu_search._search_level(tables, 6, True, small_budget.with_overrides(workers=1), limit, float("inf"))
    parallel = nu_search._search_level(tables, 6, True, small_budget.with_overrides(workers=2), limit, float("inf"))
    assert serial[0] == parallel[0] == "hit"
    assert serial[1] == parallel[1]
    assert parallel[2] < limit
