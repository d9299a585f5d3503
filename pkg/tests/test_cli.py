import json

import pytest

from src.cli.commands import EXIT_FALSE, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, run
from src.geometry.realizability import CircularType, induced_system
from src.hypergraph.constructions import omega9


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_count(capsys):
    code, data = _run(capsys, "count", "3", "3", "3")
    assert code == EXIT_OK
    assert data["count"] == "524288"


def test_count_with_brute_force(capsys):
    code, data = _run(capsys, "count", "2", "3", "--brute")
    assert code == EXIT_OK
    assert data["brute_force"] == "16"


def test_check_omega9(capsys, write_json):
    path = write_json("omega9.json", omega9().to_instance())
    code, data = _run(capsys, "check", path, "--dual")
    assert code == EXIT_OK
    assert data["octahedral"] is True
    assert data["isolated"] == []
    assert data["dual_checks"] is True


def test_check_single_edge(capsys, write_json):
    path = write_json("single.json", {"classes": [3, 3, 3], "edges": [[0, 0, 0]]})
    code, data = _run(capsys, "check", path)
    assert code == EXIT_FALSE
    assert data["octahedral"] is False
    assert "violation" in data


def test_malformed_instance_is_usage_error(capsys, write_json):
    path = write_json("bad.json", {"classes": [3, 3], "edges": [[0, 5]]})
    code, _ = _run(capsys, "check", path)
    assert code == EXIT_USAGE


@pytest.mark.parametrize("argv", [[], ["count"], ["spiral"], ["construct", "spiral", "3"]])
def test_usage_errors(capsys, argv):
    assert run(argv) == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == EXIT_OK


def test_nu(capsys):
    code, data = _run(capsys, "nu", "2", "3", "3", "3", "--workers", "1")
    assert code == EXIT_OK
    assert data["nu"] == 5
    assert data["exhaustive"] is True
    assert len(data["witness"]["edges"]) == 5


def test_nu_with_lemmas(capsys):
    code, data = _run(capsys, "nu", "2", "3", "3", "3", "--method", "search", "--lemmas", "--workers", "1")
    assert code == EXIT_OK
    assert data["lemmas"]["violations"] == []


def test_nu_budget_exit(capsys):
    code, data = _run(capsys, "nu", "3", "3", "3", "3", "--method", "search", "--budget-nodes", "1", "--workers", "1")
    assert code == EXIT_RESOURCE
    assert data["nu"] is None
    assert data["lower"] <= data["upper"]


def test_construct(capsys):
    code, data = _run(capsys, "construct", "upper", "3", "3", "3", "3")
    assert code == EXIT_OK
    assert data["classes"] == [3, 3, 3, 3]
    assert len(data["edges"]) == 6


def test_bounds(capsys):
    code, data = _run(capsys, "bounds", "5", "5", "5", "5", "5")
    assert code == EXIT_OK
    assert data["lower"] >= 14


def test_weights(capsys):
    code, data = _run(capsys, "weights", "2", "2")
    assert code == EXIT_OK
    assert data["histogram"] == {"0": 1, "2": 6, "4": 1}


def test_digraph(capsys, write_json):
    path = write_json("omega9.json", omega9().to_instance())
    code, data = _run(capsys, "digraph", path, "--delete")
    assert code == EXIT_OK
    assert data["validation"]["ok"] is True
    assert data["sink_clique"]
    assert "deleted" in data


def test_lemmas(capsys, write_json):
    path = write_json("omega9.json", omega9().to_instance())
    code, data = _run(capsys, "lemmas", path)
    assert code == EXIT_OK
    assert data["violations"] == 0


def test_depth(capsys, write_json):
    path = write_json("line.json", {"d": 1, "classes": [[["-1"], ["2"]], [["1"], ["-3"]]]})
    code, data = _run(capsys, "depth", path)
    assert code == EXIT_OK
    assert data["count"] == 2
    assert data["hull"] == [True, True]


def test_depth_on_boundary(capsys, write_json):
    path = write_json("line.json", {"d": 1, "classes": [[[0], [1]], [[1], [-1]]]})
    code, _ = _run(capsys, "depth", path)
    assert code == EXIT_USAGE


def test_mu_search(capsys):
    code, data = _run(capsys, "mu-search", "--d", "1", "--trials", "3", "--seed", "4")
    assert code == EXIT_OK
    assert data["minimum_found"] == 2


def test_realizable2d(capsys, write_json):
    system = induced_system(CircularType(tuple(range(0, 18, 2))))
    path = write_json("sys.json", system.to_instance())
    code, data = _run(capsys, "realizable2d", path, "--workers", "1")
    assert code == EXIT_OK
    assert data["realizable"] is True
    assert len(data["witness"]["word"]) == 18


def test_verify_table_subset(capsys):
    code, data = _run(capsys, "verify-table", "--only", "count-22", "bound-55555", "nu-22")
    assert code == EXIT_OK
    assert [r["claim"] for r in data] == ["count-22", "bound-55555", "nu-22"]
    assert all(r["status"] == "pass" for r in data)
