"""
Command-line surface. Results go to stdout as JSON, logs to stderr.

Exit codes: 0 success or property true, 1 property false or claim failed,
2 usage error, 3 budget or resource limit exceeded.
"""
import argparse
import json
import sys
from typing import Any, List, Optional, Sequence

import structlog

from src.cli.claims import FAIL, PROFILES, SKIPPED, verify_table
from src.config.config import SearchBudget, config
from src.config.logging_config import configure_logging
from src.geometry.colourful import ColourConfig, depth_system, mu_search
from src.geometry.realizability import is_realizable_2d
from src.hypergraph.constructions import CONSTRUCTIONS, build
from src.hypergraph.core import ClassShape, isolated_vertices, parity_violation, satisfies_dual_checks
from src.hypergraph.dominance import build_dominance, delete_sink, sink_clique, validate_dominance
from src.hypergraph.errors import (
    DomainError,
    NotGeneralPositionError,
    OctaError,
    PreconditionError,
    ResourceLimitError,
    SamplingBudgetError,
    ShapeError,
)
from src.hypergraph.f2_space import brute_force_count, count_systems, scan_covering_systems, weight_distribution
from src.hypergraph.instance_io import load_colour_config, load_instance
from src.search.bounds import bound_report
from src.search.lemma_harness import lemma_harness, violations
from src.search.nu_search import ENUMERATION, SUBSET_SEARCH, min_edges, monotonicity_experiment

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

CONSTRUCTION_KINDS = sorted(set(CONSTRUCTIONS) | {"omega9", "square"})


def _emit(data: Any) -> None:
    sys.stdout.write(json.dumps(data, indent=2) + "\n")
    sys.stdout.flush()


def _budget(args) -> SearchBudget:
    return config.budget.with_overrides(
        max_nodes=args.budget_nodes,
        max_seconds=args.budget_secs,
        workers=args.workers,
    )


def _shape(sizes: Sequence[int]) -> ClassShape:
    return ClassShape(tuple(sizes))


def cmd_check(args) -> int:
    system = load_instance(args.instance).to_hypergraph()
    violation = parity_violation(system.shape, system.mask)
    isolated = sorted(isolated_vertices(system))
    result = {
        "octahedral": violation is None,
        "isolated": [list(v) for v in isolated],
        "edges": len(system),
    }
    if violation is not None:
        result["violation"] = violation.to_dict()
    if args.dual:
        result["dual_checks"] = satisfies_dual_checks(system.shape, system.mask)
    logger.info("checked instance", edges=len(system), octahedral=result["octahedral"], isolated=len(isolated))
    _emit(result)
    return EXIT_OK if violation is None else EXIT_FALSE


def cmd_count(args) -> int:
    shape = _shape(args.sizes)
    result = count_systems(shape).to_dict()
    if args.brute:
        result["brute_force"] = str(brute_force_count(shape))
    _emit(result)
    return EXIT_OK


def cmd_weights(args) -> int:
    shape = _shape(args.sizes)
    if args.covering:
        scan = scan_covering_systems(shape, max_dimension=args.max_dimension)
        result = {
            "classes": list(shape.sizes),
            "covering": True,
            "histogram": {str(w): c for w, c in scan.profile.items() if c},
            "minimum_weight": scan.minimum_weight,
            "examined": scan.examined,
        }
    else:
        histogram = weight_distribution(shape, max_dimension=args.max_dimension)
        result = {
            "classes": list(shape.sizes),
            "covering": False,
            "histogram": {str(w): c for w, c in histogram.items() if c},
        }
    _emit(result)
    return EXIT_OK


def cmd_construct(args) -> int:
    system = build(args.kind, args.sizes)
    _emit(system.to_instance())
    return EXIT_OK


def cmd_digraph(args) -> int:
    system = load_instance(args.instance).to_system()
    digraph = build_dominance(system)
    report = validate_dominance(digraph)
    result = {"digraph": digraph.to_dict(), "validation": report.to_dict()}
    clique = sink_clique(system, allow_isolated=args.allow_isolated)
    result["sink_clique"] = [list(v) for v in sorted(clique)]
    if args.delete:
        deleted = delete_sink(system, clique)
        result["deleted"] = deleted.system.to_instance()
    _emit(result)
    return EXIT_OK if report.ok else EXIT_FALSE


def cmd_nu(args) -> int:
    shape = _shape(args.sizes)
    budget = _budget(args)
    if args.monotonicity:
        entries = monotonicity_experiment(shape, budget)
        _emit({"classes": list(shape.sizes), "entries": [e.to_dict() for e in entries]})
        return EXIT_OK

    checks = []
    visitor = None
    if args.lemmas:
        visitor = lambda system: checks.extend(lemma_harness(system))

    outcome = min_edges(
        shape,
        budget,
        method=args.method,
        symmetry=not args.no_symmetry,
        visitor=visitor,
        shortcut_upper=not args.no_shortcut,
    )
    result = outcome.to_dict()
    if args.lemmas:
        failed = violations(checks)
        result["lemmas"] = {"checks": len(checks), "violations": [c.to_dict() for c in failed]}
    logger.info("search finished", shape=str(shape), nu=outcome.nu, exhaustive=outcome.exhaustive, nodes=outcome.nodes_explored)
    _emit(result)
    if not outcome.exhaustive:
        return EXIT_RESOURCE
    if args.lemmas and result["lemmas"]["violations"]:
        return EXIT_FALSE
    return EXIT_OK


def cmd_bounds(args) -> int:
    _emit(bound_report(_shape(args.sizes)).to_dict())
    return EXIT_OK


def cmd_lemmas(args) -> int:
    system = load_instance(args.instance).to_system()
    checks = lemma_harness(system)
    failed = violations(checks)
    _emit({"checks": [c.to_dict() for c in checks], "violations": len(failed)})
    return EXIT_FALSE if failed else EXIT_OK


def cmd_depth(args) -> int:
    cfg = ColourConfig.from_file(load_colour_config(args.config))
    result = depth_system(cfg)
    data = result.system.to_instance()
    data["count"] = result.count
    data["hull"] = cfg.hull_flags()
    _emit(data)
    return EXIT_OK


def cmd_mu_search(args) -> int:
    result = mu_search(args.d, args.trials, args.seed if args.seed is not None else 0, target=args.target)
    logger.info("mu search finished", d=args.d, minimum=result.minimum, trials=result.trials)
    _emit(result.to_dict())
    return EXIT_OK


def cmd_realizable2d(args) -> int:
    system = load_instance(args.instance).to_system()
    workers = args.workers if args.workers is not None else config.budget.workers
    verdict = is_realizable_2d(system, up_to_iso=args.up_to_iso, workers=workers)
    _emit(verdict.to_dict())
    return EXIT_OK if verdict.realizable else EXIT_FALSE


def cmd_verify_table(args) -> int:
    records = verify_table(args.profile, _budget(args), only=args.only)
    _emit([r.to_dict() for r in records])
    failed = [r for r in records if r.status == FAIL]
    skipped = [r for r in records if r.status == SKIPPED]
    logger.info("claims verified", total=len(records), failed=len(failed), skipped=len(skipped))
    return EXIT_FALSE if failed else EXIT_OK


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-nodes", type=int, default=None, help="search node cap")
    common.add_argument("--budget-secs", type=float, default=None, help="search wall-clock cap (falls back to OCTA_BUDGET_SECS)")
    common.add_argument("--workers", type=int, default=None, help="worker processes")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--json", action="store_true", help="JSON log lines on stderr")
    common.add_argument("--log-level", default=None, help="log level for stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="octa", description="Octahedral systems toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parity condition and isolated vertices")
    p.add_argument("instance")
    p.add_argument("--dual", action="store_true", help="also run the box checks")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("count", parents=[common], help="number of octahedral systems")
    p.add_argument("sizes", type=int, nargs="+")
    p.add_argument("--brute", action="store_true", help="also count by exhaustive parity checks")
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("weights", parents=[common], help="edge-count histogram of all systems")
    p.add_argument("sizes", type=int, nargs="+")
    p.add_argument("--covering", action="store_true", help="only systems without isolated vertex")
    p.add_argument("--max-dimension", type=int, default=None)
    p.set_defaults(handler=cmd_weights)

    p = sub.add_parser("construct", parents=[common], help="explicit systems")
    p.add_argument("kind", choices=CONSTRUCTION_KINDS)
    p.add_argument("sizes", type=int, nargs="*")
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("digraph", parents=[common], help="dominance digraph and sink clique")
    p.add_argument("instance")
    p.add_argument("--allow-isolated", action="store_true")
    p.add_argument("--delete", action="store_true", help="also delete the sink clique")
    p.set_defaults(handler=cmd_digraph)

    p = sub.add_parser("nu", parents=[common], help="minimum edge count without isolated vertex")
    p.add_argument("sizes", type=int, nargs="+")
    p.add_argument("--method", default="auto", choices=["auto", "enum", "search", ENUMERATION, SUBSET_SEARCH])
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--no-shortcut", action="store_true", help="search the upper level instead of returning the construction")
    p.add_argument("--lemmas", action="store_true", help="run the lemma checks on every minimum solution")
    p.add_argument("--monotonicity", action="store_true", help="compare with every shape one vertex smaller")
    p.set_defaults(handler=cmd_nu)

    p = sub.add_parser("bounds", parents=[common], help="lower and upper bound report")
    p.add_argument("sizes", type=int, nargs="+")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("lemmas", parents=[common], help="edge-count lemma checks on one system")
    p.add_argument("instance")
    p.set_defaults(handler=cmd_lemmas)

    p = sub.add_parser("depth", parents=[common], help="system of colourful simplices containing the origin")
    p.add_argument("config")
    p.set_defaults(handler=cmd_depth)

    p = sub.add_parser("mu-search", parents=[common], help="random search for low colourful depth")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--target", type=int, default=None, help="stop once this depth is reached")
    p.set_defaults(handler=cmd_mu_search)

    p = sub.add_parser("realizable2d", parents=[common], help="exact planar realizability of a (3,3,3) system")
    p.add_argument("instance")
    p.add_argument("--up-to-iso", action="store_true")
    p.set_defaults(handler=cmd_realizable2d)

    p = sub.add_parser("verify-table", parents=[common], help="recompute the table of known values")
    p.add_argument("--profile", choices=PROFILES, default="quick")
    p.add_argument("--only", nargs="*", default=None, help="claim ids to run")
    p.set_defaults(handler=cmd_verify_table)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    configure_logging(level=args.log_level, json_output=True if args.json else None)
    try:
        return args.handler(args)
    except (ResourceLimitError, SamplingBudgetError) as e:
        logger.error("resource limit exceeded", command=args.command, error=str(e))
        return EXIT_RESOURCE
    except NotGeneralPositionError as e:
        logger.error("configuration not in general position", command=args.command, error=str(e), selection=e.selection)
        return EXIT_USAGE
    except (ShapeError, DomainError, PreconditionError, OctaError) as e:
        logger.error("invalid input", command=args.command, error=str(e))
        return EXIT_USAGE
    except (OSError, ValueError) as e:
        logger.error("invalid input", command=args.command, error=str(e))
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
