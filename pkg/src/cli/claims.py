"""
Table of known values, recomputed. Each claim is computed from scratch and
compared with its expected value; a search cut short by the budget is
recorded as skipped, never as a failure.
"""
import time
from dataclasses import dataclass
from typing import Any, Callable, List, Optional

import structlog

from src.config.config import SearchBudget, config
from src.geometry.colourful import mu_search
from src.geometry.realizability import is_realizable_2d
from src.hypergraph.constructions import inductive_upper, omega9, square_construction, upper_complement
from src.hypergraph.core import ClassShape, has_isolated_vertex, is_octahedral
from src.hypergraph.errors import OctaError, ResourceLimitError
from src.hypergraph.f2_space import brute_force_count, count_systems, scan_covering_systems, weight_distribution
from src.search.bounds import kzn_bound, published_lower_bound
from src.search.nu_search import min_edges

logger = structlog.get_logger(__name__)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

PROFILES = ("quick", "full", "stretch")

# where each expected value is published
LOCI = frozenset(
    ["§1.1", "§1.2", "§2 remark", "Theorem 1", "Corollary 1", "Theorem 9", "Lemma 1", "Lemma 2", "Lemma 3", "Lemma 4"]
    + [f"Prop. {i}" for i in (2, 3, 4, 5, 6, 7, 8, 10, 11, 13)]
    + [f"Claim {i}" for i in range(1, 8)]
)


@dataclass(frozen=True)
class ClaimRecord:
    claim_id: str
    locus: str
    basis: str
    expected: Any
    obtained: Any
    status: str
    relation: str = "=="
    elapsed_seconds: float = 0.0
    detail: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "claim": self.claim_id,
            "locus": self.locus,
            "basis": self.basis,
            "expected": self.expected,
            "relation": self.relation,
            "obtained": self.obtained,
            "status": self.status,
            "elapsed_seconds": round(self.elapsed_seconds, 3),
            "detail": self.detail,
        }


class _Skipped(Exception):
    def __init__(self, obtained: Any, detail: str):
        super().__init__(detail)
        self.obtained = obtained
        self.detail = detail


@dataclass(frozen=True)
class _Claim:
    claim_id: str
    locus: str
    basis: str
    expected: Any
    compute: Callable[[SearchBudget], Any]
    profile: str = "quick"
    relation: str = "=="


def _nu(*sizes: int) -> Callable[[SearchBudget], int]:
    def compute(budget: SearchBudget) -> int:
        outcome = min_edges(ClassShape(sizes), budget)
        if not outcome.exhaustive:
            raise _Skipped([outcome.lower, outcome.upper], f"budget exhausted after {outcome.nodes_explored} nodes")
        return outcome.nu
    return compute


def _nu_at_least(*sizes: int) -> Callable[[SearchBudget], int]:
    """Certified lower end of the interval, exhaustive or not"""
    def compute(budget: SearchBudget) -> int:
        outcome = min_edges(ClassShape(sizes), budget)
        return outcome.nu if outcome.exhaustive else outcome.lower
    return compute


def _count(*sizes: int) -> Callable[[SearchBudget], int]:
    return lambda budget: count_systems(ClassShape(sizes)).count


def _brute(*sizes: int) -> Callable[[SearchBudget], int]:
    return lambda budget: brute_force_count(ClassShape(sizes))


def _extreme_weights(budget: SearchBudget) -> List[int]:
    shape = ClassShape((3, 3, 3))
    histogram = weight_distribution(shape)
    return [histogram.get(w, 0) for w in (0, 1, 2, 25, 26)]


def _covering_at_22(budget: SearchBudget) -> bool:
    return scan_covering_systems(ClassShape((3, 3, 3))).profile.get(22, 0) > 0


def _upper_complement_edges(budget: SearchBudget) -> int:
    system = upper_complement(ClassShape((3, 3, 3)))
    return len(system) if is_octahedral(system.shape, system.mask) else -1


def _omega9_octahedral(budget: SearchBudget) -> bool:
    system = omega9()
    return is_octahedral(system.shape, system.mask) and not has_isolated_vertex(system.shape, system.mask)


def _omega9_realizable(budget: SearchBudget) -> bool:
    return is_realizable_2d(omega9(), workers=budget.workers).realizable


def _mu(d: int, trials: int, target: int) -> Callable[[SearchBudget], int]:
    return lambda budget: mu_search(d, trials, seed=0, target=target).minimum


def _claims() -> List[_Claim]:
    claims = [
        _Claim("count-22", "Theorem 9", "dimension formula, classes (2,2)", 8, _count(2, 2)),
        _Claim("count-23", "Theorem 9", "dimension formula, classes (2,3)", 16, _count(2, 3)),
        _Claim("count-222", "Theorem 9", "dimension formula, classes (2,2,2)", 128, _count(2, 2, 2)),
        _Claim("count-33", "Theorem 9", "dimension formula, classes (3,3)", 32, _count(3, 3)),
        _Claim("count-24", "Theorem 9", "dimension formula, classes (2,4)", 64, _count(2, 4)),
        _Claim("count-333", "Theorem 9", "dimension formula, classes (3,3,3)", 524288, _count(3, 3, 3)),
        _Claim("brute-222", "Theorem 9", "parity check over every edge subset, classes (2,2,2)", 128, _brute(2, 2, 2)),
        _Claim("brute-33", "Theorem 9", "parity check over every edge subset, classes (3,3)", 32, _brute(3, 3)),
        _Claim("weights-333", "Prop. 3", "no (3,3,3) system of weight 1, 2, 25 or 26", [1, 0, 0, 0, 0], _extreme_weights),
        _Claim("covering-22-333", "Prop. 8", "a (3,3,3) system of weight 22 without isolated vertex", True, _covering_at_22),
        _Claim("complement-333", "Prop. 8", "complete system minus the inductive one", 22, _upper_complement_edges),
        _Claim(
            "inductive-3333",
            "Prop. 5",
            "inductive construction has 2 + sum(m_i - 2) edges",
            6,
            lambda budget: len(inductive_upper(ClassShape((3, 3, 3, 3)))),
        ),
        _Claim("square-33", "Prop. 7", "square construction on (3,3) equals omega9", True, lambda budget: square_construction(3, 3) == omega9()),
        _Claim("omega9-octahedral", "Prop. 10", "omega9 satisfies parity and covers every vertex", True, _omega9_octahedral),
        _Claim("omega9-nonrealizable", "Prop. 10", "omega9 does not arise from a planar configuration", False, _omega9_realizable),
        _Claim("bound-55555", "Theorem 1", "lower bound for five classes of five", 14, lambda budget: published_lower_bound(ClassShape((5,) * 5)).value),
        _Claim("kzn-5-0-5", "Prop. 13", "(k, z) bound with k = 5, z = 0, n = 5", 14, lambda budget: kzn_bound(5, 0, 5, 5, 5)),
        _Claim("nu-22", "Prop. 6", "two classes of two", 2, _nu(2, 2)),
        _Claim("nu-33", "Prop. 6", "two classes of three", 4, _nu(3, 3)),
        _Claim("nu-2233", "Prop. 6", "two classes of two, two of three", 4, _nu(2, 2, 3, 3)),
        _Claim("nu-2333", "Prop. 11", "one class of two, three of three", 5, _nu(2, 3, 3, 3)),
        _Claim("mu-1", "§1.1", "minimum colourful depth on the line", 2, _mu(1, 100, 2)),
        _Claim("nu-3333", "Prop. 11", "four classes of three", 6, _nu(3, 3, 3, 3), "full"),
        _Claim("nu-22333", "Claim 1", "two classes of two, three of three", 5, _nu(2, 2, 3, 3, 3), "full"),
        _Claim("nu-23333", "Claim 2", "one class of two, four of three", 6, _nu(2, 3, 3, 3, 3), "full"),
        _Claim("nu-33333", "Claim 3", "five classes of three", 7, _nu(3, 3, 3, 3, 3), "full"),
        _Claim("mu-2", "§1.1", "minimum colourful depth in the plane", 5, _mu(2, 10_000, 5), "full"),
        _Claim("nu-44444", "Claim 6", "five classes of four", 12, _nu(4, 4, 4, 4, 4), "stretch"),
        _Claim("nu-33334-lower", "Claim 4", "four classes of three, one of four, lower end", 7, _nu_at_least(3, 3, 3, 3, 4), "stretch", ">="),
    ]
    for z in range(5):
        sizes = (2,) * z + (3,) * (4 - z) + (4,)
        label = "".join(map(str, sizes))
        claims.append(_Claim(f"nu-{label}", "§2 remark", f"{z} classes of two, {4 - z} of three, one of four", 8 - z, _nu(*sizes), "stretch"))
    # z = 4 repeats (3,3,3,3,4) from the loop above
    for z in range(4):
        sizes = (3,) * z + (4,) * (5 - z)
        label = "".join(map(str, sizes))
        if sizes != (4,) * 5:
            claims.append(_Claim(f"nu-{label}", "§2 remark", f"{z} classes of three, {5 - z} of four", 12 - z, _nu(*sizes), "stretch"))
    # the equal-class end z = 0 closes the same induction
    for z in range(5):
        sizes = (4,) * z + (5,) * (5 - z)
        label = "".join(map(str, sizes))
        claims.append(_Claim(f"nu-{label}", "Claim 7", f"{z} classes of four, {5 - z} of five", 17 - z, _nu(*sizes), "stretch"))
    return claims


def _satisfied(relation: str, expected: Any, obtained: Any) -> bool:
    if relation == ">=":
        return obtained >= expected
    return obtained == expected


def _evaluate(claim: _Claim, budget: SearchBudget) -> ClaimRecord:
    started = time.time()
    try:
        obtained = claim.compute(budget)
    except _Skipped as e:
        return ClaimRecord(claim.claim_id, claim.locus, claim.basis, claim.expected, e.obtained, SKIPPED, claim.relation, time.time() - started, e.detail)
    except ResourceLimitError as e:
        return ClaimRecord(claim.claim_id, claim.locus, claim.basis, claim.expected, None, SKIPPED, claim.relation, time.time() - started, str(e))
    except OctaError as e:
        return ClaimRecord(claim.claim_id, claim.locus, claim.basis, claim.expected, None, FAIL, claim.relation, time.time() - started, str(e))
    status = PASS if _satisfied(claim.relation, claim.expected, obtained) else FAIL
    return ClaimRecord(claim.claim_id, claim.locus, claim.basis, claim.expected, obtained, status, claim.relation, time.time() - started)


def verify_table(profile: str = "quick", budget: Optional[SearchBudget] = None, only: Optional[List[str]] = None) -> List[ClaimRecord]:
    """Recompute every claim up to the given profile; failures are records, not crashes"""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}, expected one of {PROFILES}")
    budget = budget or config.budget
    allowed = PROFILES[: PROFILES.index(profile) + 1]
    records = []
    for claim in _claims():
        if claim.profile not in allowed or (only and claim.claim_id not in only):
            continue
        record = _evaluate(claim, budget)
        log = logger.bind(claim=record.claim_id, expected=record.expected, obtained=record.obtained)
        if record.status == FAIL:
            log.error("claim failed", detail=record.detail)
        elif record.status == SKIPPED:
            log.warning("claim skipped", detail=record.detail)
        else:
            log.info("claim passed", seconds=round(record.elapsed_seconds, 3))
        records.append(record)
    return records
