"""
Edge-count lemmas for systems of the (k-1)^z k^(k-z) m_(k+1) .. m_n pattern,
checked on concrete systems. Each check whose hypothesis the system meets is
recorded with the lemma's bound and the actual edge count; hypotheses are
detected on the dominance digraph.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import structlog

from src.hypergraph.core import ClassShape, OctahedralSystem, VertexRef, has_isolated_vertex, is_octahedral, vertex_masks
from src.hypergraph.dominance import build_dominance, delete_sink, is_sink_clique
from src.hypergraph.errors import ShapeError
from src.search.bounds import compatible_patterns

logger = structlog.get_logger(__name__)

SINK_CLIQUE_SQUARE = "sink clique of size >= 2, (k-1)^2 + 2"
SINK_CLIQUE_LAST_CLASSES = "sink clique of size >= 2, (k-1)^2 + |V_n-1| + |V_n| - 2k + 1"
SHARED_OUTNEIGHBOUR_CLASS = "two last-class vertices dominating one early class"
DELETION = "sink clique deletion keeps parity and coverage"


@dataclass(frozen=True)
class LemmaCheck:
    lemma: str
    k: Optional[int]
    z: Optional[int]
    bound: Optional[int]
    actual: int
    holds: bool
    detail: Dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "k": self.k,
            "z": self.z,
            "bound": self.bound,
            "actual": self.actual,
            "holds": self.holds,
            "detail": self.detail,
        }


def _ascending(system: OctahedralSystem) -> OctahedralSystem:
    order = sorted(range(system.shape.n), key=lambda i: (system.shape.sizes[i], i))
    shape = ClassShape(tuple(system.shape.sizes[i] for i in order))
    return OctahedralSystem(shape, frozenset(tuple(e[i] for i in order) for e in system.edges))


def sink_cliques(system: OctahedralSystem) -> List[frozenset]:
    """Every complete vertex set of the dominance digraph without outneighbour"""
    mask = system.mask
    groups: Dict[int, List[VertexRef]] = {}
    for v, vm in vertex_masks(system.shape).items():
        if mask & vm:
            groups.setdefault(mask & vm, []).append(v)
    digraph = build_dominance(system)
    cliques = [frozenset(vs) for vs in groups.values()]
    return sorted((x for x in cliques if is_sink_clique(digraph, x)), key=lambda x: sorted(x))


def _vertices(x) -> List[list]:
    return [list(v) for v in sorted(x)]


def lemma_harness(system: OctahedralSystem) -> List[LemmaCheck]:
    """
    Run every lemma whose hypothesis holds. Systems with isolated vertices or
    failing the parity condition yield an empty list.
    """
    if not system.edges or has_isolated_vertex(system.shape, system.mask):
        return []
    if not is_octahedral(system.shape, system.mask):
        return []
    system = _ascending(system)
    shape = system.shape
    n = shape.n
    actual = len(system)
    cliques = sink_cliques(system)
    checks: List[LemmaCheck] = []

    for x in cliques:
        try:
            deleted = delete_sink(system, x).system
        except ShapeError:
            continue
        ok = is_octahedral(deleted.shape, deleted.mask) and not has_isolated_vertex(deleted.shape, deleted.mask)
        checks.append(
            LemmaCheck(DELETION, None, None, None, len(deleted), ok, {"clique": _vertices(x), "classes": list(deleted.shape.sizes)})
        )

    if n < 2:
        return checks
    v_nm1, v_n = shape.sizes[-2], shape.sizes[-1]
    digraph = build_dominance(system)

    for k, z in compatible_patterns(shape, min_k=3):
        large = [x for x in cliques if len(x) >= 2 and all(v.class_index >= z for v in x)]
        for x in large:
            detail = {"clique": _vertices(x)}
            if n >= 4:
                bound = 5 if shape.sizes == (2, 2, 3, 3) else (k - 1) ** 2 + 2
                checks.append(LemmaCheck(SINK_CLIQUE_SQUARE, k, z, bound, actual, actual >= bound, detail))
            bound = (k - 1) ** 2 + v_nm1 + v_n - 2 * k + 1
            checks.append(LemmaCheck(SINK_CLIQUE_LAST_CLASSES, k, z, bound, actual, actual >= bound, detail))

        last = [v for v in shape.vertices() if v.class_index == n - 1]
        for i_star in range(min(k - 1, n - 1)):
            dominating = [
                v for v in last if any(w.class_index == i_star for w in digraph.out_neighbours(v))
            ]
            if len(dominating) >= 2:
                bound = shape.sizes[i_star] * (k - 1) + v_nm1 + v_n - 2 * k
                detail = {"class": i_star, "vertices": _vertices(dominating[:2])}
                checks.append(LemmaCheck(SHARED_OUTNEIGHBOUR_CLASS, k, z, bound, actual, actual >= bound, detail))

    for check in checks:
        if not check.holds:
            logger.error("lemma bound violated", lemma=check.lemma, k=check.k, z=check.z, bound=check.bound, actual=check.actual)
    return checks


def violations(checks: Sequence[LemmaCheck]) -> List[LemmaCheck]:
    return [c for c in checks if not c.holds]


def sweep(systems, limit: Optional[int] = None) -> Tuple[int, List[LemmaCheck]]:
    """Run the harness over many systems; returns (checks performed, violations)"""
    performed = 0
    failed: List[LemmaCheck] = []
    for idx, system in enumerate(systems):
        if limit is not None and idx >= limit:
            break
        checks = lemma_harness(system)
        performed += len(checks)
        failed.extend(violations(checks))
    return performed, failed
