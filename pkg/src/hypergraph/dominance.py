"""
The dominance digraph D: an arc (u, v) whenever every edge containing v also
contains u. Two vertices have arcs both ways exactly when they lie in the same
edges, so the complete subgraphs without outneighbours are the classes of
such twins that dominate nothing outside themselves.
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

import structlog

from src.hypergraph.core import (
    ClassShape,
    OctahedralSystem,
    PartiteHypergraph,
    VertexRef,
    VertexSubset,
    isolated_vertices,
    vertex_masks,
)
from src.hypergraph.errors import PreconditionError, ShapeError

logger = structlog.get_logger(__name__)

Arc = Tuple[VertexRef, VertexRef]


@dataclass(frozen=True)
class DominanceDigraph:
    """
    Arcs of D over all vertices. Isolated vertices receive the vacuous arcs
    the definition gives them and are listed in `isolated` so that
    validation and sink searches can leave them out.
    """
    shape: ClassShape
    arcs: FrozenSet[Arc]
    isolated: VertexSubset = field(default_factory=frozenset)

    def out_neighbours(self, u: VertexRef, include_isolated: bool = False) -> List[VertexRef]:
        return sorted(v for a, v in self.arcs if a == u and (include_isolated or v not in self.isolated))

    def in_neighbours(self, v: VertexRef, include_isolated: bool = False) -> List[VertexRef]:
        return sorted(u for u, b in self.arcs if b == v and (include_isolated or u not in self.isolated))

    def proper_arcs(self) -> FrozenSet[Arc]:
        """Arcs between non-isolated vertices"""
        return frozenset((u, v) for u, v in self.arcs if u not in self.isolated and v not in self.isolated)

    def to_dict(self) -> dict:
        return {
            "classes": list(self.shape.sizes),
            "arcs": [[list(u), list(v)] for u, v in sorted(self.proper_arcs())],
            "isolated": [list(v) for v in sorted(self.isolated)],
        }


def _incidence(system: PartiteHypergraph) -> Dict[VertexRef, int]:
    mask = system.mask
    return {v: mask & vm for v, vm in vertex_masks(system.shape).items()}


def build_dominance(system: PartiteHypergraph) -> DominanceDigraph:
    incidence = _incidence(system)
    arcs = frozenset(
        (u, v)
        for u, mu in incidence.items()
        for v, mv in incidence.items()
        if u != v and not mv & ~mu
    )
    return DominanceDigraph(system.shape, arcs, isolated_vertices(system))


@dataclass(frozen=True)
class DominanceReport:
    ok: bool
    violations: Tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations)}


def validate_dominance(digraph: DominanceDigraph, limit: int = 10) -> DominanceReport:
    """
    Check transitivity and that no vertex has two inneighbours in one class,
    ignoring isolated vertices. At most `limit` violations are reported.
    """
    arcs = digraph.proper_arcs()
    out: Dict[VertexRef, set] = {}
    inn: Dict[VertexRef, set] = {}
    for u, v in arcs:
        out.setdefault(u, set()).add(v)
        inn.setdefault(v, set()).add(u)

    violations: List[dict] = []
    for u in sorted(out):
        for v in sorted(out[u]):
            for w in sorted(out.get(v, ())):
                if w != u and w not in out[u]:
                    violations.append({"kind": "transitivity", "vertices": [list(u), list(v), list(w)]})
                    if len(violations) >= limit:
                        return DominanceReport(False, tuple(violations))

    for v in sorted(inn):
        by_class: Dict[int, List[VertexRef]] = {}
        for u in sorted(inn[v]):
            by_class.setdefault(u.class_index, []).append(u)
        for members in by_class.values():
            if len(members) > 1:
                violations.append(
                    {"kind": "inneighbours", "vertices": [list(v)] + [list(u) for u in members[:2]]}
                )
                if len(violations) >= limit:
                    return DominanceReport(False, tuple(violations))

    return DominanceReport(not violations, tuple(violations))


def _twins(incidence: Dict[VertexRef, int], v: VertexRef, skip: VertexSubset) -> VertexSubset:
    return frozenset(u for u, mu in incidence.items() if u not in skip and mu == incidence[v])


def sink_clique(system: PartiteHypergraph, allow_isolated: bool = False) -> VertexSubset:
    """
    A nonempty vertex set X, complete in D, with no outneighbour outside X.

    The walk starts at the least vertex of the last class that has no
    outneighbour in an earlier class (the least vertex of the last class if
    none qualifies) and moves to the least outneighbour outside the current
    twin class until there is none. Each step strictly shrinks the set of
    edges through the current vertex, so the walk ends.
    """
    if not system.edges:
        raise PreconditionError("The system has no edges")
    isolated = isolated_vertices(system)
    if isolated and not allow_isolated:
        raise PreconditionError(f"The system has isolated vertices {sorted(tuple(v) for v in isolated)}")

    digraph = build_dominance(system)
    incidence = _incidence(system)
    last = system.shape.n - 1
    candidates = [v for v in system.shape.vertices() if v.class_index == last and v not in isolated]
    start = next(
        (v for v in candidates if all(w.class_index >= last for w in digraph.out_neighbours(v))),
        candidates[0],
    )

    current = start
    while True:
        twins = _twins(incidence, current, isolated)
        outside = [w for w in digraph.out_neighbours(current) if w not in twins]
        if not outside:
            logger.debug("sink clique found", start=tuple(start), clique=sorted(tuple(v) for v in twins))
            return twins
        current = outside[0]


class SinkDeletion(NamedTuple):
    system: OctahedralSystem
    mapping: Dict[VertexRef, VertexRef]


def is_sink_clique(digraph: DominanceDigraph, x: VertexSubset) -> bool:
    arcs = digraph.proper_arcs()
    for u in x:
        for v in x:
            if u != v and (u, v) not in arcs:
                return False
    return not any(u in x and v not in x for u, v in arcs)


def delete_sink(system: PartiteHypergraph, x) -> SinkDeletion:
    """
    Remove the vertices of a sink clique and every edge meeting them,
    renumbering the remaining positions of each class contiguously.
    Returns the new system with the old-to-new vertex mapping.
    """
    shape = system.shape
    x = frozenset(shape.validate_vertex(v) for v in x)
    isolated = isolated_vertices(system)
    if isolated:
        raise PreconditionError(f"The system has isolated vertices {sorted(tuple(v) for v in isolated)}")
    if not x:
        return SinkDeletion(OctahedralSystem(shape, system.edges), {v: v for v in shape.vertices()})
    if not is_sink_clique(build_dominance(system), x):
        raise PreconditionError(f"{sorted(tuple(v) for v in x)} is not a complete set without outneighbours")

    removed = [sorted(v.position for v in x if v.class_index == i) for i in range(shape.n)]
    sizes = tuple(m - len(r) for m, r in zip(shape.sizes, removed))
    if any(m < 2 for m in sizes):
        raise ShapeError(f"Deleting {sorted(tuple(v) for v in x)} leaves shape {sizes}")

    renumber: List[Dict[int, int]] = []
    mapping: Dict[VertexRef, VertexRef] = {}
    for i, m in enumerate(shape.sizes):
        kept = [p for p in range(m) if p not in removed[i]]
        renumber.append({p: q for q, p in enumerate(kept)})
        for q, p in enumerate(kept):
            mapping[VertexRef(i, p)] = VertexRef(i, q)

    edges = frozenset(
        tuple(renumber[i][p] for i, p in enumerate(e))
        for e in system.edges
        if all(p in renumber[i] for i, p in enumerate(e))
    )
    return SinkDeletion(OctahedralSystem(ClassShape(sizes), edges), mapping)


def mutual_arcs_match_twins(system: PartiteHypergraph) -> Optional[Arc]:
    """The first pair where mutual arcs and equal edge sets disagree, or None"""
    digraph = build_dominance(system)
    incidence = _incidence(system)
    skip = digraph.isolated
    for u in sorted(incidence):
        for v in sorted(incidence):
            if u >= v or u in skip or v in skip:
                continue
            mutual = (u, v) in digraph.arcs and (v, u) in digraph.arcs
            if mutual != (incidence[u] == incidence[v]):
                return u, v
    return None
