"""
Explicit octahedral systems: the inductive family achieving 2 + sum(m_i - 2)
edges, the m^2 family on equal classes, the fan, the complete system and the
nine-edge (3,3,3) system.

All choices the constructions leave open are fixed lexicographically so the
output is reproducible.
"""
from typing import Callable, Dict, Sequence

import structlog

from src.hypergraph.core import ClassShape, OctahedralSystem, symmetric_difference
from src.hypergraph.errors import ShapeError

logger = structlog.get_logger(__name__)


def _as_shape(shape) -> ClassShape:
    if isinstance(shape, ClassShape):
        return shape
    return ClassShape(tuple(shape))


def inductive_upper(shape) -> OctahedralSystem:
    """
    Start with every vertex of class 0 as a singleton edge, then add the
    classes left to right. When a class of size m is added, the least edge e
    is extended by positions 0..m-2 of the new class and every other edge by
    position m-1.
    """
    shape = _as_shape(shape)
    shape.require_octahedral()
    edges = [(k,) for k in range(shape.sizes[0])]
    for m in shape.sizes[1:]:
        edges.sort()
        first, rest = edges[0], edges[1:]
        edges = [first + (p,) for p in range(m - 1)] + [e + (m - 1,) for e in rest]
    system = OctahedralSystem(shape, frozenset(edges))
    logger.debug("built inductive system", shape=str(shape), edges=len(system))
    return system


def square_construction(m: int, n: int) -> OctahedralSystem:
    """m disjoint transversals of the first n-1 classes, each joined to every vertex of the last class"""
    if m < 2 or n < 2:
        raise ShapeError(f"square construction needs m >= 2 and n >= 2, got m={m}, n={n}")
    shape = ClassShape((m,) * n)
    edges = frozenset((a,) * (n - 1) + (k,) for a in range(m) for k in range(m))
    return OctahedralSystem(shape, edges)


def fan_construction(shape) -> OctahedralSystem:
    shape = _as_shape(shape)
    shape.require_octahedral()
    tail = (0,) * (shape.n - 1)
    return OctahedralSystem(shape, frozenset((k,) + tail for k in range(shape.sizes[0])))


def complete_system(shape) -> OctahedralSystem:
    shape = _as_shape(shape)
    shape.require_octahedral()
    return OctahedralSystem(shape, frozenset(shape.edges()))


def omega9() -> OctahedralSystem:
    """The nine-edge (3,3,3) system {(a, a, k)}"""
    return square_construction(3, 3)


def upper_complement(shape) -> OctahedralSystem:
    """The complete system minus the inductive one; 22 edges on (3,3,3)"""
    return symmetric_difference(complete_system(shape), inductive_upper(shape))


CONSTRUCTIONS: Dict[str, Callable[[Sequence[int]], OctahedralSystem]] = {
    "upper": inductive_upper,
    "fan": fan_construction,
    "complete": complete_system,
    "complement": upper_complement,
}


def build(kind: str, sizes: Sequence[int]) -> OctahedralSystem:
    """Dispatch by construction name, as used by the command line and the HTTP service"""
    sizes = tuple(sizes)
    if kind == "omega9":
        if sizes and sizes != (3, 3, 3):
            raise ShapeError(f"omega9 is defined on (3,3,3) only, got {sizes}")
        return omega9()
    if kind == "square":
        if not sizes or len(set(sizes)) != 1:
            raise ShapeError(f"square construction needs equal class sizes, got {sizes}")
        return square_construction(sizes[0], len(sizes))
    try:
        builder = CONSTRUCTIONS[kind]
    except KeyError:
        raise ShapeError(f"Unknown construction {kind!r}")
    if not sizes:
        raise ShapeError(f"construction {kind!r} needs class sizes")
    return builder(sizes)
