"""
Core n-partite hypergraph types and the octahedral parity predicate.

Vertices are 0-based positions inside 0-based classes. Edges are tuples with
one position per class; they are ranked in mixed radix with class 0 most
significant, and an edge set is interchangeably a Python int whose bit r is set
iff the edge of rank r is present.
"""
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, product
from math import comb, prod
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from src.config.config import config
from src.hypergraph.errors import PreconditionError, ResourceLimitError, ShapeError

Edge = Tuple[int, ...]


class VertexRef(NamedTuple):
    """A vertex: position `position` of class `class_index`"""
    class_index: int
    position: int


VertexSubset = FrozenSet[VertexRef]
Transversal = Tuple[VertexRef, ...]


@dataclass(frozen=True)
class ClassShape:
    """The vector (m_1, ..., m_n) of colour-class sizes"""
    sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes:
            raise ShapeError("A shape needs at least one class")
        for m in sizes:
            if isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise ShapeError(f"Class sizes must be positive integers, got {sizes}")

    @classmethod
    def of(cls, *sizes: int) -> "ClassShape":
        return cls(tuple(sizes))

    @property
    def n(self) -> int:
        return len(self.sizes)

    @cached_property
    def total(self) -> int:
        """Number of potential edges, the product of the class sizes"""
        return prod(self.sizes)

    @cached_property
    def interior(self) -> int:
        return prod(m - 1 for m in self.sizes)

    @cached_property
    def pair_selection_count(self) -> int:
        return prod(comb(m, 2) for m in self.sizes)

    @cached_property
    def strides(self) -> Tuple[int, ...]:
        strides = []
        acc = 1
        for m in reversed(self.sizes):
            strides.append(acc)
            acc *= m
        return tuple(reversed(strides))

    @property
    def is_octahedral_shape(self) -> bool:
        return all(m >= 2 for m in self.sizes)

    def require_octahedral(self) -> None:
        if not self.is_octahedral_shape:
            raise ShapeError(f"Octahedral systems need every class size >= 2, got {self.sizes}")

    def validate_edge(self, edge: Sequence[int]) -> Edge:
        edge = tuple(edge)
        if len(edge) != self.n:
            raise ShapeError(f"Edge {edge} has {len(edge)} positions, shape has {self.n} classes")
        for i, (p, m) in enumerate(zip(edge, self.sizes)):
            if not isinstance(p, int) or not 0 <= p < m:
                raise ShapeError(f"Edge {edge}: position {p} out of range for class {i} of size {m}")
        return edge

    def validate_vertex(self, vertex: Sequence[int]) -> VertexRef:
        vertex = VertexRef(*vertex)
        if not 0 <= vertex.class_index < self.n:
            raise ShapeError(f"Vertex {tuple(vertex)}: no class {vertex.class_index}")
        if not 0 <= vertex.position < self.sizes[vertex.class_index]:
            raise ShapeError(f"Vertex {tuple(vertex)}: position out of range")
        return vertex

    def rank(self, edge: Sequence[int]) -> int:
        return sum(p * s for p, s in zip(edge, self.strides))

    def unrank(self, r: int) -> Edge:
        if not 0 <= r < self.total:
            raise ShapeError(f"Rank {r} outside [0, {self.total})")
        return tuple((r // s) % m for s, m in zip(self.strides, self.sizes))

    def edges(self) -> Iterator[Edge]:
        """All potential edges in rank order"""
        return product(*(range(m) for m in self.sizes))

    def vertices(self) -> Iterator[VertexRef]:
        for i, m in enumerate(self.sizes):
            for p in range(m):
                yield VertexRef(i, p)

    def with_size(self, class_index: int, size: int) -> "ClassShape":
        sizes = list(self.sizes)
        sizes[class_index] = size
        return ClassShape(tuple(sizes))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.sizes)) + ")"


@dataclass(frozen=True)
class PartiteHypergraph:
    """An n-uniform n-partite hypergraph (V_1, ..., V_n, E)"""
    shape: ClassShape
    edges: FrozenSet[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.shape.validate_edge(e) for e in self.edges))

    @classmethod
    def from_mask(cls, shape: ClassShape, mask: int):
        return cls(shape, frozenset(shape.unrank(r) for r in iter_bits(mask)))

    @cached_property
    def mask(self) -> int:
        mask = 0
        for e in self.edges:
            mask |= 1 << self.shape.rank(e)
        return mask

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge) -> bool:
        return tuple(edge) in self.edges

    def to_instance(self) -> Dict[str, list]:
        """The shared JSON instance format, edges sorted"""
        return {"classes": list(self.shape.sizes), "edges": [list(e) for e in self.sorted_edges]}


@dataclass(frozen=True)
class OctahedralSystem(PartiteHypergraph):
    """
    An n-partite hypergraph on classes of size >= 2 meant to satisfy the
    parity condition. Constructors that promise the condition skip the check;
    use `from_edges(..., check=True)` or `is_octahedral` otherwise.
    """

    def __post_init__(self):
        self.shape.require_octahedral()
        super().__post_init__()

    @classmethod
    def from_edges(cls, shape: ClassShape, edges: Iterable[Sequence[int]], check: bool = False) -> "OctahedralSystem":
        system = cls(shape, frozenset(tuple(e) for e in edges))
        if check:
            violation = parity_violation(shape, system.mask)
            if violation is not None:
                raise PreconditionError(f"Edge set fails the parity condition: {violation.describe()}")
        return system

    @classmethod
    def empty(cls, shape: ClassShape) -> "OctahedralSystem":
        return cls(shape, frozenset())


@dataclass(frozen=True)
class ParityViolation:
    """Counterexample certificate: a pair selection inducing an odd number of edges"""
    selection: Tuple[Tuple[int, int], ...]
    induced: Tuple[Edge, ...]

    def vertices(self) -> VertexSubset:
        return frozenset(VertexRef(i, p) for i, pair in enumerate(self.selection) for p in pair)

    def describe(self) -> str:
        return f"selection {list(self.selection)} induces {len(self.induced)} edges {list(self.induced)}"

    def to_dict(self) -> dict:
        return {"selection": [list(p) for p in self.selection], "induced": [list(e) for e in self.induced]}


EdgeSource = Union[int, Iterable[Sequence[int]], PartiteHypergraph]


def as_mask(shape: ClassShape, edges: EdgeSource) -> int:
    if isinstance(edges, int):
        return edges
    if isinstance(edges, PartiteHypergraph):
        return edges.mask
    mask = 0
    for e in edges:
        mask |= 1 << shape.rank(shape.validate_edge(e))
    return mask


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of a non-negative int, ascending"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def box_mask(shape: ClassShape, choices: Sequence[Sequence[int]]) -> int:
    """Mask of all edges inside the product of per-class position sets"""
    mask = 0
    for e in product(*choices):
        mask |= 1 << shape.rank(e)
    return mask


@lru_cache(maxsize=64)
def pair_selection_masks(shape: ClassShape) -> Tuple[Tuple[Tuple[Tuple[int, int], ...], int], ...]:
    """Every selection of two vertices per class with the mask of the edges it induces"""
    shape.require_octahedral()
    limit = config.limits.max_pair_selections
    if shape.pair_selection_count > limit:
        raise ResourceLimitError(
            f"Shape {shape} has {shape.pair_selection_count} pair selections (limit {limit})",
            required=shape.pair_selection_count,
            limit=limit,
        )
    per_class = [list(combinations(range(m), 2)) for m in shape.sizes]
    return tuple((selection, box_mask(shape, selection)) for selection in product(*per_class))


@lru_cache(maxsize=64)
def dual_check_masks(shape: ClassShape) -> Tuple[int, ...]:
    """
    The boxes {0, j_1} x ... x {0, j_n} with every j_i >= 1. An edge set
    satisfies the parity condition iff each of these boxes holds an even
    number of its edges.
    """
    shape.require_octahedral()
    return tuple(
        box_mask(shape, [(0, j) for j in js]) for js in product(*(range(1, m) for m in shape.sizes))
    )


def parity_violation(shape: ClassShape, edges: EdgeSource) -> Optional[ParityViolation]:
    """First pair selection (lexicographic) inducing an odd number of edges, or None"""
    mask = as_mask(shape, edges)
    for selection, box in pair_selection_masks(shape):
        hit = mask & box
        if hit.bit_count() & 1:
            induced = tuple(shape.unrank(r) for r in iter_bits(hit))
            return ParityViolation(selection, induced)
    return None


def is_octahedral(shape: ClassShape, edges: EdgeSource) -> bool:
    """True iff every pair selection induces an even number of edges"""
    return parity_violation(shape, edges) is None


def satisfies_dual_checks(shape: ClassShape, edges: EdgeSource) -> bool:
    mask = as_mask(shape, edges)
    return all(not (mask & box).bit_count() & 1 for box in dual_check_masks(shape))


@lru_cache(maxsize=64)
def vertex_masks(shape: ClassShape) -> Dict[VertexRef, int]:
    """For each vertex, the mask of all potential edges through it"""
    masks = {v: 0 for v in shape.vertices()}
    for e in shape.edges():
        bit = 1 << shape.rank(e)
        for i, p in enumerate(e):
            masks[VertexRef(i, p)] |= bit
    return masks


def _allowed_positions(shape: ClassShape, x: Iterable[Sequence[int]]) -> List[set]:
    allowed = [set() for _ in range(shape.n)]
    for v in x:
        v = shape.validate_vertex(v)
        allowed[v.class_index].add(v.position)
    return allowed


def induced_edges(system: PartiteHypergraph, x: Iterable[Sequence[int]]) -> FrozenSet[Edge]:
    """E[X]: the edges all of whose vertices lie in x"""
    allowed = _allowed_positions(system.shape, x)
    return frozenset(e for e in system.edges if all(p in allowed[i] for i, p in enumerate(e)))


def degree(system: PartiteHypergraph, x: Iterable[Sequence[int]]) -> int:
    """deg(X): the number of edges containing every vertex of x"""
    required: Dict[int, int] = {}
    for v in x:
        v = system.shape.validate_vertex(v)
        if required.setdefault(v.class_index, v.position) != v.position:
            return 0
    return sum(1 for e in system.edges if all(e[i] == p for i, p in required.items()))


def isolated_vertices(system: PartiteHypergraph) -> VertexSubset:
    mask = system.mask
    return frozenset(v for v, vm in vertex_masks(system.shape).items() if not mask & vm)


def has_isolated_vertex(shape: ClassShape, mask: int) -> bool:
    return any(not mask & vm for vm in vertex_masks(shape).values())


def transversals(shape: ClassShape, i: int) -> Iterator[Transversal]:
    """All i-transversals in lexicographic order"""
    if not 0 <= i < shape.n:
        raise ShapeError(f"No class {i} in shape {shape}")
    others = [j for j in range(shape.n) if j != i]
    for positions in product(*(range(shape.sizes[j]) for j in others)):
        yield tuple(VertexRef(j, p) for j, p in zip(others, positions))


def weak_parity_second_edge(
    system: OctahedralSystem,
    e: Sequence[int],
    t: Sequence[Sequence[int]],
    x: Sequence[int],
) -> Edge:
    """
    Given an edge e, an i-transversal t disjoint from e and a vertex x of
    class i outside e, return the lexicographically least edge other than e
    inside e + t + {x}.
    """
    shape = system.shape
    e = shape.validate_edge(e)
    if e not in system.edges:
        raise PreconditionError(f"{e} is not an edge of the system")
    x = shape.validate_vertex(x)
    i = x.class_index
    t = [shape.validate_vertex(v) for v in t]
    covered = sorted(v.class_index for v in t)
    if covered != [j for j in range(shape.n) if j != i]:
        raise PreconditionError(f"{[tuple(v) for v in t]} is not a {i}-transversal")
    if any(e[v.class_index] == v.position for v in t):
        raise PreconditionError("The transversal meets the edge")
    if x.position == e[i]:
        raise PreconditionError(f"Vertex {tuple(x)} lies on the edge")

    choices = [[e[j]] for j in range(shape.n)]
    for v in t:
        choices[v.class_index].append(v.position)
    choices[i].append(x.position)
    inside = [c for c in induced_edges(system, [VertexRef(j, p) for j, ps in enumerate(choices) for p in ps]) if c != e]
    if not inside:
        raise PreconditionError(
            f"Parity fails on selection {[sorted(c) for c in choices]}: {e} is the only induced edge"
        )
    return min(inside)


def symmetric_difference(a: PartiteHypergraph, b: PartiteHypergraph) -> OctahedralSystem:
    """a Δ b; octahedral whenever both inputs are"""
    if a.shape != b.shape:
        raise ShapeError(f"Shape mismatch: {a.shape} vs {b.shape}")
    return OctahedralSystem(a.shape, a.edges ^ b.edges)
