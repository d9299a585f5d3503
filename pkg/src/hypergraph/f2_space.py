"""
GF(2) structure of octahedral systems.

A hypergraph on fixed classes is a bit vector of length prod(m_i) (bit r set iff
the edge of rank r is present). Octahedral systems form the subspace spanned by
the class fibers: for a class j and a fixed choice of positions in the other
classes, the m_j edges that vary only in class j.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
import structlog

from src.config.config import config
from src.hypergraph.core import (
    ClassShape,
    OctahedralSystem,
    PartiteHypergraph,
    pair_selection_masks,
    vertex_masks,
)
from src.hypergraph.errors import ResourceLimitError, ShapeError

logger = structlog.get_logger(__name__)

_WORD_BITS = 64
_WORD_MASK = (1 << _WORD_BITS) - 1


@dataclass(frozen=True)
class F2Word:
    """A hypergraph viewed as a GF(2) vector indexed by edge rank"""
    shape: ClassShape
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.shape.total:
            raise ShapeError(f"Word has bits beyond length {self.shape.total}")

    @classmethod
    def from_system(cls, system: PartiteHypergraph) -> "F2Word":
        return cls(system.shape, system.mask)

    def to_system(self) -> OctahedralSystem:
        return OctahedralSystem.from_mask(self.shape, self.bits)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __xor__(self, other: "F2Word") -> "F2Word":
        if self.shape != other.shape:
            raise ShapeError(f"Shape mismatch: {self.shape} vs {other.shape}")
        return F2Word(self.shape, self.bits ^ other.bits)


@dataclass(frozen=True)
class F2Basis:
    """Fiber generators of the octahedral subspace, with a lowest-bit-pivot echelon form"""
    shape: ClassShape
    generators: Tuple[int, ...]

    @cached_property
    def _echelon(self) -> Tuple[Dict[int, int], Tuple[int, ...]]:
        pivots: Dict[int, int] = {}
        order: List[int] = []
        for g in self.generators:
            reduced = _reduce(g, pivots)
            if reduced:
                low = (reduced & -reduced).bit_length() - 1
                pivots[low] = reduced
                order.append(reduced)
        return pivots, tuple(order)

    @property
    def pivots(self) -> Dict[int, int]:
        return self._echelon[0]

    @property
    def independent(self) -> Tuple[int, ...]:
        """An independent spanning subset, in generator order after reduction"""
        return self._echelon[1]

    @property
    def rank(self) -> int:
        return len(self.independent)


def _reduce(word: int, pivots: Dict[int, int]) -> int:
    while word:
        low = word & -word
        vec = pivots.get(low.bit_length() - 1)
        if vec is None:
            return word
        word ^= vec
    return 0


def fiber_mask(shape: ClassShape, j: int, others: Tuple[int, ...]) -> int:
    """All edges agreeing with `others` outside class j"""
    mask = 0
    for p in range(shape.sizes[j]):
        edge = others[:j] + (p,) + others[j:]
        mask |= 1 << shape.rank(edge)
    return mask


@lru_cache(maxsize=32)
def coboundary_basis(shape: ClassShape) -> F2Basis:
    shape.require_octahedral()
    limit = config.limits.max_edge_bits
    if shape.total > limit:
        raise ResourceLimitError(f"Shape {shape} has {shape.total} potential edges (limit {limit})", shape.total, limit)
    generators = []
    for j in range(shape.n):
        ranges = [range(m) for i, m in enumerate(shape.sizes) if i != j]
        for others in product(*ranges):
            generators.append(fiber_mask(shape, j, others))
    return F2Basis(shape, tuple(generators))


def dimension(shape: ClassShape) -> int:
    shape.require_octahedral()
    return shape.total - shape.interior


@dataclass(frozen=True)
class SystemCount:
    """2**dimension octahedral systems; `count` is None above the exact-count cap"""
    dimension: int
    count: Optional[int]

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "count": None if self.count is None else str(self.count),
            "count_exponent": self.dimension,
        }


def count_systems(shape: ClassShape) -> SystemCount:
    dim = dimension(shape)
    exact = 2 ** dim if dim <= config.limits.exact_count_max_dimension else None
    return SystemCount(dim, exact)


def membership(basis: F2Basis, word: F2Word) -> bool:
    """True iff the word lies in the span of the fiber generators"""
    if basis.shape != word.shape:
        raise ShapeError(f"Shape mismatch: {basis.shape} vs {word.shape}")
    return _reduce(word.bits, basis.pivots) == 0


def brute_force_count(shape: ClassShape, chunk_log2: int = 20) -> int:
    """Count edge subsets passing the pair-selection parity test by exhaustion"""
    shape.require_octahedral()
    limit = config.limits.max_brute_force_edges
    if shape.total > limit:
        raise ResourceLimitError(
            f"Brute force over 2^{shape.total} subsets exceeds limit 2^{limit}", shape.total, limit
        )
    boxes = [np.uint64(box) for _, box in pair_selection_masks(shape)]
    total = 1 << shape.total
    chunk = 1 << chunk_log2
    count = 0
    for start in range(0, total, chunk):
        subsets = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        even = np.ones(subsets.shape[0], dtype=bool)
        for box in boxes:
            even &= (np.bitwise_count(subsets & box) & 1) == 0
        count += int(even.sum())
    return count


def _check_span_budget(shape: ClassShape, max_dimension: Optional[int]) -> int:
    dim = dimension(shape)
    limit = config.limits.max_span_dimension if max_dimension is None else max_dimension
    if dim > limit:
        raise ResourceLimitError(f"Span of {shape} has dimension {dim} (limit {limit})", dim, limit)
    return dim


def enumerate_span(
    shape: ClassShape,
    visitor: Callable[[int], None],
    fixed_high_bits: int = 0,
    fixed_high_value: int = 0,
    max_dimension: Optional[int] = None,
) -> int:
    """
    Visit every codeword (as an edge mask) exactly once in Gray-code order,
    each step XOR-ing one basis vector. With fixed_high_bits > 0 only the
    codewords whose top coefficients equal fixed_high_value are visited,
    which partitions the span for independent scans. Returns the visit count.
    """
    _check_span_budget(shape, max_dimension)
    vectors = coboundary_basis(shape).independent
    free = len(vectors) - fixed_high_bits
    if free < 0 or fixed_high_value >> fixed_high_bits:
        raise ShapeError("Invalid span partition")
    word = 0
    for k in range(fixed_high_bits):
        if fixed_high_value >> k & 1:
            word ^= vectors[free + k]
    visitor(word)
    for step in range(1, 1 << free):
        word ^= vectors[(step & -step).bit_length() - 1]
        visitor(word)
    return 1 << free


def _columns(mask: int, width: int) -> np.ndarray:
    return np.array([(mask >> (_WORD_BITS * k)) & _WORD_MASK for k in range(width)], dtype=np.uint64)


def from_columns(row: np.ndarray) -> int:
    return sum(int(w) << (_WORD_BITS * k) for k, w in enumerate(row))


def iter_span_blocks(shape: ClassShape, block_log2: int = 18, max_dimension: Optional[int] = None) -> Iterator[np.ndarray]:
    """
    Yield the span in blocks of shape (N, W) uint64, W 64-bit columns per
    codeword. The low basis vectors are tabulated by doubling; the high ones
    are stepped in Gray-code order over that table.
    """
    _check_span_budget(shape, max_dimension)
    vectors = coboundary_basis(shape).independent
    width = max(1, -(-shape.total // _WORD_BITS))
    low = vectors[:block_log2]
    high = vectors[block_log2:]

    table = np.zeros((1, width), dtype=np.uint64)
    for v in low:
        table = np.concatenate([table, table ^ _columns(v, width)])

    offset = np.zeros(width, dtype=np.uint64)
    yield table
    for step in range(1, 1 << len(high)):
        offset = offset ^ _columns(high[(step & -step).bit_length() - 1], width)
        yield table ^ offset


def block_weights(block: np.ndarray) -> np.ndarray:
    return np.bitwise_count(block).sum(axis=1, dtype=np.int64)


def block_covered(block: np.ndarray, shape: ClassShape) -> np.ndarray:
    width = block.shape[1]
    covered = np.ones(block.shape[0], dtype=bool)
    for vm in vertex_masks(shape).values():
        covered &= (block & _columns(vm, width)).any(axis=1)
    return covered


def weight_distribution(shape: ClassShape, max_dimension: Optional[int] = None) -> Dict[int, int]:
    """Number of octahedral systems of each edge count 0..prod(m_i)"""
    histogram = np.zeros(shape.total + 1, dtype=np.int64)
    for block in iter_span_blocks(shape, max_dimension=max_dimension):
        histogram += np.bincount(block_weights(block), minlength=shape.total + 1)
    return {w: int(c) for w, c in enumerate(histogram)}


@dataclass(frozen=True)
class CoveringScan:
    """Weight profile of the codewords without isolated vertex"""
    shape: ClassShape
    profile: Dict[int, int]
    minimum_weight: Optional[int]
    witness: Optional[int]
    examined: int


def scan_covering_systems(shape: ClassShape, max_dimension: Optional[int] = None) -> CoveringScan:
    """
    Enumerate the span and keep the systems without isolated vertex: their
    weight histogram and the first minimum-weight one in enumeration order.
    """
    histogram = np.zeros(shape.total + 1, dtype=np.int64)
    best_weight: Optional[int] = None
    best_mask: Optional[int] = None
    examined = 0
    for block in iter_span_blocks(shape, max_dimension=max_dimension):
        examined += block.shape[0]
        covered = block_covered(block, shape)
        if not covered.any():
            continue
        weights = block_weights(block)
        histogram += np.bincount(weights[covered], minlength=shape.total + 1)
        masked = np.where(covered, weights, shape.total + 1)
        idx = int(np.argmin(masked))
        if best_weight is None or int(masked[idx]) < best_weight:
            best_weight = int(masked[idx])
            best_mask = from_columns(block[idx])
    logger.info("covering scan finished", shape=str(shape), examined=examined, minimum=best_weight)
    return CoveringScan(
        shape=shape,
        profile={w: int(c) for w, c in enumerate(histogram)},
        minimum_weight=best_weight,
        witness=best_mask,
        examined=examined,
    )


def complement(system: PartiteHypergraph) -> OctahedralSystem:
    """Δ with the complete system"""
    full = (1 << system.shape.total) - 1
    return OctahedralSystem.from_mask(system.shape, system.mask ^ full)
