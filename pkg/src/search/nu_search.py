"""
Exact minimum edge count of octahedral systems without isolated vertex.

Two methods:
  enumeration    scan the whole GF(2) span (small dimension only)
  subset-search  for w = lower bound, lower bound + 1, ... look for a w-edge
                 system by branch and bound; the first w with a hit is the answer

Subset search
-------------
A node fixes a set K of chosen edges and a set X of excluded ones. Every
pair selection holding an odd number of K edges needs one more edge from its
free edges; every uncovered vertex needs one of its free edges. The node
branches on the constraint with the fewest free edges: the i-th branch takes
the i-th candidate and excludes the earlier ones. A constraint with no free
edge prunes the node (a decided pair selection with odd parity, or a vertex
that can no longer be covered).

Symmetry is broken twice. At the root, a solution whose closest pair of
edges differs in exactly t classes can be relabelled so that the pair is
(0,...,0) and the 0/1 word on a class set J with |J| = t, J taken up to
permutations of equal-size classes; such a branch only admits edges
pairwise at distance >= t. Inside the tree, vertices no chosen edge has
touched are interchangeable within their class, so candidates are grouped
into orbits under those permutations: one representative per orbit is
tried and a refuted orbit is excluded whole.
"""
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import structlog

from src.config.config import SearchBudget, config
from src.hypergraph.core import ClassShape, OctahedralSystem, box_mask, has_isolated_vertex, is_octahedral, iter_bits, pair_selection_masks
from src.hypergraph.constructions import inductive_upper, square_construction
from src.hypergraph.f2_space import block_covered, block_weights, dimension, from_columns, iter_span_blocks, scan_covering_systems
from src.hypergraph.errors import DomainError
from src.search.bounds import bound_report, even_classes

logger = structlog.get_logger(__name__)

ENUMERATION = "enumeration"
SUBSET_SEARCH = "subset-search"
METHOD_ALIASES = {"enum": ENUMERATION, "search": SUBSET_SEARCH}


@dataclass(frozen=True)
class SearchOutcome:
    """
    Result of a minimum-edge search. `nu` and `witness` are set when the
    value is certified; on budget exhaustion `nu` is None and [lower, upper]
    is the best known interval, `witness` then achieving `upper`.
    """
    shape: ClassShape
    nu: Optional[int]
    witness: Optional[OctahedralSystem]
    method: str
    nodes_explored: int
    exhaustive: bool
    lower: int
    upper: int
    class_order: Tuple[int, ...] = ()
    elapsed_seconds: float = 0.0
    levels: Tuple[dict, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "classes": list(self.shape.sizes),
            "nu": self.nu,
            "exhaustive": self.exhaustive,
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "nodes_explored": self.nodes_explored,
            "class_order": list(self.class_order),
            "elapsed_seconds": round(self.elapsed_seconds, 3),
            "levels": list(self.levels),
            "witness": None if self.witness is None else self.witness.to_instance(),
        }


class _Node(NamedTuple):
    chosen: int
    excluded: int
    count: int
    odd: int
    touched: int


class _BudgetExhausted(Exception):
    pass


class _Stopped(Exception):
    """Another subtree already settled the level"""


# set in each worker process by _init_worker
_stop_event = None


def _init_worker(stop) -> None:
    global _stop_event
    _stop_event = stop


class _SearchTables:
    """Per-shape lookup tables shared by every node of a search"""

    def __init__(self, shape: ClassShape):
        self.shape = shape
        self.n = shape.n
        self.sizes = shape.sizes
        self.full = (1 << shape.total) - 1
        self.offsets = [sum(shape.sizes[:i]) for i in range(shape.n)]
        self.vertex_count = sum(shape.sizes)
        self.flips_per_edge = shape.interior

        self.coords = [shape.unrank(r) for r in range(shape.total)]
        self.vertex_mask = [0] * self.vertex_count
        self.vertex_classes = [i for i, m in enumerate(shape.sizes) for _ in range(m)]
        self.edge_vertices = []
        for r, e in enumerate(self.coords):
            touched = 0
            for i, p in enumerate(e):
                vid = self.offsets[i] + p
                self.vertex_mask[vid] |= 1 << r
                touched |= 1 << vid
            self.edge_vertices.append(touched)

        self.box_masks = [box for _, box in pair_selection_masks(shape)]
        self.edge_boxes = [0] * shape.total
        for b, box in enumerate(self.box_masks):
            for r in iter_bits(box):
                self.edge_boxes[r] |= 1 << b

    @lru_cache(maxsize=None)
    def ball(self, r: int, t: int) -> int:
        """Edges other than r differing from it in fewer than t classes"""
        if t <= 1:
            return 0
        e = self.coords[r]
        agree = self.n - t + 1
        mask = 0
        for fixed in combinations(range(self.n), agree):
            choices = [(e[i],) if i in fixed else range(m) for i, m in enumerate(self.sizes)]
            mask |= box_mask(self.shape, choices)
        return mask & ~(1 << r)

    def untouched_positions(self, touched: int, i: int) -> Tuple[int, ...]:
        base = self.offsets[i]
        return tuple(p for p in range(self.sizes[i]) if not touched >> (base + p) & 1)

    @lru_cache(maxsize=1 << 16)
    def orbit(self, signature: Tuple[int, ...], touched: int) -> Tuple[int, int]:
        """Representative rank and mask of the orbit of edges matching `signature` (-1 = any untouched)"""
        choices = []
        for i, p in enumerate(signature):
            choices.append((p,) if p >= 0 else self.untouched_positions(touched, i))
        rep = tuple(c[0] for c in choices)
        return self.shape.rank(rep), box_mask(self.shape, choices)

    def root_nodes(self, symmetry: bool) -> List[Tuple[int, _Node]]:
        """(t, node) pairs the search starts from"""
        if not symmetry:
            all_touched = (1 << self.vertex_count) - 1
            return [(1, _Node(0, 0, 0, 0, all_touched))]
        roots = []
        for t in range(1, self.n + 1):
            for classes in _class_set_representatives(self.sizes, t):
                second = tuple(1 if i in classes else 0 for i in range(self.n))
                r0, r1 = 0, self.shape.rank(second)
                chosen = (1 << r0) | (1 << r1)
                excluded = (self.ball(r0, t) | self.ball(r1, t)) & ~chosen
                odd = self.edge_boxes[r0] ^ self.edge_boxes[r1]
                touched = self.edge_vertices[r0] | self.edge_vertices[r1]
                roots.append((t, _Node(chosen, excluded, 2, odd, touched)))
        return roots


@lru_cache(maxsize=16)
def _tables(shape: ClassShape) -> _SearchTables:
    return _SearchTables(shape)


def _class_set_representatives(sizes: Sequence[int], t: int) -> List[Tuple[int, ...]]:
    """One class set of size t per orbit under permutations of equal-size classes"""
    groups: Dict[int, List[int]] = {}
    for i, m in enumerate(sizes):
        groups.setdefault(m, []).append(i)
    keys = sorted(groups)
    reps = []
    for counts in product(*(range(len(groups[k]) + 1) for k in keys)):
        if sum(counts) != t:
            continue
        reps.append(tuple(sorted(i for k, c in zip(keys, counts) for i in groups[k][:c])))
    return reps


class _Searcher:
    """Depth-first search of one level w below a set of start nodes"""

    def __init__(
        self,
        tables: _SearchTables,
        w: int,
        t: int,
        node_limit: int,
        deadline: float,
        visitor: Optional[Callable[[int], None]] = None,
        stop=None,
    ):
        self.tables = tables
        self.stop = stop
        self.w = w
        self.t = t
        self.node_limit = node_limit
        self.deadline = deadline
        self.visitor = visitor
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise _BudgetExhausted()
        if self.nodes & 0xFF == 1:
            if self.stop is not None and self.stop.is_set():
                raise _Stopped()
            if time.time() > self.deadline:
                raise _BudgetExhausted()

    def expand(self, node: _Node):
        """
        Evaluate a node. Returns ("hit", None), ("pruned", None) or
        ("branch", iterator of children).
        """
        tb = self.tables
        remaining = self.w - node.count
        free = tb.full & ~node.chosen & ~node.excluded

        uncovered_per_class = [0] * tb.n
        best_mask = 0
        best_size = None
        for vid, vm in enumerate(tb.vertex_mask):
            if node.chosen & vm:
                continue
            uncovered_per_class[tb.vertex_classes[vid]] += 1
            cand = vm & free
            size = cand.bit_count()
            if size == 0:
                return "pruned", None
            if best_size is None or size < best_size:
                best_mask, best_size = cand, size

        odd_count = node.odd.bit_count()
        needed = max(max(uncovered_per_class), -(-odd_count // tb.flips_per_edge))
        if needed > remaining:
            return "pruned", None
        if needed == 0:
            return ("hit", None) if remaining == 0 else ("pruned", None)

        for b in iter_bits(node.odd):
            cand = tb.box_masks[b] & free
            size = cand.bit_count()
            if size == 0:
                return "pruned", None
            if best_size is None or size < best_size:
                best_mask, best_size = cand, size
                if size == 1:
                    break

        return "branch", self._children(node, best_mask)

    def _orbits(self, node: _Node, candidates: int) -> List[Tuple[int, int]]:
        tb = self.tables
        seen = {}
        for r in iter_bits(candidates):
            e = tb.coords[r]
            signature = tuple(
                p if node.touched >> (tb.offsets[i] + p) & 1 else -1 for i, p in enumerate(e)
            )
            if signature not in seen:
                seen[signature] = tb.orbit(signature, node.touched)
        return sorted(seen.values())

    def _children(self, node: _Node, candidates: int) -> Iterator[_Node]:
        tb = self.tables
        excluded = 0
        for rep, orbit_mask in self._orbits(node, candidates):
            bit = 1 << rep
            yield _Node(
                chosen=node.chosen | bit,
                excluded=(node.excluded | excluded | tb.ball(rep, self.t)) & ~(node.chosen | bit),
                count=node.count + 1,
                odd=node.odd ^ tb.edge_boxes[rep],
                touched=node.touched | tb.edge_vertices[rep],
            )
            excluded |= orbit_mask

    def run(self, node: _Node) -> Optional[int]:
        """First solution below node in depth-first order (None if refuted or when visiting)"""
        self._tick()
        status, children = self.expand(node)
        if status == "hit":
            if self.visitor is None:
                return node.chosen
            self.visitor(node.chosen)
            return None
        if status == "pruned":
            return None
        for child in children:
            found = self.run(child)
            if found is not None:
                return found
        return None


def _search_task(sizes, w, t, node, symmetry, node_limit, deadline):
    """Run one subtree in a worker process; returns (status, mask, nodes), status "stopped" when told to give up"""
    tables = _tables(ClassShape(tuple(sizes)))
    searcher = _Searcher(tables, w, t, node_limit, deadline, stop=_stop_event)
    try:
        found = searcher.run(_Node(*node))
    except _BudgetExhausted:
        return "budget", None, searcher.nodes
    except _Stopped:
        return "stopped", None, searcher.nodes
    return ("hit" if found is not None else "refuted"), found, searcher.nodes


def _frontier(tables: _SearchTables, w: int, symmetry: bool, target: int, max_depth: int = 3):
    """
    Expand the top of the tree breadth-first, keeping depth-first order, into
    independent tasks. Entries are (t, node, solved) where solved marks a node
    that is already a solution. Returns (entries, nodes expanded).
    """
    entries = [(t, node, False) for t, node in tables.root_nodes(symmetry) if node.count <= w]
    expanded = 0
    for _ in range(max_depth):
        if len(entries) >= target:
            break
        grown = []
        for t, node, solved in entries:
            if solved:
                grown.append((t, node, True))
                continue
            scout = _Searcher(tables, w, t, node_limit=1 << 62, deadline=float("inf"))
            status, children = scout.expand(node)
            expanded += 1
            if status == "hit":
                grown.append((t, node, True))
            elif status == "branch":
                grown.extend((t, child, False) for child in children)
        entries = grown
    return entries, expanded


def _search_level(tables: _SearchTables, w: int, symmetry: bool, budget: SearchBudget, node_limit: int, deadline: float):
    """
    Decide whether a w-edge system exists. Returns (status, mask, nodes) with
    status "hit", "refuted" or "budget"; the hit is the first in depth-first
    order, so the answer does not depend on the number of workers.
    """
    workers = max(1, budget.workers)
    entries, nodes = _frontier(tables, w, symmetry, target=8 * workers)
    if not entries:
        return "refuted", None, nodes
    share = max(1, (node_limit - nodes) // len(entries))
    sizes = tables.sizes

    if workers == 1:
        for t, node, solved in entries:
            if solved:
                return "hit", node.chosen, nodes
            status, mask, used = _search_task(sizes, w, t, tuple(node), symmetry, share, deadline)
            nodes += used
            if status != "refuted":
                return status, mask, nodes
        return "refuted", None, nodes

    results: List[Optional[tuple]] = [None] * len(entries)
    context = multiprocessing.get_context()
    stop = context.Event()
    with ProcessPoolExecutor(max_workers=workers, mp_context=context, initializer=_init_worker, initargs=(stop,)) as pool:
        futures = []
        for idx, (t, node, solved) in enumerate(entries):
            if solved:
                results[idx] = ("hit", node.chosen, 0)
                futures.append(None)
            else:
                futures.append(pool.submit(_search_task, sizes, w, t, tuple(node), symmetry, share, deadline))
        for idx, fut in enumerate(futures):
            if fut is None:
                status = results[idx][0]
            else:
                results[idx] = fut.result()
                status = results[idx][0]
            if status != "refuted":
                # every earlier subtree is refuted, so later ones cannot change the answer
                stop.set()
                pool.shutdown(wait=True, cancel_futures=True)
                break
    for res in results:
        if res is not None:
            nodes += res[2]
    for res in results:
        if res is None:
            continue
        if res[0] != "refuted":
            return res[0], res[1], nodes
    return "refuted", None, nodes


def _canonical(shape: ClassShape) -> Tuple[ClassShape, Tuple[int, ...]]:
    order = tuple(sorted(range(shape.n), key=lambda i: (shape.sizes[i], i)))
    return ClassShape(tuple(shape.sizes[i] for i in order)), order


def _to_caller_order(system: OctahedralSystem, shape: ClassShape, order: Tuple[int, ...]) -> OctahedralSystem:
    edges = []
    for e in system.edges:
        original = [0] * shape.n
        for j, i in enumerate(order):
            original[i] = e[j]
        edges.append(tuple(original))
    return OctahedralSystem(shape, frozenset(edges))


def _upper_witness(shape: ClassShape) -> OctahedralSystem:
    report = bound_report(shape)
    if report.upper_provenance == "square construction":
        return square_construction(shape.sizes[0], shape.n)
    return inductive_upper(shape)


def _validated(system: OctahedralSystem) -> OctahedralSystem:
    if not is_octahedral(system.shape, system.mask) or has_isolated_vertex(system.shape, system.mask):
        raise RuntimeError(f"search produced an invalid witness on {system.shape}")
    return system


def _enumerate_min(shape: ClassShape, visitor: Optional[Callable[[int], None]]):
    scan = scan_covering_systems(shape)
    if visitor is not None and scan.minimum_weight is not None:
        for block in iter_span_blocks(shape):
            covered = block_covered(block, shape)
            hits = covered & (block_weights(block) == scan.minimum_weight)
            for idx in hits.nonzero()[0]:
                visitor(from_columns(block[idx]))
    return scan


def min_edges(
    shape: ClassShape,
    budget: Optional[SearchBudget] = None,
    method: str = "auto",
    symmetry: bool = True,
    visitor: Optional[Callable[[OctahedralSystem], None]] = None,
    shortcut_upper: bool = True,
) -> SearchOutcome:
    """
    Minimum number of edges of a shape's octahedral systems without isolated
    vertex. The search runs on the ascending reordering of the classes; the
    witness is mapped back and `class_order` records the reordering.

    With a visitor, every solution of the minimum weight reached by the
    search is passed to it (up to the symmetry reduction in subset search).
    Once every lower weight is refuted the upper-bound construction is
    returned without searching its level, unless shortcut_upper is False.
    """
    shape.require_octahedral()
    budget = budget or config.budget
    started = time.time()
    deadline = started + budget.max_seconds
    canonical, order = _canonical(shape)
    report = bound_report(canonical)

    method = METHOD_ALIASES.get(method, method)
    if method == "auto":
        method = ENUMERATION if dimension(canonical) <= config.limits.max_span_dimension else SUBSET_SEARCH
    if method not in (ENUMERATION, SUBSET_SEARCH):
        raise DomainError(f"unknown method {method!r}")

    def mask_visitor(mask: int):
        visitor(_to_caller_order(OctahedralSystem.from_mask(canonical, mask), shape, order))

    log = logger.bind(shape=str(shape), method=method)

    if method == ENUMERATION:
        scan = _enumerate_min(canonical, mask_visitor if visitor else None)
        witness = _validated(_to_caller_order(OctahedralSystem.from_mask(canonical, scan.witness), shape, order))
        log.info("enumeration finished", nu=scan.minimum_weight, examined=scan.examined)
        return SearchOutcome(
            shape=shape,
            nu=scan.minimum_weight,
            witness=witness,
            method=ENUMERATION,
            nodes_explored=scan.examined,
            exhaustive=True,
            lower=scan.minimum_weight,
            upper=scan.minimum_weight,
            class_order=order,
            elapsed_seconds=time.time() - started,
        )

    tables = _tables(canonical)
    step = 2 if even_classes(canonical) else 1
    w = report.lower
    if step == 2 and w % 2:
        w += 1
    nodes = 0
    levels = []
    while w <= report.upper:
        remaining = budget.max_nodes - nodes
        if remaining <= 0 or time.time() > deadline:
            break
        if w == report.upper and visitor is None and shortcut_upper:
            witness = _to_caller_order(_upper_witness(canonical), shape, order)
            levels.append({"weight": w, "status": "construction"})
            log.info("lower levels refuted, upper construction is optimal", nu=w, nodes=nodes)
            return _found(shape, w, _validated(witness), nodes, order, started, levels)

        if visitor is not None:
            status, mask, used = _visit_level(tables, w, symmetry, remaining, deadline, mask_visitor)
        else:
            status, mask, used = _search_level(tables, w, symmetry, budget, remaining, deadline)
        nodes += used
        levels.append({"weight": w, "status": status, "nodes": used})
        log.info("level finished", weight=w, status=status, nodes=used)
        if status == "hit":
            witness = _to_caller_order(OctahedralSystem.from_mask(canonical, mask), shape, order)
            return _found(shape, w, _validated(witness), nodes, order, started, levels)
        if status == "budget":
            break
        w += step

    log.warning("search budget exhausted", lower=w, upper=report.upper, nodes=nodes)
    return SearchOutcome(
        shape=shape,
        nu=None,
        witness=_to_caller_order(_upper_witness(canonical), shape, order),
        method=SUBSET_SEARCH,
        nodes_explored=nodes,
        exhaustive=False,
        lower=min(w, report.upper),
        upper=report.upper,
        class_order=order,
        elapsed_seconds=time.time() - started,
        levels=tuple(levels),
    )


def _found(shape, w, witness, nodes, order, started, levels) -> SearchOutcome:
    return SearchOutcome(
        shape=shape,
        nu=w,
        witness=witness,
        method=SUBSET_SEARCH,
        nodes_explored=nodes,
        exhaustive=True,
        lower=w,
        upper=w,
        class_order=order,
        elapsed_seconds=time.time() - started,
        levels=tuple(levels),
    )


def _visit_level(tables, w, symmetry, node_limit, deadline, visitor):
    """Sequential level scan passing every solution to the visitor"""
    hits = []

    def collect(mask: int):
        hits.append(mask)
        visitor(mask)

    nodes = 0
    for t, node in tables.root_nodes(symmetry):
        if node.count > w:
            continue
        searcher = _Searcher(tables, w, t, node_limit - nodes, deadline, visitor=collect)
        try:
            searcher.run(node)
        except _BudgetExhausted:
            return "budget", None, nodes + searcher.nodes
        nodes += searcher.nodes
    if hits:
        return "hit", hits[0], nodes
    return "refuted", None, nodes


@dataclass(frozen=True)
class MonotonicityEntry:
    smaller: ClassShape
    nu_smaller: Optional[int]
    nu: Optional[int]

    @property
    def increasing(self) -> Optional[bool]:
        if self.nu is None or self.nu_smaller is None:
            return None
        return self.nu_smaller <= self.nu

    def to_dict(self) -> dict:
        return {
            "smaller": list(self.smaller.sizes),
            "nu_smaller": self.nu_smaller,
            "nu": self.nu,
            "increasing": self.increasing,
        }


def monotonicity_experiment(shape: ClassShape, budget: Optional[SearchBudget] = None) -> List[MonotonicityEntry]:
    """
    Compare the minimum of a shape with each shape obtained by shrinking one
    class by one. Observations only; a decrease is reported, not raised.
    """
    outcome = min_edges(shape, budget)
    entries = []
    seen = set()
    for i, m in enumerate(shape.sizes):
        if m <= 2:
            continue
        smaller = shape.with_size(i, m - 1)
        key = tuple(sorted(smaller.sizes))
        if key in seen:
            continue
        seen.add(key)
        entries.append(MonotonicityEntry(smaller, min_edges(smaller, budget).nu, outcome.nu))
    for entry in entries:
        if entry.increasing is False:
            logger.warning("minimum decreased when a class grew", shape=str(shape), smaller=str(entry.smaller))
    return entries
