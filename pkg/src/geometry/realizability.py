"""
Exact realizability of (3,3,3) octahedral systems in the plane.

Radial projection does not change which colourful triangles contain the
origin, so a planar configuration is determined by the cyclic order of its
nine points and their nine antipodes on a circle. Positions live in Z18:
a point sits in one of nine half-circle slots, possibly flipped to the far
side, at position slot + 9 * flip. Point q has colour q % 3 and is vertex
(q % 3, q // 3).

Rotations, including the half turn that sends every point to its antipode,
are removed by pinning point 0 to position 0. Reflection p -> -p keeps that
pin and swaps the occupants of slots 1 and 8, so only types whose slot 8
point has the larger index are searched.
"""
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

import structlog

from src.geometry.colourful import ColourConfig, RationalPoint, depth_system
from src.hypergraph.core import ClassShape, OctahedralSystem
from src.hypergraph.errors import NotGeneralPositionError, ShapeError

logger = structlog.get_logger(__name__)

SHAPE = ClassShape((3, 3, 3))
POINTS = 9
HALF = 9
FULL = 18

# set in each worker process by _init_worker
_stop_event = None


class _Stopped(Exception):
    pass


def _init_worker(stop) -> None:
    global _stop_event
    _stop_event = stop


def _point(class_index: int, position: int) -> int:
    return 3 * position + class_index


def contains_origin(a: int, b: int, c: int) -> bool:
    """Three distinct non-antipodal circle positions surround the centre iff no gap reaches a half turn"""
    x, y, z = sorted((a, b, c))
    return max(y - x, z - y, FULL - (z - x)) < HALF


@dataclass(frozen=True)
class CircularType:
    """Circle positions in Z18 of points 0..8; antipodes sit 9 further on"""
    positions: Tuple[int, ...]

    def __post_init__(self):
        positions = tuple(int(p) % FULL for p in self.positions)
        if len(positions) != POINTS:
            raise ShapeError(f"a circular type places {POINTS} points, got {len(positions)}")
        if len({p % HALF for p in positions}) != POINTS:
            raise ShapeError("two points share a direction or are antipodal")
        object.__setattr__(self, "positions", positions)

    @classmethod
    def from_slots(cls, slots: Sequence[Tuple[int, int]]) -> "CircularType":
        """slots[s] = (point, flip) for the nine half-circle slots"""
        positions = [0] * POINTS
        for s, (q, flip) in enumerate(slots):
            positions[q] = s + HALF * flip
        return cls(tuple(positions))

    def slots(self) -> List[Tuple[int, int]]:
        out = [(0, 0)] * HALF
        for q, pos in enumerate(self.positions):
            out[pos % HALF] = (q, pos // HALF)
        return out

    def normalised(self) -> "CircularType":
        """Rotated so point 0 sits at position 0"""
        shift = self.positions[0]
        return CircularType(tuple(p - shift for p in self.positions))

    def reflected(self) -> "CircularType":
        """Mirror image p -> -p; it induces the same system"""
        return CircularType(tuple(-p for p in self.positions))

    def word(self) -> List[str]:
        """The 18-symbol cyclic word, p for points and q for antipodes"""
        word = [""] * FULL
        for q, pos in enumerate(self.positions):
            word[pos] = f"p{q}"
            word[(pos + HALF) % FULL] = f"q{q}"
        return word

    def tangent_parameter(self, q: int) -> Fraction:
        slot, flip = self.positions[q] % HALF, self.positions[q] // HALF
        return Fraction(-1, slot + 1) if flip else Fraction(slot + 1)

    def to_dict(self) -> dict:
        return {
            "word": self.word(),
            "tangent_parameters": {f"p{q}": str(self.tangent_parameter(q)) for q in range(POINTS)},
        }


def induced_system(t: CircularType) -> OctahedralSystem:
    edges = [
        e for e in SHAPE.edges()
        if contains_origin(*(t.positions[_point(c, p)] for c, p in enumerate(e)))
    ]
    return OctahedralSystem(SHAPE, frozenset(edges))


def _circle_point(t: Fraction) -> RationalPoint:
    denominator = 1 + t * t
    return RationalPoint(((1 - t * t) / denominator, 2 * t / denominator))


def witness_config(t: CircularType) -> ColourConfig:
    """Rational points on the unit circle in the cyclic order of the type"""
    classes = tuple(
        tuple(_circle_point(t.tangent_parameter(_point(c, p))) for p in range(3))
        for c in range(3)
    )
    return ColourConfig(2, classes)


def _half_plane(v: Tuple[Fraction, Fraction]) -> int:
    x, y = v
    return 0 if y > 0 or (y == 0 and x > 0) else 1


def _angular_cmp(u, v) -> int:
    hu, hv = _half_plane(u), _half_plane(v)
    if hu != hv:
        return hu - hv
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def type_from_config(cfg: ColourConfig) -> CircularType:
    """The circular type of a planar (3,3,3) configuration, from its exact angular order"""
    if cfg.d != 2 or cfg.shape.sizes != SHAPE.sizes:
        raise ShapeError(f"need a planar configuration of shape {SHAPE}, got d={cfg.d}, {cfg.shape}")
    directions = []
    for q in range(POINTS):
        v = cfg.classes[q % 3][q // 3].coords
        if v[0] == 0 and v[1] == 0:
            raise NotGeneralPositionError("point at the origin", selection=(q % 3, q // 3))
        directions.append((v, q, 0))
        directions.append(((-v[0], -v[1]), q, 1))
    directions.sort(key=cmp_to_key(lambda a, b: _angular_cmp(a[0], b[0])))
    for (u, qa, _), (w, qb, _) in zip(directions, directions[1:] + directions[:1]):
        if _angular_cmp(u, w) == 0:
            raise NotGeneralPositionError("two points collinear with the origin", selection=(qa, qb))
    index = {(q, side): i for i, (_, q, side) in enumerate(directions)}
    base = index[(0, 0)]
    return CircularType(tuple((index[(q, 0)] - base) % FULL for q in range(POINTS)))


@lru_cache(maxsize=64)
def _partners(mask: int) -> Tuple[Tuple[Tuple[int, int, bool], ...], ...]:
    """For each point, the pairs completing a colourful triple and whether that triple is an edge"""
    table = []
    for q in range(POINTS):
        c, p = q % 3, q // 3
        others = [k for k in range(3) if k != c]
        rows = []
        for pa, pb in product(range(3), repeat=2):
            edge = [0, 0, 0]
            edge[c], edge[others[0]], edge[others[1]] = p, pa, pb
            rows.append((_point(others[0], pa), _point(others[1], pb), bool(mask >> SHAPE.rank(edge) & 1)))
        table.append(tuple(rows))
    return tuple(table)


def _run_partition(task: Tuple[int, int, int]) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Depth-first search over the types with point 0 in slot 0, a fixed choice for slot 1 and a larger point in slot 8"""
    mask, first, flip = task
    partners = _partners(mask)
    positions = [-1] * POINTS
    positions[0] = 0
    nodes = 0

    def consistent(q: int) -> bool:
        pq = positions[q]
        for a, b, present in partners[q]:
            pa, pb = positions[a], positions[b]
            if pa >= 0 and pb >= 0 and contains_origin(pq, pa, pb) != present:
                return False
        return True

    def place(slot: int) -> bool:
        nonlocal nodes
        if slot == HALF:
            return True
        for q in range(1, POINTS):
            if positions[q] >= 0 or (slot == HALF - 1 and q < first):
                continue
            for f in (0, 1):
                nodes += 1
                if nodes & 0xFF == 0 and _stop_event is not None and _stop_event.is_set():
                    raise _Stopped()
                positions[q] = slot + HALF * f
                if consistent(q) and place(slot + 1):
                    return True
                positions[q] = -1
        return False

    positions[first] = 1 + HALF * flip
    nodes += 1
    try:
        if consistent(first) and place(2):
            return tuple(positions), nodes
    except _Stopped:
        pass
    return None, nodes


def _partitions(mask: int) -> List[Tuple[int, int, int]]:
    # point 8 in slot 1 leaves no larger point for slot 8
    return [(mask, q, f) for q in range(1, POINTS - 1) for f in (0, 1)]


def _search(mask: int, workers: int) -> Tuple[Optional[CircularType], int]:
    tasks = _partitions(mask)
    if workers <= 1:
        total = 0
        for task in tasks:
            found, nodes = _run_partition(task)
            total += nodes
            if found is not None:
                return CircularType(found), total
        return None, total
    context = multiprocessing.get_context()
    stop = context.Event()
    total = 0
    with ProcessPoolExecutor(max_workers=workers, mp_context=context, initializer=_init_worker, initargs=(stop,)) as pool:
        futures = [pool.submit(_run_partition, task) for task in tasks]
        for fut in futures:
            found, nodes = fut.result()
            total += nodes
            if found is not None:
                stop.set()
                pool.shutdown(wait=True, cancel_futures=True)
                return CircularType(found), total
    return None, total


def relabelings(system: OctahedralSystem) -> List[OctahedralSystem]:
    """Distinct images under class permutations and within-class permutations, identity first"""
    seen: Dict[int, OctahedralSystem] = {}
    within = list(permutations(range(3)))
    for sigma in permutations(range(3)):
        for pis in product(within, repeat=3):
            edges = []
            for e in system.edges:
                image = [0, 0, 0]
                for i in range(3):
                    image[sigma[i]] = pis[i][e[i]]
                edges.append(tuple(image))
            image_system = OctahedralSystem(SHAPE, frozenset(edges))
            seen.setdefault(image_system.mask, image_system)
    return list(seen.values())


@dataclass(frozen=True)
class RealizabilityVerdict:
    realizable: bool
    types_examined: int
    witness: Optional[CircularType] = None
    matched: Optional[OctahedralSystem] = None
    hull_condition: Optional[bool] = None
    up_to_iso: bool = False

    def to_dict(self) -> dict:
        data = {
            "realizable": self.realizable,
            "types_examined": self.types_examined,
            "up_to_iso": self.up_to_iso,
        }
        if self.witness is not None:
            data["witness"] = self.witness.to_dict()
            data["hull_condition"] = self.hull_condition
            data["matched"] = self.matched.to_instance()
        return data


def is_realizable_2d(system: OctahedralSystem, up_to_iso: bool = False, workers: int = 1) -> RealizabilityVerdict:
    """
    Decide whether the system is the set of colourful triangles containing
    the origin for some planar configuration, by exhausting circular types
    with point 0 fixed at position 0. With up_to_iso any relabeling of the
    system may be matched.
    """
    if system.shape.sizes != SHAPE.sizes:
        raise ShapeError(f"realizability is decided for shape {SHAPE} only, got {system.shape}")
    targets = relabelings(system) if up_to_iso else [system]
    examined = 0
    for target in targets:
        witness, nodes = _search(target.mask, workers)
        examined += nodes
        if witness is not None:
            cfg = witness_config(witness)
            reproduced = depth_system(cfg).system
            if reproduced.mask != target.mask:
                raise RuntimeError(f"witness {witness.positions} does not reproduce the system")
            logger.info("realizable", edges=len(target), types_examined=examined)
            return RealizabilityVerdict(True, examined, witness, target, all(cfg.hull_flags()), up_to_iso)
    logger.info("not realizable", edges=len(system), targets=len(targets), types_examined=examined)
    return RealizabilityVerdict(False, examined, up_to_iso=up_to_iso)
