"""
Colourful point configurations with exact rational coordinates.

A configuration in dimension d has d+1 colour classes. The colourful
simplices (one point per class) containing the origin form an octahedral
system on the classes.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.config.config import config
from src.geometry.exact import affinely_independent, barycentric_origin, rank, solve
from src.hypergraph.core import ClassShape, OctahedralSystem, PartiteHypergraph
from src.hypergraph.errors import NotGeneralPositionError, SamplingBudgetError, ShapeError
from src.hypergraph.instance_io import ColourConfigFile
from src.search.bounds import MuBracket, mu_lower_bound

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class RationalPoint:
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        if not coords:
            raise ShapeError("A point needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *values) -> "RationalPoint":
        return cls(tuple(values))

    @property
    def d(self) -> int:
        return len(self.coords)

    def scaled(self, factor) -> "RationalPoint":
        return RationalPoint(tuple(c * Fraction(factor) for c in self.coords))

    def __neg__(self) -> "RationalPoint":
        return RationalPoint(tuple(-c for c in self.coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


class Containment(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class ColourConfig:
    """d+1 colour classes of points in dimension d"""
    d: int
    classes: Tuple[Tuple[RationalPoint, ...], ...]

    def __post_init__(self):
        classes = tuple(tuple(p if isinstance(p, RationalPoint) else RationalPoint(tuple(p)) for p in c) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        if self.d < 1:
            raise ShapeError(f"dimension must be positive, got {self.d}")
        if len(classes) != self.d + 1:
            raise ShapeError(f"dimension {self.d} needs {self.d + 1} colour classes, got {len(classes)}")
        for points in classes:
            if not points:
                raise ShapeError("every colour class needs a point")
            for p in points:
                if p.d != self.d:
                    raise ShapeError(f"point {p} is not in dimension {self.d}")

    @property
    def shape(self) -> ClassShape:
        return ClassShape(tuple(len(c) for c in self.classes))

    def hull_flags(self) -> List[bool]:
        """Whether each class contains the origin in its convex hull"""
        return [origin_in_hull(points, self.d) for points in self.classes]

    def replace_point(self, class_index: int, position: int, point: RationalPoint) -> "ColourConfig":
        classes = [list(c) for c in self.classes]
        classes[class_index][position] = point
        return ColourConfig(self.d, tuple(tuple(c) for c in classes))

    @classmethod
    def from_file(cls, data: ColourConfigFile) -> "ColourConfig":
        return cls(data.d, tuple(tuple(RationalPoint(p) for p in points) for points in data.coordinates()))

    def to_file(self) -> ColourConfigFile:
        return ColourConfigFile.from_coordinates(self.d, [[p.coords for p in points] for points in self.classes])


def origin_in_simplex(points: Sequence[RationalPoint]) -> Containment:
    """Position of the origin relative to the simplex of d+1 points in dimension d"""
    points = [p if isinstance(p, RationalPoint) else RationalPoint(tuple(p)) for p in points]
    d = len(points) - 1
    if d < 1 or any(p.d != d for p in points):
        raise ShapeError(f"need d+1 points in dimension d, got {len(points)} points")
    weights = barycentric_origin([p.coords for p in points])
    if weights is None:
        raise NotGeneralPositionError("points are affinely dependent", selection=[str(p) for p in points])
    if any(w < 0 for w in weights):
        return Containment.OUTSIDE
    if any(w == 0 for w in weights):
        return Containment.BOUNDARY
    return Containment.INSIDE


def _origin_in_affine_span(points: Sequence[RationalPoint]) -> Optional[List[Fraction]]:
    """Affine weights of the origin over affinely independent points, or None"""
    s = len(points)
    d = points[0].d
    rows = [[p.coords[k] for p in points] for k in range(d)] + [[Fraction(1)] * s]
    rhs = [Fraction(0)] * d + [Fraction(1)]
    # square subsystem on s independent rows, then check the rest
    chosen: List[int] = []
    for r in range(len(rows)):
        if rank([rows[i] for i in chosen + [r]]) == len(chosen) + 1:
            chosen.append(r)
        if len(chosen) == s:
            break
    if len(chosen) < s:
        return None
    weights = solve([rows[i] for i in chosen], [rhs[i] for i in chosen])
    if weights is None:
        return None
    for row, b in zip(rows, rhs):
        if sum(a * w for a, w in zip(row, weights)) != b:
            return None
    return weights


def origin_in_hull(points: Sequence[RationalPoint], d: int) -> bool:
    """
    Whether the origin lies in the closed convex hull of the points, by
    scanning affinely independent subsets of at most d+1 points.
    """
    points = [p if isinstance(p, RationalPoint) else RationalPoint(tuple(p)) for p in points]
    if not points:
        raise ShapeError("empty point set")
    for size in range(1, min(d + 1, len(points)) + 1):
        for subset in combinations(points, size):
            if not affinely_independent([p.coords for p in subset]):
                continue
            weights = _origin_in_affine_span(list(subset))
            if weights is not None and all(w >= 0 for w in weights):
                return True
    return False


def in_general_position(cfg: ColourConfig) -> bool:
    """Every d points from distinct classes are linearly independent"""
    for classes in combinations(range(cfg.d + 1), cfg.d):
        for selection in product(*(cfg.classes[i] for i in classes)):
            if rank([p.coords for p in selection]) < cfg.d:
                return False
    return True


@dataclass(frozen=True)
class DepthResult:
    system: PartiteHypergraph
    count: int


def depth_system(cfg: ColourConfig) -> DepthResult:
    """
    The hypergraph of colourful simplices strictly containing the origin.
    The origin on the boundary of a colourful simplex is a general position
    failure and raises with the offending selection.
    """
    edges = []
    for selection in product(*(range(len(c)) for c in cfg.classes)):
        points = [cfg.classes[i][p] for i, p in enumerate(selection)]
        try:
            where = origin_in_simplex(points)
        except NotGeneralPositionError:
            raise NotGeneralPositionError("colourful simplex is degenerate", selection=selection)
        if where is Containment.BOUNDARY:
            raise NotGeneralPositionError("origin on a colourful simplex boundary", selection=selection)
        if where is Containment.INSIDE:
            edges.append(selection)
    shape = cfg.shape
    cls = OctahedralSystem if shape.is_octahedral_shape else PartiteHypergraph
    return DepthResult(cls(shape, frozenset(edges)), len(edges))


def _grid_point(rng: np.random.Generator, d: int) -> RationalPoint:
    bound = config.geometry.grid_bound
    denominators = config.geometry.denominator_bound
    while True:
        nums = rng.integers(-bound, bound + 1, size=d)
        dens = rng.integers(1, denominators + 1, size=d)
        if any(nums):
            return RationalPoint(tuple(Fraction(int(a), int(b)) for a, b in zip(nums, dens)))


def _class_around_origin(rng: np.random.Generator, d: int, size: int) -> List[RationalPoint]:
    """d random points plus a negative positive combination of them, then extras, shuffled"""
    points = [_grid_point(rng, d) for _ in range(d)]
    weights = rng.integers(1, config.geometry.grid_bound + 1, size=d)
    closing = tuple(-sum(int(w) * p.coords[k] for w, p in zip(weights, points)) for k in range(d))
    points.append(RationalPoint(closing))
    points.extend(_grid_point(rng, d) for _ in range(size - d - 1))
    order = rng.permutation(len(points))
    return [points[i] for i in order]


def _valid(cfg: ColourConfig, require_hull: bool) -> bool:
    if not in_general_position(cfg):
        return False
    if require_hull and not all(cfg.hull_flags()):
        return False
    try:
        depth_system(cfg)
    except NotGeneralPositionError:
        return False
    return True


def random_config(d: int, sizes: Sequence[int], seed, require_hull: bool = True) -> ColourConfig:
    """
    Sample a configuration in general position, deterministic per seed.
    With require_hull every class contains the origin in its hull.
    """
    if len(sizes) != d + 1:
        raise ShapeError(f"dimension {d} needs {d + 1} class sizes, got {len(sizes)}")
    rng = np.random.default_rng(seed)
    attempts = config.geometry.sampling_attempts
    for _ in range(attempts):
        classes = []
        for size in sizes:
            if require_hull and size >= d + 1:
                classes.append(tuple(_class_around_origin(rng, d, size)))
            else:
                classes.append(tuple(_grid_point(rng, d) for _ in range(size)))
        cfg = ColourConfig(d, tuple(classes))
        if _valid(cfg, require_hull):
            return cfg
    raise SamplingBudgetError(f"no valid configuration for d={d}, sizes={tuple(sizes)} after {attempts} attempts")


@dataclass(frozen=True)
class MuSearchResult:
    d: int
    minimum: int
    best: ColourConfig
    trials: int
    bracket: MuBracket
    history: Tuple[int, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "minimum_found": self.minimum,
            "trials": self.trials,
            "known_bracket": self.bracket.to_dict(),
            "best_config": self.best.to_file().model_dump(),
        }


def mu_search(d: int, trials: int, seed: int, target: Optional[int] = None) -> MuSearchResult:
    """
    Minimise the colourful depth over random configurations with classes of
    size d+1 around the origin. Each trial is followed by single-point
    resampling moves kept only when the depth drops. Stops early once
    `target` is reached. Reports what was found; never claims optimality.
    """
    sizes = (d + 1,) * (d + 1)
    moves = config.geometry.mu_local_moves
    best_cfg: Optional[ColourConfig] = None
    best = None
    history = []
    run = 0
    for trial in range(trials):
        run = trial + 1
        cfg = random_config(d, sizes, seed=[seed, trial])
        count = depth_system(cfg).count
        rng = np.random.default_rng([seed, trial, 1])
        for _ in range(moves):
            i = int(rng.integers(0, d + 1))
            j = int(rng.integers(0, d + 1))
            candidate = cfg.replace_point(i, j, _grid_point(rng, d))
            if not origin_in_hull(candidate.classes[i], d) or not _valid(candidate, require_hull=False):
                continue
            new_count = depth_system(candidate).count
            if new_count < count:
                cfg, count = candidate, new_count
        if best is None or count < best:
            best, best_cfg = count, cfg
            history.append(count)
            logger.info("mu search improved", d=d, trial=trial, depth=count)
        if target is not None and best <= target:
            break
    return MuSearchResult(d, best, best_cfg, run, mu_lower_bound(d), tuple(history))
