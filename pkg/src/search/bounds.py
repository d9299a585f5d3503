"""
Published bounds on the minimum edge count of octahedral systems without
isolated vertex. Formulas with halves are evaluated exactly and floored.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import List, Optional, Sequence, Tuple

from src.hypergraph.core import ClassShape
from src.hypergraph.errors import DomainError

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class BoundTerm:
    """One evaluated bound: exact value, floored value and where it comes from"""
    provenance: str
    exact: Fraction
    value: int

    def to_dict(self) -> dict:
        return {"provenance": self.provenance, "exact": str(self.exact), "value": self.value}


def _term(provenance: str, exact) -> BoundTerm:
    exact = Fraction(exact)
    return BoundTerm(provenance, exact, floor(exact))


def compatible_patterns(shape: ClassShape, min_k: int = 2) -> List[Tuple[int, int]]:
    """
    All (k, z) with min_k <= k <= n and 0 <= z < k such that the ascending
    sizes read z times k-1, then k-z times k, then sizes >= k.
    """
    sizes = sorted(shape.sizes)
    n = len(sizes)
    patterns = []
    for k in range(max(2, min_k), n + 1):
        for z in range(k):
            if (
                all(m == k - 1 for m in sizes[:z])
                and all(m == k for m in sizes[z:k])
                and all(m >= k for m in sizes[k:])
            ):
                patterns.append((k, z))
    return patterns


def kzn_bound_exact(k: int, z: int, n: int, v_nm1: int, v_n: int) -> Fraction:
    if not 2 <= k <= n or not 0 <= z < k:
        raise DomainError(f"need 2 <= k <= n and 0 <= z < k, got k={k}, z={z}, n={n}")
    if k <= n - 2:
        return HALF * k * k + HALF * k - 8 + v_nm1 + v_n - z
    if k == n - 1:
        return HALF * n * n + HALF * n - 10 + v_n - z
    return HALF * n * n + Fraction(5, 2) * n - 11 - z


def kzn_bound(k: int, z: int, n: int, v_nm1: int, v_n: int) -> int:
    """Lower bound for shapes of the (k-1)^z k^(k-z) m_(k+1) .. m_n pattern, floored"""
    return floor(kzn_bound_exact(k, z, n, v_nm1, v_n))


def lower_bound_terms(shape: ClassShape) -> List[BoundTerm]:
    shape.require_octahedral()
    sizes = sorted(shape.sizes)
    n = len(sizes)
    terms = [_term("minimum class size", sizes[0])]
    if n >= 2:
        terms.append(_term("two largest classes", sizes[-1] + sizes[-2] - 2))
    if len(set(sizes)) == 1:
        m = sizes[0]
        if 4 <= m <= n:
            terms.append(_term("equal classes, size at most class count", HALF * m * m + Fraction(5, 2) * m - 11))
        if 4 <= n <= m:
            terms.append(
                _term("equal classes, class count at most size", n * m - HALF * n * n + Fraction(5, 2) * n - 11)
            )
    for k, z in compatible_patterns(shape):
        v_nm1 = sizes[-2] if n >= 2 else sizes[-1]
        terms.append(_term(f"(k,z)=({k},{z}) pattern", kzn_bound_exact(k, z, n, v_nm1, sizes[-1])))
    return terms


def published_lower_bound(shape: ClassShape) -> BoundTerm:
    """Largest applicable published lower bound; earlier terms win ties"""
    best: Optional[BoundTerm] = None
    for term in lower_bound_terms(shape):
        if best is None or term.value > best.value:
            best = term
    return best


def upper_bound_terms(shape: ClassShape) -> List[BoundTerm]:
    shape.require_octahedral()
    terms = [_term("inductive construction", 2 + sum(m - 2 for m in shape.sizes))]
    if shape.n >= 2 and len(set(shape.sizes)) == 1:
        terms.append(_term("square construction", shape.sizes[0] ** 2))
    return terms


@dataclass(frozen=True)
class BoundReport:
    shape: ClassShape
    lower: int
    lower_provenance: str
    upper: int
    upper_provenance: str
    terms: Tuple[BoundTerm, ...] = field(default_factory=tuple)

    def contains(self, value: int) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        return {
            "classes": list(self.shape.sizes),
            "lower": self.lower,
            "lower_provenance": self.lower_provenance,
            "upper": self.upper,
            "upper_provenance": self.upper_provenance,
            "terms": [t.to_dict() for t in self.terms],
        }


def bound_report(shape: ClassShape) -> BoundReport:
    lower_terms = lower_bound_terms(shape)
    upper_terms = upper_bound_terms(shape)
    lower = published_lower_bound(shape)
    upper = min(upper_terms, key=lambda t: t.value)
    return BoundReport(
        shape=shape,
        lower=lower.value,
        lower_provenance=lower.provenance,
        upper=upper.value,
        upper_provenance=upper.provenance,
        terms=tuple(lower_terms + upper_terms),
    )


def even_classes(shape: ClassShape) -> bool:
    """With every class even, every octahedral system has an even edge count"""
    return all(m % 2 == 0 for m in shape.sizes)


@dataclass(frozen=True)
class MuBracket:
    d: int
    lower: int
    upper: int
    provenance: str

    def to_dict(self) -> dict:
        return {"d": self.d, "lower": self.lower, "upper": self.upper, "provenance": self.provenance}


def mu_lower_bound(d: int) -> MuBracket:
    """
    Known bracket for the minimum colourful depth in dimension d: at least 2d,
    at least floor(d^2/2 + 7d/2 - 8) from d = 4 on; at most d^2 + 1.
    """
    if d < 1:
        raise DomainError(f"dimension must be positive, got {d}")
    lower, provenance = 2 * d, "2d"
    if d >= 4:
        strong = floor(HALF * d * d + Fraction(7, 2) * d - 8)
        if strong > lower:
            lower, provenance = strong, "equal classes with m = n = d + 1"
    return MuBracket(d, lower, d * d + 1, provenance)
