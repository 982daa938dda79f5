# quotatope/domain/quota.py

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union
import json

import numpy as np

from quotatope.domain.exceptions import CapacityException, InputException
from quotatope.utils.config import get_settings
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)

Rational = Union[int, Fraction, str]

NOT_APPLICABLE = "not applicable"


def as_rational(value: Rational) -> Fraction:
    """Convert an int, Fraction, float or "p/q" string into an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputException(f"Not a rational weight: {value!r}")
    if isinstance(value, (int, float, str, np.integer, np.floating)):
        try:
            return Fraction(value if not isinstance(value, (np.integer, np.floating)) else value.item())
        except (ValueError, ZeroDivisionError) as e:
            raise InputException(f"Not a rational weight: {value!r}") from e
    raise InputException(f"Not a rational weight: {value!r}")


@dataclass(frozen=True)
class Face:
    """A face given by strictly increasing vertex indices."""
    vertex_indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(int(i) for i in self.vertex_indices)
        object.__setattr__(self, "vertex_indices", indices)
        if not indices:
            raise InputException("A face needs at least one vertex")
        if any(i < 0 for i in indices):
            raise InputException(f"Negative vertex index in {indices}")
        if any(a >= b for a, b in zip(indices, indices[1:])):
            raise InputException(f"Face indices must be strictly increasing: {indices}")

    @classmethod
    def of(cls, *indices: int) -> "Face":
        """Build a face from indices in any order."""
        unique = sorted(set(indices))
        if len(unique) != len(indices):
            raise InputException(f"Repeated vertex in face {indices}")
        return cls(tuple(unique))

    @property
    def dimension(self) -> int:
        return len(self.vertex_indices) - 1

    def boundary(self) -> Iterator["Face"]:
        """Codimension-one faces in the order of the removed vertex."""
        if self.dimension == 0:
            return
        for k in range(len(self.vertex_indices)):
            yield Face(self.vertex_indices[:k] + self.vertex_indices[k + 1:])

    def subfaces(self) -> Iterator["Face"]:
        """Every nonempty subface, including the face itself."""
        for size in range(1, len(self.vertex_indices) + 1):
            for subset in combinations(self.vertex_indices, size):
                yield Face(subset)

    def __len__(self) -> int:
        return len(self.vertex_indices)

    def __iter__(self):
        return iter(self.vertex_indices)


@dataclass(frozen=True)
class ScalarQuotaSystem:
    """Positive rational vertex weights and a quota; the complex is implicit."""
    weights: Tuple[Fraction, ...]
    quota: Fraction

    def __post_init__(self):
        weights = tuple(as_rational(w) for w in self.weights)
        quota = as_rational(self.quota)
        if any(w <= 0 for w in weights):
            raise InputException("Every weight must be positive")
        if quota <= 0:
            raise InputException("The quota must be positive")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "quota", quota)

    @classmethod
    def of(cls, weights: Sequence[Rational], quota: Rational) -> "ScalarQuotaSystem":
        return cls(tuple(weights), quota)

    @property
    def vertex_count(self) -> int:
        return len(self.weights)

    @property
    def min_weight(self) -> Fraction:
        if not self.weights:
            raise InputException("Quota system has no vertices")
        return min(self.weights)

    @property
    def v_min(self) -> int:
        """Smallest index attaining the minimal weight."""
        return self.weights.index(self.min_weight)

    @property
    def is_empty(self) -> bool:
        return not self.weights or self.quota <= self.min_weight

    def to_json(self) -> str:
        return json.dumps({
            "weights": [str(w) for w in self.weights],
            "quota": str(self.quota),
        })

    @classmethod
    def from_json(cls, payload: str) -> "ScalarQuotaSystem":
        try:
            data = json.loads(payload)
            return cls(tuple(data["weights"]), data["quota"])
        except (KeyError, TypeError, json.JSONDecodeError) as e:
            raise InputException(f"Malformed quota system JSON: {e}") from e


@dataclass(frozen=True)
class VectorQuotaSystem:
    """Vector weights of common length s and a quota vector of length s."""
    weights: Tuple[Tuple[Fraction, ...], ...]
    quota: Tuple[Fraction, ...]

    def __post_init__(self):
        quota = tuple(as_rational(q) for q in self.quota)
        weights = tuple(tuple(as_rational(c) for c in w) for w in self.weights)
        if not quota:
            raise InputException("Weight dimension must be at least 1")
        if any(len(w) != len(quota) for w in weights):
            raise InputException("All weight vectors must have the quota's length")
        if any(c <= 0 for c in quota) or any(c <= 0 for w in weights for c in w):
            raise InputException("Every weight and quota coordinate must be positive")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "quota", quota)

    @classmethod
    def of(cls, weights: Sequence[Sequence[Rational]], quota: Sequence[Rational]) -> "VectorQuotaSystem":
        return cls(tuple(tuple(w) for w in weights), tuple(quota))

    @classmethod
    def from_scalar(cls, sys: ScalarQuotaSystem) -> "VectorQuotaSystem":
        return cls(tuple((w,) for w in sys.weights), (sys.quota,))

    @property
    def weight_dimension(self) -> int:
        return len(self.quota)

    @property
    def vertex_count(self) -> int:
        return len(self.weights)

    def to_json(self) -> str:
        return json.dumps({
            "weights": [[str(c) for c in w] for w in self.weights],
            "quota": [str(q) for q in self.quota],
        })

    @classmethod
    def from_json(cls, payload: str) -> "VectorQuotaSystem":
        try:
            data = json.loads(payload)
            return cls.of(data["weights"], data["quota"])
        except (KeyError, TypeError, json.JSONDecodeError) as e:
            raise InputException(f"Malformed quota system JSON: {e}") from e


@dataclass(frozen=True)
class BouquetSignature:
    """Sphere dimension → number of spheres in the bouquet."""
    sphere_counts: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        items = self.sphere_counts.items() if isinstance(self.sphere_counts, Mapping) else self.sphere_counts
        cleaned = tuple(sorted((int(j), int(c)) for j, c in items if c))
        if any(j < 0 or c < 0 for j, c in cleaned):
            raise InputException("Sphere dimensions and counts must be nonnegative")
        object.__setattr__(self, "sphere_counts", cleaned)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "BouquetSignature":
        return cls(tuple(counts.items()))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.sphere_counts)

    def reduced_betti(self, j: int) -> int:
        return self.as_dict().get(j, 0)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.sphere_counts)

    @property
    def is_contractible(self) -> bool:
        return not self.sphere_counts

    @property
    def top_dimension(self) -> Optional[int]:
        return self.sphere_counts[-1][0] if self.sphere_counts else None


class EmptyComplex:
    """Result for a quota at or below every weight: there is no bouquet."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY_COMPLEX"

    def as_dict(self) -> Dict[int, int]:
        return {}


EMPTY_COMPLEX = EmptyComplex()


def _check_face(vertex_count: int, f: Face) -> None:
    if f.vertex_indices[-1] >= vertex_count:
        raise InputException(f"Face {f.vertex_indices} uses an index beyond {vertex_count - 1}")


def face_weight(sys: ScalarQuotaSystem, f: Face) -> Fraction:
    """Exact sum of the face's vertex weights."""
    _check_face(sys.vertex_count, f)
    return sum((sys.weights[i] for i in f.vertex_indices), Fraction(0))


def is_face(sys: ScalarQuotaSystem, f: Face) -> bool:
    return face_weight(sys, f) < sys.quota


def _resolve_v_min(sys: ScalarQuotaSystem, v_min: Optional[int]) -> int:
    if not sys.weights:
        raise InputException("Quota system has no vertices")
    if v_min is None:
        return sys.v_min
    if not 0 <= v_min < sys.vertex_count or sys.weights[v_min] != sys.min_weight:
        raise InputException(f"Vertex {v_min} does not have minimal weight")
    return v_min


def is_shell_face(sys: ScalarQuotaSystem, f: Face, v_min: Optional[int] = None) -> bool:
    """True iff f avoids v_min and q − w(v_min) ≤ w(f) < q."""
    v = _resolve_v_min(sys, v_min)
    if v in f.vertex_indices:
        return False
    weight = face_weight(sys, f)
    return sys.quota - sys.weights[v] <= weight < sys.quota


def _count_subsets_by_size(weights: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Dict[int, int]:
    """Number of nonempty subsets with lo ≤ sum < hi, keyed by subset size."""
    relevant = sorted(w for w in weights if w < hi)
    if not relevant:
        return {}

    max_size = 0
    running = Fraction(0)
    for w in relevant:
        running += w
        if running >= hi:
            break
        max_size += 1
    if max_size == 0:
        return {}

    scale = lcm(*(w.denominator for w in relevant), hi.denominator, lo.denominator)
    scaled_hi = int(hi * scale)
    if (max_size + 1) * scaled_hi <= get_settings().dp_cell_limit:
        return _count_by_table([int(w * scale) for w in relevant], int(lo * scale), scaled_hi, max_size)
    logger.debug(f"Scaled quota {scaled_hi} too large for the table, enumerating {len(relevant)} weights")
    return _count_by_enumeration(relevant, lo, hi)


def _count_by_table(weights: List[int], lo: int, hi: int, max_size: int) -> Dict[int, int]:
    dtype = np.int64 if len(weights) < 62 else object
    table = np.zeros((max_size + 1, hi), dtype=dtype)
    table[0, 0] = 1
    for w in weights:
        table[1:, w:] += table[:-1, :hi - w].copy()
    window = table[1:, max(lo, 0):hi].sum(axis=1)
    return {k + 1: int(c) for k, c in enumerate(window) if c}


def _count_by_enumeration(weights: List[Fraction], lo: Fraction, hi: Fraction) -> Dict[int, int]:
    counts: Dict[int, int] = {}
    # (next index, size, sum)
    stack = [(0, 0, Fraction(0))]
    while stack:
        start, size, total = stack.pop()
        for k in range(start, len(weights)):
            candidate = total + weights[k]
            if candidate >= hi:
                break
            if candidate >= lo:
                counts[size + 1] = counts.get(size + 1, 0) + 1
            stack.append((k + 1, size + 1, candidate))
    return counts


def bouquet_signature(sys: ScalarQuotaSystem, v_min: Optional[int] = None) -> Union[BouquetSignature, EmptyComplex]:
    """
    Homotopy type of X[w:q] as a bouquet: one j-sphere per j-dimensional shell face.

    Args:
        sys: The scalar quota system
        v_min: Optional minimal-weight vertex to collapse; defaults to the smallest such index

    Returns:
        BouquetSignature, or EMPTY_COMPLEX when the quota is at or below every weight
    """
    if sys.is_empty:
        return EMPTY_COMPLEX
    v = _resolve_v_min(sys, v_min)
    others = sys.weights[:v] + sys.weights[v + 1:]
    counts = _count_subsets_by_size(others, sys.quota - sys.weights[v], sys.quota)
    return BouquetSignature.from_counts({size - 1: c for size, c in counts.items()})


def face_counts(sys: ScalarQuotaSystem) -> Dict[int, int]:
    """Number of faces of each dimension."""
    counts = _count_subsets_by_size(sys.weights, Fraction(0), sys.quota)
    return {size - 1: c for size, c in sorted(counts.items())}


def euler_characteristic(sys: ScalarQuotaSystem) -> int:
    """χ = 1 + Σ_j (−1)^j b̄_j; the empty complex has χ = 0."""
    signature = bouquet_signature(sys)
    if signature is EMPTY_COMPLEX:
        return 0
    return 1 + sum((-1) ** j * c for j, c in signature.sphere_counts)


def scalar_category(sys: ScalarQuotaSystem) -> int:
    """Lusternik–Schnirelmann category of a scalar quota complex read off its bouquet."""
    signature = bouquet_signature(sys)
    if signature is EMPTY_COMPLEX:
        raise InputException("Category of the empty complex is undefined")
    counts = signature.as_dict()
    positive = any(j > 0 for j in counts)
    return counts.get(0, 0) + (1 if positive else 0)


def shell_face_counts_batch(samples: np.ndarray, w_min: float, quota: float) -> np.ndarray:
    """
    Shell-face counts for many weight samples at once.

    Each row of samples holds the non-minimal weights of one system whose minimal
    weight is w_min. Column j of the result counts the j-dimensional shell faces.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    trials, n = samples.shape
    limit = get_settings().random.subset_walk_limit
    if n > limit:
        raise CapacityException(f"Batch shell counting walks 2^{n} subsets; limit is 2^{limit}")
    counts = np.zeros((trials, max(n, 1)), dtype=np.int64)
    if quota <= w_min:
        return counts
    lo = quota - w_min
    for mask in range(1, 1 << n):
        members = [k for k in range(n) if mask >> k & 1]
        sums = samples[:, members].sum(axis=1)
        counts[:, len(members) - 1] += (sums >= lo) & (sums < quota)
    return counts


def coordinate_systems(vsys: VectorQuotaSystem) -> List[ScalarQuotaSystem]:
    """The s scalar systems whose complexes union to the vector complex."""
    return [
        ScalarQuotaSystem(tuple(w[j] for w in vsys.weights), vsys.quota[j])
        for j in range(vsys.weight_dimension)
    ]


def is_vector_face(vsys: VectorQuotaSystem, f: Face) -> bool:
    """Below quota in at least one coordinate."""
    _check_face(vsys.vertex_count, f)
    return any(
        sum((vsys.weights[i][j] for i in f.vertex_indices), Fraction(0)) < vsys.quota[j]
        for j in range(vsys.weight_dimension)
    )


def vector_faces(vsys: VectorQuotaSystem) -> List[Face]:
    """Every face of X[ŵ:q̂], enumerated coordinate by coordinate."""
    limit = get_settings().enumeration_limit
    if vsys.vertex_count > limit:
        raise CapacityException(f"{vsys.vertex_count} vertices exceed the enumeration limit {limit}")
    found = set()
    for scalar in coordinate_systems(vsys):
        order = sorted(range(scalar.vertex_count), key=lambda i: scalar.weights[i])
        stack = [((), Fraction(0), 0)]
        while stack:
            members, total, start = stack.pop()
            for pos in range(start, len(order)):
                candidate = total + scalar.weights[order[pos]]
                if candidate >= scalar.quota:
                    break
                grown = members + (order[pos],)
                found.add(tuple(sorted(grown)))
                stack.append((grown, candidate, pos + 1))
    return sorted((Face(f) for f in found), key=lambda f: (f.dimension, f.vertex_indices))


def shell_vertices(vsys: VectorQuotaSystem, strict: bool = False) -> List[int]:
    """
    Vertices lying in the shell of at least one coordinate.

    The left end of the shell interval is inclusive unless strict is set.
    """
    shell = set()
    for scalar in coordinate_systems(vsys):
        if not scalar.weights:
            continue
        v = scalar.v_min
        lo = scalar.quota - scalar.weights[v]
        for i, w in enumerate(scalar.weights):
            if i == v or w >= scalar.quota:
                continue
            if (lo < w) if strict else (lo <= w):
                shell.add(i)
    return sorted(shell)


def category_upper_bound(vsys: VectorQuotaSystem, strict: bool = False) -> Union[int, str]:
    """2s − 1 when there are no shell vertices, otherwise "not applicable"."""
    if shell_vertices(vsys, strict=strict):
        return NOT_APPLICABLE
    return 2 * vsys.weight_dimension - 1


def complex_to_quota(facets: Sequence[Face], vertex_count: int, distinct: bool = False) -> VectorQuotaSystem:
    """
    Vector quota system realizing the complex generated by the given facets.

    Coordinate i gives weight 1 to the vertices of facet F_i, |F_i|+1 to the rest,
    and quota |F_i|+1. With distinct set, vertex k gets k/(n²+1) added in every
    coordinate so that entries sharing a base value become distinct.
    """
    if not facets:
        raise InputException("At least one facet is required")
    if vertex_count < 1:
        raise InputException("vertex_count must be positive")
    facet_sets = []
    for f in facets:
        _check_face(vertex_count, f)
        facet_sets.append(frozenset(f.vertex_indices))
    for a, b in combinations(range(len(facet_sets)), 2):
        if facet_sets[a] <= facet_sets[b] or facet_sets[b] <= facet_sets[a]:
            raise InputException(f"Facets {sorted(facet_sets[a])} and {sorted(facet_sets[b])} are not maximal")

    bump = Fraction(1, vertex_count * vertex_count + 1)
    weights = []
    for v in range(vertex_count):
        offset = v * bump if distinct else Fraction(0)
        weights.append(tuple(
            (Fraction(1) if v in f else Fraction(len(f) + 1)) + offset
            for f in facet_sets
        ))
    quota = tuple(Fraction(len(f) + 1) for f in facet_sets)
    logger.debug(f"Realized {len(facet_sets)} facets on {vertex_count} vertices as a vector quota system")
    return VectorQuotaSystem(tuple(weights), quota)
