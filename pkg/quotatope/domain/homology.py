# quotatope/domain/homology.py

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Tuple
import csv

import numpy as np

from quotatope.domain.exceptions import CapacityException, InputException
from quotatope.domain.quota import Face, ScalarQuotaSystem
from quotatope.utils.config import get_settings
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ExplicitComplex:
    """A finite abstract simplicial complex listed face by face."""
    faces: FrozenSet[Tuple[int, ...]]
    vertex_count: int

    def __post_init__(self):
        faces = frozenset(tuple(sorted(f)) for f in self.faces)
        object.__setattr__(self, "faces", faces)
        for f in faces:
            if not f or f[-1] >= self.vertex_count or f[0] < 0:
                raise InputException(f"Face {f} is not on vertices 0..{self.vertex_count - 1}")
            for sub in Face(f).boundary():
                if sub.vertex_indices not in faces:
                    raise InputException(f"Complex is not closed under subfaces: {sub.vertex_indices} of {f}")

    @classmethod
    def from_facets(cls, facets: Iterable[Face], vertex_count: int) -> "ExplicitComplex":
        faces = set()
        for facet in facets:
            faces.update(sub.vertex_indices for sub in facet.subfaces())
        return cls(frozenset(faces), vertex_count)

    @property
    def is_empty(self) -> bool:
        return not self.faces

    @property
    def dimension(self) -> int:
        return max((len(f) - 1 for f in self.faces), default=-1)

    def faces_of_dimension(self, d: int) -> List[Tuple[int, ...]]:
        return sorted(f for f in self.faces if len(f) == d + 1)

    def face_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for f in self.faces:
            counts[len(f) - 1] = counts.get(len(f) - 1, 0) + 1
        return dict(sorted(counts.items()))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * c for d, c in self.face_counts().items())


@dataclass(frozen=True)
class BettiProfile:
    """Reduced rational Betti numbers by dimension (zeros omitted)."""
    reduced_betti: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        items = self.reduced_betti.items() if isinstance(self.reduced_betti, Mapping) else self.reduced_betti
        object.__setattr__(self, "reduced_betti", tuple(sorted((int(j), int(b)) for j, b in items if b)))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.reduced_betti)

    def __getitem__(self, j: int) -> int:
        return self.as_dict().get(j, 0)

    def euler_characteristic(self) -> int:
        """Euler–Poincaré: χ = 1 + Σ (−1)^j b̄_j for a nonempty complex."""
        return 1 + sum((-1) ** j * b for j, b in self.reduced_betti)


def enumerate_complex(sys: ScalarQuotaSystem) -> ExplicitComplex:
    """Every vertex subset of weight below the quota."""
    limit = get_settings().enumeration_limit
    if sys.vertex_count > limit:
        raise CapacityException(f"{sys.vertex_count} vertices exceed the enumeration limit {limit}")

    order = sorted(range(sys.vertex_count), key=lambda i: sys.weights[i])
    faces = set()
    stack = [((), Fraction(0), 0)]
    while stack:
        members, total, start = stack.pop()
        for pos in range(start, len(order)):
            candidate = total + sys.weights[order[pos]]
            if candidate >= sys.quota:
                break
            grown = members + (order[pos],)
            faces.add(tuple(sorted(grown)))
            stack.append((grown, candidate, pos + 1))
    logger.debug(f"Enumerated {len(faces)} faces on {sys.vertex_count} vertices")
    return ExplicitComplex(frozenset(faces), sys.vertex_count)


def _boundary_columns(c: ExplicitComplex, d: int, row_index: Dict[Tuple[int, ...], int]) -> List[Dict[int, int]]:
    columns = []
    for f in c.faces_of_dimension(d):
        column = {}
        for k, sub in enumerate(Face(f).boundary()):
            column[row_index[sub.vertex_indices]] = -1 if k % 2 else 1
        columns.append(column)
    return columns


def _reduce_column(column: Dict[int, int], pivots: Dict[int, Dict[int, int]]) -> Dict[int, int]:
    """Fraction-free elimination of a sparse integer column against reduced pivots."""
    while column:
        low = max(column)
        pivot = pivots.get(low)
        if pivot is None:
            return column
        a, b = pivot[low], column[low]
        merged: Dict[int, int] = {}
        for row in column.keys() | pivot.keys():
            value = a * column.get(row, 0) - b * pivot.get(row, 0)
            if value:
                merged[row] = value
        content = 0
        for value in merged.values():
            content = gcd(content, value)
        column = {row: value // content for row, value in merged.items()} if content > 1 else merged
    return column


def boundary_ranks(c: ExplicitComplex) -> Dict[int, int]:
    """
    Rank over ℚ of ∂_d: C_d → C_{d−1} for d ≥ 1, plus the augmentation rank at d = 0.

    Columns are reduced from the top dimension down; a d-face that is the pivot
    row of a reduced (d+1)-column is cleared, since its column must reduce to zero.
    """
    top = c.dimension
    ranks: Dict[int, int] = {0: 1 if not c.is_empty else 0}
    cleared: set = set()
    for d in range(top, 0, -1):
        rows = c.faces_of_dimension(d - 1)
        row_index = {f: i for i, f in enumerate(rows)}
        faces = c.faces_of_dimension(d)
        pivots: Dict[int, Dict[int, int]] = {}
        next_cleared = set()
        for f, column in zip(faces, _boundary_columns(c, d, row_index)):
            if f in cleared:
                continue
            reduced = _reduce_column(column, pivots)
            if reduced:
                low = max(reduced)
                pivots[low] = reduced
                next_cleared.add(rows[low])
        ranks[d] = len(pivots)
        cleared = next_cleared
    return ranks


def betti_numbers(c: ExplicitComplex) -> BettiProfile:
    """Reduced Betti numbers b̄_j = dim C_j − rank ∂_j − rank ∂_{j+1} (augmented complex)."""
    if c.is_empty:
        raise InputException("Betti numbers of the empty complex are not defined here")
    ranks = boundary_ranks(c)
    counts = c.face_counts()
    betti = {
        j: counts.get(j, 0) - ranks.get(j, 0) - ranks.get(j + 1, 0)
        for j in range(c.dimension + 1)
    }
    return BettiProfile(tuple(betti.items()))


def boundary_matrix(c: ExplicitComplex, d: int) -> np.ndarray:
    """Dense ∂_d with rows the (d−1)-faces and columns the d-faces, both sorted."""
    if d < 1:
        raise InputException("Boundary matrices start at d = 1")
    rows = c.faces_of_dimension(d - 1)
    row_index = {f: i for i, f in enumerate(rows)}
    columns = _boundary_columns(c, d, row_index)
    matrix = np.zeros((len(rows), len(columns)), dtype=np.int64)
    for j, column in enumerate(columns):
        for i, value in column.items():
            matrix[i, j] = value
    return matrix


def dump_boundary_csv(c: ExplicitComplex, directory: Path) -> List[Path]:
    """Write every boundary matrix as boundary_<d>.csv with face labels; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for d in range(1, c.dimension + 1):
        path = directory / f"boundary_{d}.csv"
        rows = c.faces_of_dimension(d - 1)
        cols = c.faces_of_dimension(d)
        matrix = boundary_matrix(c, d)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow([""] + ["-".join(map(str, f)) for f in cols])
            for f, row in zip(rows, matrix):
                writer.writerow(["-".join(map(str, f))] + [int(v) for v in row])
        written.append(path)
    logger.debug(f"Dumped {len(written)} boundary matrices to {directory}")
    return written
