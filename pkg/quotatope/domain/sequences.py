# quotatope/domain/sequences.py

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from quotatope.domain.exceptions import InputException
from quotatope.domain.mobius import prime_sieve
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)


class SequenceKind(Enum):
    PRIMES = "primes"
    SQUARES = "squares"
    CUBES = "cubes"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SequenceSpec:
    """
    A finite prefix of an increasing sequence of positive integers.

    complete_below: every member of the sequence smaller than this bound is listed.
    """
    kind: SequenceKind
    elements: Tuple[int, ...]
    complete_below: int

    def __post_init__(self):
        elements = tuple(int(e) for e in self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise InputException("A sequence needs at least one element")
        if elements[0] <= 0 or any(a >= b for a, b in zip(elements, elements[1:])):
            raise InputException("Sequence elements must be strictly increasing positive integers")

    @property
    def v1(self) -> int:
        return self.elements[0]

    @classmethod
    def primes(cls, bound: int) -> "SequenceSpec":
        """All primes below bound."""
        primes, _ = prime_sieve(max(bound - 1, 2))
        return cls(SequenceKind.PRIMES, tuple(int(p) for p in primes if p < bound), bound)

    @classmethod
    def squares(cls, bound: int) -> "SequenceSpec":
        return cls(SequenceKind.SQUARES, tuple(k * k for k in range(1, isqrt(max(bound - 1, 1)) + 1)), bound)

    @classmethod
    def cubes(cls, bound: int) -> "SequenceSpec":
        top = 1
        while (top + 1) ** 3 < bound:
            top += 1
        return cls(SequenceKind.CUBES, tuple(k ** 3 for k in range(1, top + 1)), bound)

    @classmethod
    def custom(cls, elements: Sequence[int], complete_below: Optional[int] = None) -> "SequenceSpec":
        elements = tuple(sorted(elements))
        if not elements:
            raise InputException("A sequence needs at least one element")
        return cls(SequenceKind.CUSTOM, elements, complete_below if complete_below is not None else elements[-1] + 1)

    @classmethod
    def first_terms(cls, kind: SequenceKind, count: int) -> "SequenceSpec":
        """v1 followed by the first `count` further members."""
        if kind is SequenceKind.PRIMES:
            bound = 16
            while True:
                spec = cls.primes(bound)
                if len(spec.elements) > count + 1:
                    break
                bound *= 2
            elements = spec.elements[:count + 1]
            return cls(kind, elements, spec.elements[count + 1])
        if kind not in (SequenceKind.SQUARES, SequenceKind.CUBES):
            raise InputException(f"first_terms does not apply to {kind.value}")
        power = 2 if kind is SequenceKind.SQUARES else 3
        elements = tuple(k ** power for k in range(1, count + 2))
        return cls(kind, elements, (count + 2) ** power)

    @classmethod
    def build(cls, kind: SequenceKind, bound: int) -> "SequenceSpec":
        builders = {
            SequenceKind.PRIMES: cls.primes,
            SequenceKind.SQUARES: cls.squares,
            SequenceKind.CUBES: cls.cubes,
        }
        if kind not in builders:
            raise InputException(f"No generator for sequence kind {kind.value}")
        return builders[kind](bound)


@dataclass(frozen=True, eq=False)
class FaceCountTable:
    """s[i][q]: (i+1)-subsets of V∖{v1} with sum < q, for 0 ≤ q ≤ q_max (rows i, columns q)."""
    s: np.ndarray
    i_max: int
    q_max: int
    v1: int
    truncation_valid_q: int

    def value(self, i: int, q: int) -> int:
        if not 0 <= i <= self.i_max:
            raise InputException(f"Dimension {i} outside 0..{self.i_max}")
        if q < 0:
            return 0
        if q > self.q_max:
            raise InputException(f"Quota {q} beyond the table bound {self.q_max}")
        return int(self.s[i, q])


@dataclass(frozen=True, eq=False)
class HomologyTable:
    """h[i][q] = s[i][q] − s[i][q − v1]; columns below v1 are zero."""
    h: np.ndarray
    i_max: int
    q_max: int
    v1: int

    def value(self, i: int, q: int) -> int:
        if not 0 <= i <= self.i_max or not 0 <= q <= self.q_max:
            raise InputException(f"(i={i}, q={q}) outside the homology table")
        return int(self.h[i, q])


@dataclass(frozen=True, eq=False)
class RatioSeries:
    """S_i, H_i keyed by (i, q) with None where undefined; running averages indexed [i, q]."""
    S: Dict[Tuple[int, int], Optional[Fraction]]
    H: Dict[Tuple[int, int], Optional[Fraction]]
    S_ave: np.ndarray
    H_ave: np.ndarray
    i_max: int
    q_max: int


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    points: int


def _exact_sum_table(elements: Sequence[int], i_max: int, q_max: int) -> np.ndarray:
    """Row k counts k-subsets with each exact sum σ < q_max."""
    dtype = np.int64 if len(elements) < 62 else object
    table = np.zeros((i_max + 2, q_max), dtype=dtype)
    table[0, 0] = 1
    for e in elements:
        if e >= q_max:
            break
        table[1:, e:] += table[:-1, :q_max - e].copy()
    return table


def count_table(spec: SequenceSpec, q_max: int, i_max: int) -> FaceCountTable:
    """
    Exact s_i(q) for 0 ≤ i ≤ i_max and all q ≤ q_max.

    One pass per element over a (cardinality × exact sum) table; "< q" counts are
    its prefix sums, so one table serves every quota at once.
    """
    if q_max <= spec.v1:
        raise InputException(f"q_max must exceed v1 = {spec.v1}")
    if i_max < 0:
        raise InputException("i_max must be nonnegative")
    if spec.complete_below < q_max:
        raise InputException(
            f"Sequence prefix is complete only below {spec.complete_below}; "
            f"q_max = {q_max} needs every member below {q_max}"
        )
    logger.info(f"Counting {spec.kind.value} faces up to q={q_max}, i={i_max}")
    exact = _exact_sum_table(spec.elements[1:], i_max, q_max)
    # s[i][q] = Σ_{σ<q} exact[i+1][σ]
    dtype = exact.dtype
    s = np.zeros((i_max + 1, q_max + 1), dtype=dtype)
    s[:, 1:] = np.cumsum(exact[1:, :], axis=1)
    return FaceCountTable(s=s, i_max=i_max, q_max=q_max, v1=spec.v1, truncation_valid_q=q_max)


def homology_table(t: FaceCountTable, v1: Optional[int] = None) -> HomologyTable:
    """Reduced homology dimensions h_i(q) = s_i(q) − s_i(q − v1)."""
    v1 = t.v1 if v1 is None else v1
    if v1 <= 0 or v1 > t.q_max:
        raise InputException(f"v1 = {v1} does not fit the table range 0..{t.q_max}")
    h = np.zeros_like(t.s)
    h[:, v1:] = t.s[:, v1:] - t.s[:, :t.q_max + 1 - v1]
    return HomologyTable(h=h, i_max=t.i_max, q_max=t.q_max, v1=v1)


def ratio_series(s: FaceCountTable, h: HomologyTable) -> RatioSeries:
    """
    Exact fractions S_i(q), H_i(q) and the running means (1/q) Σ_{k≤q} of each.

    Absent ratios count as zero in the means, which are kept in floating point.
    """
    if s.s.shape != h.h.shape:
        raise InputException("Face-count and homology tables are not aligned")
    S: Dict[Tuple[int, int], Optional[Fraction]] = {}
    H: Dict[Tuple[int, int], Optional[Fraction]] = {}
    S_float = np.zeros(s.s.shape)
    H_float = np.zeros(h.h.shape)
    for q in range(1, s.q_max + 1):
        s_total = int(s.s[:, q].sum())
        h_total = int(h.h[:, q].sum())
        for i in range(s.i_max + 1):
            S[i, q] = Fraction(int(s.s[i, q]), s_total) if s_total else None
            H[i, q] = Fraction(int(h.h[i, q]), h_total) if h_total else None
            S_float[i, q] = float(S[i, q] or 0)
            H_float[i, q] = float(H[i, q] or 0)
    counts = np.arange(s.q_max + 1, dtype=float)
    counts[0] = 1.0
    S_ave = np.cumsum(S_float, axis=1) / counts
    H_ave = np.cumsum(H_float, axis=1) / counts
    return RatioSeries(S=S, H=H, S_ave=S_ave, H_ave=H_ave, i_max=s.i_max, q_max=s.q_max)


def goldbach_scan(h: HomologyTable, i: int, q_lo: int, q_hi: int) -> List[int]:
    """Quotas in [q_lo, q_hi] where h_i(q) = 0."""
    if not 0 <= i <= h.i_max or q_lo > q_hi or q_lo < 0 or q_hi > h.q_max:
        raise InputException(f"Scan range i={i}, [{q_lo}, {q_hi}] outside the homology table")
    window = h.h[i, q_lo:q_hi + 1]
    return [q_lo + int(k) for k in np.nonzero(window == 0)[0]]


class SlopeTransform(Enum):
    PRIME = "prime"
    SQUARE = "square"
    CUBE = "cube"

    def apply(self, values: np.ndarray, q: np.ndarray, i: int) -> np.ndarray:
        values = values.astype(float)
        if self is SlopeTransform.PRIME:
            return values ** (1.0 / (i + 1)) * np.log(q)
        if self is SlopeTransform.SQUARE:
            return values ** (2.0 / (i + 1))
        return values ** (3.0 / (i + 1))


def slope_fit(s: FaceCountTable, i: int, transform: SlopeTransform, q_hi: Optional[int] = None) -> SlopeFit:
    """Ordinary least squares of the transformed s_i(q) against q over the populated range."""
    q_hi = s.q_max if q_hi is None else min(q_hi, s.q_max)
    q = np.arange(1, q_hi + 1)
    values = np.array([s.s[i, k] for k in q], dtype=float)
    populated = values > 0
    if populated.sum() < 2:
        raise InputException(f"Fewer than two populated points for i={i}")
    x = q[populated].astype(float)
    y = transform.apply(values[populated], x, i)
    (slope, intercept), residuals, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(residuals[0]) if len(residuals) else 0.0
    return SlopeFit(slope=float(slope), intercept=float(intercept), residual=residual, points=int(populated.sum()))


def sandwich_bounds(t: FaceCountTable, i: int, q: int) -> Tuple[int, int]:
    """(C(s_0(⌈q/(i+1)⌉), i+1), C(s_0(q), i+1)), which bracket s_i(q)."""
    lower_q = -(-q // (i + 1))
    return comb(t.value(0, lower_q), i + 1), comb(t.value(0, q), i + 1)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def distinct_representations(target: int, parts: Sequence[int], size: int) -> int:
    """Number of ways to write target as a sum of `size` distinct members of parts."""
    parts = sorted(p for p in parts if 0 < p <= target)
    table = np.zeros((size + 1, target + 1), dtype=object)
    table[0, 0] = 1
    for p in parts:
        table[1:, p:] += table[:-1, :target + 1 - p].copy()
    return int(table[size, target])


@dataclass(frozen=True)
class Connectivity:
    q: int
    connected: bool
    simply_connected_components: bool


def odd_even_targets(q: int) -> Tuple[int, int]:
    """(O, E): the odd and the even integer of [q − 2, q)."""
    return (q - 1, q - 2) if q % 2 == 0 else (q - 2, q - 1)


def prime_connectivity(q: int) -> Connectivity:
    """
    Prime(q), q ≥ 6, with O and E the odd and even integers of [q − 2, q):
    disconnected iff O is prime; some component fails to be simply connected
    iff E is a sum of two distinct odd primes.
    """
    if q < 6:
        raise InputException("Connectivity criteria apply for q ≥ 6")
    odd, even = odd_even_targets(q)
    odd_primes = [p for p in range(3, q) if _is_prime(p)]
    return Connectivity(
        q=q,
        connected=not _is_prime(odd),
        simply_connected_components=distinct_representations(even, odd_primes, 2) == 0,
    )


def twin_prime_quotas(q_lo: int, q_hi: int) -> List[int]:
    """Even quotas q in range with Prime(q) and Prime(q + 2) both disconnected, i.e. q ± 1 twin primes."""
    start = max(q_lo, 6)
    start += start % 2
    return [
        q for q in range(start, q_hi + 1, 2)
        if not prime_connectivity(q).connected and not prime_connectivity(q + 2).connected
    ]


def square_connectivity(q: int) -> Connectivity:
    """
    Square(q), q ≥ 3: connected iff q − 1 is not a square; simply connected iff
    q − 1 is neither a square nor a sum of two distinct squares > 1.
    """
    if q < 3:
        raise InputException("Connectivity criteria apply for q ≥ 3")
    root = isqrt(q - 1)
    is_square = root * root == q - 1
    squares = [k * k for k in range(2, root + 1)]
    two = distinct_representations(q - 1, squares, 2) > 0
    return Connectivity(q=q, connected=not is_square, simply_connected_components=not (is_square or two))
