# quotatope/domain/divisors.py

from dataclasses import dataclass
from enum import Enum
from math import isqrt
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from quotatope.domain.exceptions import InputException
from quotatope.domain.quota import BouquetSignature, ScalarQuotaSystem
from quotatope.utils.config import get_settings
from quotatope.utils.logger import get_logger
from quotatope.utils.parallel import parallel_map

logger = get_logger(__name__)


class Classification(Enum):
    DEFICIENT = "deficient"
    PERFECT = "perfect"
    ABUNDANT = "abundant"

    @classmethod
    def of(cls, n: int, sigma_proper: int) -> "Classification":
        if sigma_proper < n:
            return cls.DEFICIENT
        if sigma_proper == n:
            return cls.PERFECT
        return cls.ABUNDANT


class Parity(Enum):
    ALL = "all"
    ODD = "odd"
    EVEN = "even"

    def admits(self, n: int) -> bool:
        if self is Parity.ALL:
            return True
        return (n % 2 == 1) == (self is Parity.ODD)


@dataclass(frozen=True)
class DivisorProfile:
    """
    Homotopy data of Div(n), the quota complex on the proper divisors of n with quota n.

    top_dim and perfect_gap are None for a contractible complex; signature is None
    when only the top dimension was requested.
    """
    n: int
    tau: int
    sigma_proper: int
    classification: Classification
    signature: Optional[BouquetSignature]
    top_dim: Optional[int]

    @property
    def is_contractible(self) -> bool:
        return self.top_dim is None

    @property
    def perfect_gap(self) -> Optional[int]:
        if self.top_dim is None:
            return None
        return self.tau - 3 - self.top_dim

    @property
    def is_perfect(self) -> bool:
        return self.classification is Classification.PERFECT


def divisors(n: int) -> List[int]:
    """All positive divisors of n in increasing order, by trial division to √n."""
    if n < 1:
        raise InputException(f"Divisors of {n} are not defined")
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def divisor_sieve(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    τ(n) and σ(n) for 0 ≤ n ≤ n_max (index 0 unused).
    """
    tau = np.zeros(n_max + 1, dtype=np.int64)
    sigma = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        tau[d::d] += 1
        sigma[d::d] += d
    return tau, sigma


def divisor_system(n: int) -> ScalarQuotaSystem:
    """Div(n) as a scalar quota system."""
    if n < 2:
        raise InputException(f"Div(n) needs n ≥ 2, got {n}")
    return ScalarQuotaSystem.of(divisors(n)[:-1], n)


def _reachable(parts: List[int], target: int) -> bool:
    """Whether some subset of parts sums to target exactly (big-int bitset)."""
    if target < 0:
        return False
    mask = (1 << (target + 1)) - 1
    reach = 1
    for p in parts:
        if p <= target:
            reach = (reach | (reach << p)) & mask
    return bool(reach >> target & 1)


def _min_parts(parts: List[int], target: int) -> int:
    """Fewest parts summing to target exactly; parts are distinct."""
    unreachable = len(parts) + 1
    best = np.full(target + 1, unreachable, dtype=np.int64)
    best[0] = 0
    for p in parts:
        if p > target:
            continue
        best[p:] = np.minimum(best[p:], best[:target + 1 - p] + 1)
    return int(best[target])


def _subset_counts_by_size(parts: List[int], target: int) -> Dict[int, int]:
    """Number of subsets of each size summing exactly to target."""
    dtype = np.int64 if len(parts) < 62 else object
    table = np.zeros((len(parts) + 1, target + 1), dtype=dtype)
    table[0, 0] = 1
    for p in parts:
        if p > target:
            continue
        table[1:, p:] += table[:-1, :target + 1 - p].copy()
    return {k: int(c) for k, c in enumerate(table[:, target]) if c}


def divisor_profile(n: int, with_signature: bool = True, divisor_list: Optional[List[int]] = None) -> DivisorProfile:
    """
    Classify n and read the bouquet of Div(n).

    A j-sphere corresponds to j+1 distinct non-unit proper divisors summing to n−1.
    Their complement among the c non-unit proper divisors sums to the abundance
    σ(n) − 2n, which is the smaller target for the counting table.

    Args:
        n: Integer ≥ 2
        with_signature: Count spheres in every dimension; otherwise only the top one
        divisor_list: Precomputed divisors of n
    """
    if n < 2:
        raise InputException(f"Div(n) needs n ≥ 2, got {n}")
    all_divisors = divisor_list or divisors(n)
    tau = len(all_divisors)
    proper = all_divisors[:-1]
    sigma_proper = sum(proper)
    classification = Classification.of(n, sigma_proper)
    parts = proper[1:]
    c = len(parts)
    abundance = sigma_proper - n

    use_complement = 0 <= abundance <= n - 1
    target = abundance if use_complement else n - 1

    if abundance < 0 or not _reachable(parts, target):
        empty = BouquetSignature.from_counts({}) if with_signature else None
        return DivisorProfile(n, tau, sigma_proper, classification, empty, None)

    signature = None
    if with_signature:
        cells = (c + 1) * (target + 1)
        if cells > get_settings().dp_cell_limit:
            logger.warning(f"Div({n}) counting table has {cells} cells; computing the top dimension only")
        else:
            by_size = _subset_counts_by_size(parts, target)
            if use_complement:
                signature = BouquetSignature.from_counts({c - k - 1: m for k, m in by_size.items()})
            else:
                signature = BouquetSignature.from_counts({k - 1: m for k, m in by_size.items()})

    if signature is not None:
        top_dim = signature.top_dimension
    elif use_complement:
        top_dim = c - _min_parts(parts, target) - 1
    else:
        # largest subset summing to n − 1: complement of the fewest parts summing to c_total − (n − 1)
        top_dim = c - _min_parts(parts, sum(parts) - target) - 1
    return DivisorProfile(n, tau, sigma_proper, classification, signature, top_dim)


def classify_range(n_lo: int, n_hi: int) -> Iterator[Tuple[int, int, Classification]]:
    """(n, τ(n), classification) for n_lo ≤ n < n_hi from a divisor-sum sieve."""
    if n_lo < 2 or n_hi <= n_lo:
        raise InputException(f"Invalid range [{n_lo}, {n_hi})")
    tau, sigma = divisor_sieve(n_hi - 1)
    for n in range(n_lo, n_hi):
        yield n, int(tau[n]), Classification.of(n, int(sigma[n]) - n)


def perfect_scan(n_lo: int, n_hi: int, parity: Parity = Parity.ALL, with_signature: bool = True,
                 workers: Optional[int] = None) -> Iterator[DivisorProfile]:
    """
    Profiles of every n_lo ≤ n < n_hi with non-contractible Div(n), in increasing n.

    Deficient n are skipped from the σ sieve; the rest are tested by exact subset sums.
    """
    if n_lo < 2 or n_hi <= n_lo:
        raise InputException(f"Invalid range [{n_lo}, {n_hi})")
    logger.info(f"Scanning Div(n) for {n_lo} ≤ n < {n_hi} ({parity.value})")
    _, sigma = divisor_sieve(n_hi - 1)
    n_values = np.arange(n_lo, n_hi)
    candidates = [int(n) for n in n_values[sigma[n_lo:n_hi] >= 2 * n_values] if parity.admits(int(n))]
    logger.debug(f"{len(candidates)} candidates are perfect or abundant")

    chunk = 2048
    found = 0
    for start in range(0, len(candidates), chunk):
        block = candidates[start:start + chunk]
        profiles = parallel_map(lambda n: divisor_profile(n, with_signature=with_signature), block, workers)
        for profile in profiles:
            if not profile.is_contractible:
                found += 1
                yield profile
    logger.info(f"Scan finished: {found} non-contractible divisor complexes")


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, isqrt(n) + 1))


def mersenne_perfect_numbers(limit: int) -> List[Tuple[int, int]]:
    """(p, 2^{p−1}(2^p − 1)) for Mersenne primes 2^p − 1 whose perfect number is below limit."""
    found = []
    p = 2
    while (1 << (p - 1)) * ((1 << p) - 1) < limit:
        if _is_prime(p) and _is_prime((1 << p) - 1):
            found.append((p, (1 << (p - 1)) * ((1 << p) - 1)))
        p += 1
    return found
