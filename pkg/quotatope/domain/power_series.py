# quotatope/domain/power_series.py

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from quotatope.domain.exceptions import InputException, NumericException
from quotatope.domain.mobius import MobiusSieve, mobius_sieve, prime_sieve
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)


class IntPowerSeries:
    """
    Truncated power series c_0 + c_1 x + … + c_D x^D with exact integer coefficients.

    Products and reciprocals never look past the degree cap D.
    """

    def __init__(self, coeffs: Sequence[int], degree_cap: Optional[int] = None):
        degree_cap = len(coeffs) - 1 if degree_cap is None else degree_cap
        if degree_cap < 0:
            raise InputException("Degree cap must be nonnegative")
        values = np.zeros(degree_cap + 1, dtype=object)
        for k, c in enumerate(list(coeffs)[:degree_cap + 1]):
            values[k] = int(c)
        self._coeffs = values

    @classmethod
    def one(cls, degree_cap: int) -> "IntPowerSeries":
        return cls([1], degree_cap)

    @property
    def degree_cap(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs.copy()

    def __getitem__(self, k: int) -> int:
        if not 0 <= k <= self.degree_cap:
            raise InputException(f"Coefficient {k} is beyond the degree cap {self.degree_cap}")
        return int(self._coeffs[k])

    def __len__(self) -> int:
        return len(self._coeffs)

    def to_list(self) -> List[int]:
        return [int(c) for c in self._coeffs]

    def truncate(self, degree_cap: int) -> "IntPowerSeries":
        return IntPowerSeries(self._coeffs[:degree_cap + 1], degree_cap)

    def _aligned(self, other: "IntPowerSeries") -> Tuple[np.ndarray, np.ndarray, int]:
        cap = min(self.degree_cap, other.degree_cap)
        return self._coeffs[:cap + 1], other._coeffs[:cap + 1], cap

    def __add__(self, other: "IntPowerSeries") -> "IntPowerSeries":
        a, b, cap = self._aligned(other)
        return IntPowerSeries(a + b, cap)

    def __sub__(self, other: "IntPowerSeries") -> "IntPowerSeries":
        a, b, cap = self._aligned(other)
        return IntPowerSeries(a - b, cap)

    def __neg__(self) -> "IntPowerSeries":
        return IntPowerSeries(-self._coeffs, self.degree_cap)

    def __mul__(self, other: Union["IntPowerSeries", int]) -> "IntPowerSeries":
        if isinstance(other, int):
            return IntPowerSeries(self._coeffs * other, self.degree_cap)
        a, b, cap = self._aligned(other)
        result = np.zeros(cap + 1, dtype=object)
        for k in np.nonzero(a)[0]:
            k = int(k)
            result[k:] += a[k] * b[:cap + 1 - k]
        return IntPowerSeries(result, cap)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntPowerSeries):
            return NotImplemented
        return self.degree_cap == other.degree_cap and self.to_list() == other.to_list()

    def __repr__(self) -> str:
        return f"IntPowerSeries({self.to_list()})"

    def times_one_minus_x_power(self, nu: int, power: int = 1) -> "IntPowerSeries":
        """Multiply by (1 − x^ν)^power."""
        if nu < 1:
            raise InputException("ν must be positive")
        coeffs = self._coeffs.copy()
        cap = self.degree_cap
        if nu <= cap:
            for _ in range(power):
                coeffs[nu:] -= coeffs[:cap + 1 - nu].copy()
        return IntPowerSeries(coeffs, cap)

    def divide_by_one_minus_x_power(self, nu: int, power: int = 1) -> "IntPowerSeries":
        """Multiply by (1 − x^ν)^(−power) = (Σ_t x^{νt})^power."""
        if nu < 1:
            raise InputException("ν must be positive")
        coeffs = self._coeffs.copy()
        cap = self.degree_cap
        for _ in range(power):
            for k in range(nu, cap + 1):
                coeffs[k] += coeffs[k - nu]
        return IntPowerSeries(coeffs, cap)

    def reciprocal(self) -> "IntPowerSeries":
        """1/a to the same degree; the constant term must be ±1."""
        c0 = int(self._coeffs[0])
        if c0 not in (1, -1):
            raise NumericException(f"Constant term {c0} is not a unit over the integers")
        cap = self.degree_cap
        inverse = np.zeros(cap + 1, dtype=object)
        inverse[0] = c0
        for n in range(1, cap + 1):
            # Σ_{k=1}^{n} a_k · inv_{n−k}
            acc = np.dot(self._coeffs[1:n + 1], inverse[n - 1::-1])
            inverse[n] = -c0 * int(acc)
        return IntPowerSeries(inverse, cap)


@dataclass(frozen=True)
class WeightMultiset:
    """
    Nondecreasing positive weights ν_1 ≤ ν_2 ≤ …, listed completely below valid_below.
    """
    nu: Tuple[int, ...]
    valid_below: int

    def __post_init__(self):
        nu = tuple(int(v) for v in self.nu)
        object.__setattr__(self, "nu", nu)
        if not nu:
            raise InputException("A weight multiset needs at least one weight")
        if nu[0] < 1 or any(a > b for a, b in zip(nu, nu[1:])):
            raise InputException("Weights must be nondecreasing positive integers")

    @property
    def nu1(self) -> int:
        return self.nu[0]

    @classmethod
    def of(cls, weights: Sequence[int], valid_below: Optional[int] = None) -> "WeightMultiset":
        ordered = tuple(sorted(weights))
        return cls(ordered, valid_below if valid_below is not None else ordered[-1] + 1)

    @classmethod
    def count(cls, degree: int, copies: int = 1) -> "WeightMultiset":
        """copies of each positive integer up to degree."""
        return cls(tuple(v for v in range(1, degree + 1) for _ in range(copies)), degree + 1)

    @classmethod
    def primes(cls, degree: int) -> "WeightMultiset":
        primes, _ = prime_sieve(max(degree, 2))
        return cls(tuple(int(p) for p in primes), degree + 1)

    def multiplicities(self, degree: int) -> List[Tuple[int, int]]:
        counts = {}
        for v in self.nu:
            if v <= degree:
                counts[v] = counts.get(v, 0) + 1
        return sorted(counts.items())


def product_series(nu: WeightMultiset, D: int) -> IntPowerSeries:
    """∏ (1 − x^{ν_i}) truncated at degree D; factors with ν_i > D are 1."""
    if D < 0:
        raise InputException("Degree must be nonnegative")
    if nu.valid_below <= D:
        raise InputException(f"Weight prefix is complete only below {nu.valid_below}; degree {D} needs every ν ≤ {D}")
    series = IntPowerSeries.one(D)
    for v, m in nu.multiplicities(D):
        series = series.times_one_minus_x_power(v, m)
    return series


def chi_from_product(nu: WeightMultiset, q_max: int) -> np.ndarray:
    """
    χ[q] for 0 ≤ q ≤ q_max from Σ_j χ[j+1] x^j = (1 − ∏(1 − x^{ν_i}))/(1 − x).

    Entries with q ≤ ν_1 are zero (empty complex).
    """
    if q_max < 1:
        raise InputException("q_max must be positive")
    product = product_series(nu, q_max - 1)
    one_minus = -product.coeffs
    one_minus[0] += 1
    chi = np.zeros(q_max + 1, dtype=object)
    chi[1:] = np.cumsum(one_minus)
    return chi


def count_complex_chi(q_max: int, copies: int = 1) -> np.ndarray:
    """Euler characteristics of Count^{(copies)}(q), weights copies of 1, 2, 3, …"""
    return chi_from_product(WeightMultiset.count(q_max, copies), q_max)


def partition_numbers(D: int) -> np.ndarray:
    """p(0..D) as the reciprocal of ∏_{n≥1}(1 − x^n)."""
    if D < 1:
        raise InputException("Degree must be at least 1")
    return product_series(WeightMultiset.count(D), D).reciprocal().coeffs


def tau_values(D: int) -> np.ndarray:
    """Ramanujan τ(0..D) with τ(0) = 0, from x·∏(1 − x^n)^24."""
    if D < 1:
        raise InputException("Degree must be at least 1")
    product = product_series(WeightMultiset.count(D - 1, 24), D - 1) if D > 1 else IntPowerSeries.one(0)
    tau = np.zeros(D + 1, dtype=object)
    tau[1:] = product.coeffs
    return tau


@dataclass(frozen=True)
class LehmerReport:
    q_max: int
    counterexamples: List[int]
    tau: np.ndarray
    chi: np.ndarray


def lehmer_check(q_max: int) -> LehmerReport:
    """
    Quotas m ≥ 2 with χ(Count^{(24)}(m)) = χ(Count^{(24)}(m+1)), for m + 1 ≤ q_max.

    χ[m+1] − χ[m] = −τ(m+1), so the list is empty exactly when τ has no zero in range.
    """
    if q_max < 3:
        raise InputException("q_max must be at least 3")
    logger.info(f"Lehmer check to q = {q_max}")
    chi = count_complex_chi(q_max, copies=24)
    counterexamples = [m for m in range(2, q_max) if chi[m] == chi[m + 1]]
    return LehmerReport(q_max=q_max, counterexamples=counterexamples, tau=tau_values(q_max), chi=chi)


def recover_weights(chi: Sequence[int], degree: Optional[int] = None) -> WeightMultiset:
    """
    Rebuild ν from Euler characteristics χ[0..D+1].

    ∏(1 − x^{ν_i}) = 1 − (1 − x)·Σ_j χ[j+1] x^j; the lowest nonconstant term −m·x^k
    says k occurs m times, and dividing out (1 − x^k)^m exposes the next weight.
    """
    chi = [int(c) for c in chi]
    degree = len(chi) - 2 if degree is None else degree
    if degree < 1 or len(chi) < degree + 2:
        raise InputException("Need χ[0..D+1] with D ≥ 1")
    shifted = chi[1:degree + 2]
    product = [0] * (degree + 1)
    product[0] = 1 - shifted[0]
    for k in range(1, degree + 1):
        product[k] = -(shifted[k] - shifted[k - 1])
    series = IntPowerSeries(product, degree)
    if series[0] != 1:
        raise InputException("χ sequence does not come from a weight system (constant term ≠ 1)")

    weights: List[int] = []
    for k in range(1, degree + 1):
        m = -series[k]
        if m < 0:
            raise InputException(f"Negative multiplicity {m} for weight {k}")
        if m:
            weights.extend([k] * m)
            series = series.divide_by_one_minus_x_power(k, m)
    if not weights:
        raise InputException("No weights up to the given degree")
    return WeightMultiset(tuple(weights), degree + 1)


def euler_product_partial(primes_below: int, s: Union[float, complex], terms: int,
                          sieve: Optional[MobiusSieve] = None) -> Tuple[complex, complex]:
    """
    ∏_{p < primes_below}(1 − p^{−s}) beside Σ_{n ≤ terms} μ(n) n^{−s}.

    Floating point; both approach 1/ζ(s) for Re(s) > 1.
    """
    if terms < 1:
        raise InputException("At least one term is required")
    if np.real(s) <= 1:
        logger.warning(f"Re(s) = {np.real(s)} ≤ 1: partial products need not converge")
    primes, _ = prime_sieve(max(primes_below - 1, 2))
    primes = primes[primes < primes_below].astype(float)
    product = complex(np.prod(1 - np.power(primes, -complex(s)))) if len(primes) else complex(1)
    sieve = sieve if sieve is not None and sieve.n_max >= terms else mobius_sieve(terms)
    n = np.arange(1, terms + 1, dtype=float)
    dirichlet = complex(np.sum(sieve.mu[1:terms + 1] * np.power(n, -complex(s))))
    return product, dirichlet
