# quotatope/domain/mobius.py

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import exp, isqrt, log
from typing import List, Optional, Sequence, Tuple

import numpy as np

from quotatope.domain.exceptions import CapacityException, InputException
from quotatope.utils.config import get_settings
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)


def prime_sieve(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sieve of Eratosthenes.

    Returns:
        (primes ≤ n_max as int64, boolean primality mask of length n_max + 1)
    """
    if n_max < 2:
        return np.array([], dtype=np.int64), np.zeros(max(n_max, 0) + 1, dtype=bool)
    is_prime = np.ones(n_max + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(n_max) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.nonzero(is_prime)[0].astype(np.int64), is_prime


@dataclass(frozen=True, eq=False)
class MobiusSieve:
    """μ(n) for 0 ≤ n ≤ n_max (mu[0] is unused and zero)."""
    mu: np.ndarray
    primes: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.mu) - 1

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise CapacityException(f"μ({n}) is outside the sieve range 1..{self.n_max}")
        return int(self.mu[n])


@dataclass(frozen=True, eq=False)
class MertensSeries:
    """M[N] = Σ_{n≤N} μ(n), with M[0] = 0."""
    M: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.M) - 1

    def __getitem__(self, n: int) -> int:
        if not 0 <= n <= self.n_max:
            raise CapacityException(f"M({n}) is outside the sieve range 0..{self.n_max}")
        return int(self.M[n])


def mobius_sieve(n_max: int) -> MobiusSieve:
    """μ(1..n_max) by flipping signs along prime multiples and zeroing square multiples."""
    if n_max < 1:
        raise InputException("Möbius sieve needs n_max ≥ 1")
    primes, _ = prime_sieve(n_max)
    mu = np.ones(n_max + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes:
        p = int(p)
        mu[p::p] *= -1
        if p * p <= n_max:
            mu[p * p::p * p] = 0
    logger.debug(f"Möbius sieve built to {n_max} with {len(primes)} primes")
    return MobiusSieve(mu=mu, primes=primes)


def mertens(sieve: MobiusSieve) -> MertensSeries:
    return MertensSeries(M=np.cumsum(sieve.mu, dtype=np.int64))


@lru_cache(maxsize=2)
def default_sieve(full_range: bool = False) -> MobiusSieve:
    """Sieve at the configured default bound, or the full bound when full_range is set."""
    config = get_settings().sieve
    bound = config.full_bound if full_range else config.default_bound
    logger.info(f"Building Möbius sieve to {bound}")
    return mobius_sieve(bound)


def _primes_below(q: int, sieve: Optional[MobiusSieve]) -> List[int]:
    if sieve is not None and sieve.n_max >= q:
        return [int(p) for p in sieve.primes if p < q]
    primes, _ = prime_sieve(max(q - 1, 2))
    return [int(p) for p in primes if p < q]


def _chi_prime_dp(primes: Sequence[int], q: int) -> int:
    # signed[σ] = Σ μ(n) over square-free n whose prime factors sum to σ
    signed = np.zeros(q, dtype=object)
    signed[0] = 1
    for p in primes:
        signed[p:] -= signed[:q - p].copy()
    return 1 - int(signed.sum())


def _chi_prime_enumerate(primes: Sequence[int], q: int, sieve: Optional[MobiusSieve]) -> int:
    total = 0
    # (next prime index, prime sum, product, number of factors)
    stack = [(0, 0, 1, 0)]
    while stack:
        start, weight, product, factors = stack.pop()
        for k in range(start, len(primes)):
            grown = weight + primes[k]
            if grown >= q:
                break
            n = product * primes[k]
            if sieve is not None and n <= sieve.n_max:
                total += sieve[n]
            else:
                total += -1 if (factors + 1) % 2 else 1
            stack.append((k + 1, grown, n, factors + 1))
    return -total


def chi_prime(q: int, sieve: Optional[MobiusSieve] = None, method: str = "dp") -> int:
    """
    χ(Prime(q)) = −Σ_{n≥2} μ(n)·L_q(n), where L_q(n) = 1 iff n is square-free with
    prime-divisor sum below q.

    Args:
        q: Integer quota
        sieve: Optional Möbius sieve consulted by the enumerate method
        method: "dp" aggregates μ by prime sum; "enumerate" walks the square-free products
    """
    if q <= 2:
        return 0
    primes = _primes_below(q, sieve)
    if method == "dp":
        return _chi_prime_dp(primes, q)
    if method == "enumerate":
        return _chi_prime_enumerate(primes, q, sieve)
    raise InputException(f"Unknown chi_prime method: {method}")


def chi_prime_sweep(q_max: int, sieve: Optional[MobiusSieve] = None) -> np.ndarray:
    """χ(Prime(q)) for 0 ≤ q ≤ q_max from a single signed table over primes below q_max."""
    if q_max < 1:
        raise InputException("q_max must be positive")
    primes = _primes_below(q_max, sieve)
    signed = np.zeros(q_max, dtype=object)
    signed[0] = 1
    for p in primes:
        signed[p:] -= signed[:q_max - p].copy()
    chi = np.zeros(q_max + 1, dtype=object)
    # primes ≥ q only reach sums ≥ q, so the prefix below q is exact for every q
    chi[1:] = 1 - np.cumsum(signed)
    chi[:3] = 0
    return chi


def logprime_bound(q: float) -> int:
    """Largest integer N with ln N < q."""
    if q <= 0:
        raise InputException("LogPrime quota must be positive")
    n = int(exp(q)) if q < 700 else None
    if n is None:
        raise CapacityException(f"e^{q} is beyond any sieve")
    n = max(n, 1)
    while n > 1 and log(n) >= q:
        n -= 1
    while log(n + 1) < q:
        n += 1
    return n


def chi_logprime(q: float, sieve: MobiusSieve) -> int:
    """χ(LogPrime(q)) = 1 − M(N) where N is the largest integer with ln N < q."""
    n = logprime_bound(q)
    if n > sieve.n_max:
        raise CapacityException(f"LogPrime({q}) needs μ up to {n}; sieve reaches {sieve.n_max}")
    return 1 - int(sieve.mu[:n + 1].sum(dtype=np.int64))


def chi_logprime_many(qs: Sequence[float], sieve: MobiusSieve, series: Optional[MertensSeries] = None) -> np.ndarray:
    """Vectorized chi_logprime over many quotas."""
    qs = np.asarray(qs, dtype=float)
    if np.any(qs <= 0):
        raise InputException("LogPrime quotas must be positive")
    series = series or mertens(sieve)
    if np.max(qs, initial=0.0) > log(series.n_max + 1):
        raise CapacityException(f"Quota {qs.max()} needs μ beyond the sieve bound {series.n_max}")
    n = np.maximum(np.floor(np.exp(qs)).astype(np.int64), 1)
    # floating point may land one off either way
    too_high = (n > 1) & (np.log(n.astype(float)) >= qs)
    n[too_high] -= 1
    too_low = np.log((n + 1).astype(float)) < qs
    n[too_low] += 1
    n = np.minimum(n, series.n_max)
    return 1 - series.M[n]


@dataclass(frozen=True, eq=False)
class RHDiagnostic:
    """
    Scatter of (q, ln|χ(LogPrime(q))|) with the slope-0.55 envelope check.

    The line passes through the first retained sample, or with the calibrated
    anchor sits at the largest residual over the leading calibration share;
    fraction_below counts every retained point on or under the line and
    holdout_fraction_below the points after the anchoring ones.
    """
    q: np.ndarray
    ln_abs_chi: np.ndarray
    skipped_zero: int
    slope: float
    intercept: float
    fraction_below: float
    holdout_fraction_below: float
    anchor: str = "first"


RH_ANCHORS = ("first", "calibrated")


def rh_diagnostic(sieve: MobiusSieve, q_lo: float, q_hi: float, samples: int = 6276,
                  slope: float = 0.55, calibration: float = 0.5, anchor: str = "first") -> RHDiagnostic:
    """
    Sample q uniformly on [q_lo, q_hi] and test ln|1 − M(N)| ≤ slope·q + c.

    Args:
        anchor: "first" puts the line through the first nonzero sample; "calibrated"
            takes c as the largest residual over the leading `calibration` share of
            the samples and reports the rest as the holdout
    """
    if anchor not in RH_ANCHORS:
        raise InputException(f"Unknown anchor: {anchor}. Known anchors: {list(RH_ANCHORS)}")
    if not 0 < q_lo < q_hi:
        raise InputException(f"Invalid diagnostic range [{q_lo}, {q_hi}]")
    if samples < 2:
        raise InputException("At least two samples are required")
    if not 0 < calibration < 1:
        raise InputException("Calibration share must lie strictly between 0 and 1")
    logger.info(f"RH diagnostic over [{q_lo}, {q_hi}] with {samples} samples")
    qs = np.linspace(q_lo, q_hi, samples)
    chi = chi_logprime_many(qs, sieve)
    nonzero = chi != 0
    skipped = int((~nonzero).sum())
    qs, values = qs[nonzero], np.log(np.abs(chi[nonzero]).astype(float))
    if len(qs) < 2:
        raise InputException("Fewer than two samples with nonzero Euler characteristic")

    residual = values - slope * qs
    split = 1 if anchor == "first" else max(1, int(len(qs) * calibration))
    intercept = float(residual[:split].max())
    below = residual <= intercept + 1e-12
    holdout = below[split:]
    logger.info(f"RH diagnostic: {below.mean():.4f} of points under the envelope, {skipped} zeros skipped")
    return RHDiagnostic(
        q=qs,
        ln_abs_chi=values,
        skipped_zero=skipped,
        slope=slope,
        intercept=intercept,
        fraction_below=float(below.mean()),
        holdout_fraction_below=float(holdout.mean()) if len(holdout) else 1.0,
        anchor=anchor,
    )


def mertens_l_series_check(sieve: MobiusSieve, s: int = 2, terms: int = 1000) -> Tuple[Fraction, Fraction]:
    """
    Σ_{n≤terms} μ(n)/n^s beside Σ (M(n) − M(n−1))/n^s with M read off χ(LogPrime).

    Both partial sums are exact rationals and must coincide.
    """
    if terms < 1 or terms + 1 > sieve.n_max:
        raise CapacityException(f"{terms} terms need a sieve beyond {terms + 1}")
    direct = sum((Fraction(int(sieve.mu[n]), n ** s) for n in range(1, terms + 1)), Fraction(0))
    # 1 − χ(LogPrime(ln(n+1))) = M(n); M(0) = 0
    previous = 0
    via_chi = Fraction(0)
    for n in range(1, terms + 1):
        current = 1 - chi_logprime(log(n + 1), sieve)
        via_chi += Fraction(current - previous, n ** s)
        previous = current
    return direct, via_chi
