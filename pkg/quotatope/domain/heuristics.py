# quotatope/domain/heuristics.py

from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import ceil, factorial, log
from typing import List, Optional, Union

import numpy as np
from scipy.optimize import bisect, brentq

from quotatope.domain.exceptions import InputException, NumericException
from quotatope.domain.sequences import SequenceKind, SequenceSpec
from quotatope.utils.config import get_settings
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)

LN2 = log(2.0)


class InterpolatingFunction(ABC):
    """Smooth increasing proxy f for the vertex count s_0(q), defined on [κ, ∞)."""

    kappa: float

    @abstractmethod
    def __call__(self, x):
        pass

    @abstractmethod
    def inverse(self, j: float) -> float:
        """The point x_j ≥ κ with f(x_j) = j."""
        pass

    @property
    def k_prime(self) -> int:
        """Smallest positive integer k′ with f(κ) ≤ k′."""
        return max(1, ceil(float(self(self.kappa)) - 1e-12))


class PrimeInterpolation(InterpolatingFunction):
    kappa = 3.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x / np.log(x)

    def inverse(self, j: float) -> float:
        if j < float(self(self.kappa)):
            raise NumericException(f"f(x) = {j} has no solution on [{self.kappa}, ∞)")
        hi = max(2 * self.kappa, 2 * j * log(max(j, 2.0)))
        while float(self(hi)) < j:
            hi *= 2
        return float(brentq(lambda x: float(self(x)) - j, self.kappa, hi, xtol=1e-12))


class PowerInterpolation(InterpolatingFunction):
    """f(x) = x^{1/power}."""
    kappa = 1.0

    def __init__(self, power: int):
        self.power = power

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** (1.0 / self.power)

    def inverse(self, j: float) -> float:
        if j < 1:
            raise NumericException(f"f(x) = {j} has no solution on [{self.kappa}, ∞)")
        return float(j) ** self.power


class InterpolationFactory:
    @staticmethod
    def create(kind: SequenceKind) -> InterpolatingFunction:
        if kind is SequenceKind.PRIMES:
            return PrimeInterpolation()
        if kind is SequenceKind.SQUARES:
            return PowerInterpolation(2)
        if kind is SequenceKind.CUBES:
            return PowerInterpolation(3)
        raise InputException(f"No interpolating function for {kind.value} sequences")


def generalized_binomial(y, k: int):
    """y(y−1)…(y−k+1)/k! evaluated elementwise for real y."""
    y = np.asarray(y, dtype=float)
    product = np.ones_like(y)
    for j in range(k):
        product = product * (y - j)
    return product / factorial(k)


@dataclass(frozen=True)
class CriticalPoint:
    i: int
    lower: float
    m: float
    upper: float
    peak: float
    # Σ_{j=i+1}^{2i+1} 1/j and Σ_{j=i+2}^{2i+2} 1/j, which straddle ln 2
    a: float
    b: float

    @property
    def bracketed(self) -> bool:
        return self.lower < self.m < self.upper


@dataclass
class HeuristicProfile:
    """
    Ŝ_i(x) = C(f(x), i+1)/2^{f(x)} for one interpolating function, with its critical points.
    """
    kind: SequenceKind
    f: InterpolatingFunction
    critical_points: List[CriticalPoint]

    @property
    def kappa(self) -> float:
        return self.f.kappa

    @property
    def k_prime(self) -> int:
        return self.f.k_prime

    def x(self, j: int) -> float:
        return self.f.inverse(j)

    def s_hat(self, i: int, x):
        return generalized_binomial(self.f(x), i + 1)

    def S_hat(self, i: int, x):
        y = self.f(x)
        return generalized_binomial(y, i + 1) / np.power(2.0, y)

    def S_high(self, i: int, x):
        x = np.asarray(x, dtype=float)
        return self.s_hat(i, x) / np.power(2.0, self.f(x / (i + 1)))

    def S_low(self, i: int, x):
        x = np.asarray(x, dtype=float)
        return self.s_hat(i, x / (i + 1)) / np.power(2.0, self.f(x))

    def derivative_factor(self, i: int, x: float) -> float:
        """Σ_{j=0}^{i} 1/(f(x) − j) − ln 2, the sign of Ŝ_i′ for f(x) > i."""
        y = float(self.f(x))
        return sum(1.0 / (y - j) for j in range(i + 1)) - LN2


def critical_point(profile: HeuristicProfile, i: int, xtol: Optional[float] = None) -> CriticalPoint:
    """Locate the maximum m_i of Ŝ_i by bisection on [x_{2i+1}, x_{2i+2}]."""
    if i < profile.k_prime:
        raise InputException(f"Critical points are located for i ≥ k′ = {profile.k_prime}")
    xtol = xtol or get_settings().critical_point_xtol
    lower, upper = profile.x(2 * i + 1), profile.x(2 * i + 2)
    g_lo, g_hi = profile.derivative_factor(i, lower), profile.derivative_factor(i, upper)
    if not (g_lo > 0 > g_hi):
        raise NumericException(
            f"Ŝ_{i}′ is not bracketed on [{lower}, {upper}]: factor {g_lo} at the left, {g_hi} at the right"
        )
    m = float(bisect(lambda x: profile.derivative_factor(i, x), lower, upper, xtol=xtol))
    return CriticalPoint(
        i=i,
        lower=lower,
        m=m,
        upper=upper,
        peak=float(profile.S_hat(i, m)),
        a=sum(1.0 / j for j in range(i + 1, 2 * i + 2)),
        b=sum(1.0 / j for j in range(i + 2, 2 * i + 3)),
    )


def heuristic_profile(kind: Union[SequenceKind, SequenceSpec], i_max: int, i_min: Optional[int] = None) -> HeuristicProfile:
    """
    Interpolating function for a sequence kind and the critical points m_i for
    k′ ≤ i ≤ i_max (or from i_min when given).
    """
    if isinstance(kind, SequenceSpec):
        kind = kind.kind
    f = InterpolationFactory.create(kind)
    profile = HeuristicProfile(kind=kind, f=f, critical_points=[])
    start = f.k_prime if i_min is None else max(i_min, f.k_prime)
    if i_max < start:
        raise InputException(f"i_max must be at least {start}")
    logger.debug(f"Locating critical points of Ŝ_i for {kind.value}, i = {start}..{i_max}")
    profile.critical_points = [critical_point(profile, i) for i in range(start, i_max + 1)]
    return profile
