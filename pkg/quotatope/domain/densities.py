# quotatope/domain/densities.py

from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import ceil, floor
from typing import Dict, Sequence, Tuple, Type

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from quotatope.domain.exceptions import InputException, NumericException
from quotatope.utils.config import get_settings
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)

STEP_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """
    Samples of a function at origin + k·step, k = 0..len(values)−1.

    The origin is stored as an integer multiple of the step so that grids built
    with the same step line up exactly under sums and convolutions.
    """
    offset: int
    step: float
    values: np.ndarray

    def __post_init__(self):
        if self.step <= 0:
            raise InputException("Grid step must be positive")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def origin(self) -> float:
        return self.offset * self.step

    @property
    def points(self) -> np.ndarray:
        return (self.offset + np.arange(len(self.values))) * self.step

    @property
    def support(self) -> Tuple[float, float]:
        return self.origin, (self.offset + len(self.values) - 1) * self.step

    def integral(self) -> float:
        return float(trapezoid(self.values, dx=self.step)) if len(self.values) > 1 else 0.0

    def normalized(self) -> "DensityGrid":
        total = self.integral()
        if total <= 0:
            raise InputException("Density has zero mass on its grid")
        return DensityGrid(self.offset, self.step, self.values / total)

    def half_ends(self) -> "DensityGrid":
        """
        The end samples halved, so a jump to zero at the support boundary carries
        its midpoint value and the plain step·Σ rule integrates it trapezoidally.
        """
        values = self.values.copy()
        values[0] *= 0.5
        values[-1] *= 0.5
        return DensityGrid(self.offset, self.step, values)

    def __call__(self, x):
        return np.interp(x, self.points, self.values, left=0.0, right=0.0)

    def cumulative(self) -> np.ndarray:
        """∫ from the origin up to each grid point."""
        return cumulative_trapezoid(self.values, dx=self.step, initial=0.0)

    def cumulative_at(self, x):
        cumulative = self.cumulative()
        return np.interp(x, self.points, cumulative, left=0.0, right=cumulative[-1])

    def window_integral(self, q, width: float):
        """∫_{q−width}^{q} of the grid function, i.e. its convolution with the indicator of [0, width)."""
        q = np.asarray(q, dtype=float)
        return self.cumulative_at(q) - self.cumulative_at(q - width)

    def _check_step(self, other: "DensityGrid") -> None:
        if abs(self.step - other.step) > STEP_RTOL * max(self.step, other.step):
            raise InputException(f"Grid steps differ: {self.step} vs {other.step}")

    def _combine(self, other: "DensityGrid", sign: float) -> "DensityGrid":
        self._check_step(other)
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self.values), other.offset + len(other.values))
        values = np.zeros(hi - lo)
        values[self.offset - lo:self.offset - lo + len(self.values)] += self.values
        values[other.offset - lo:other.offset - lo + len(other.values)] += sign * other.values
        return DensityGrid(lo, self.step, values)

    def __add__(self, other: "DensityGrid") -> "DensityGrid":
        return self._combine(other, 1.0)

    def __sub__(self, other: "DensityGrid") -> "DensityGrid":
        return self._combine(other, -1.0)

    def __neg__(self) -> "DensityGrid":
        return DensityGrid(self.offset, self.step, -self.values)

    def __mul__(self, scalar: float) -> "DensityGrid":
        return DensityGrid(self.offset, self.step, self.values * scalar)

    __rmul__ = __mul__


def convolve(a: DensityGrid, b: DensityGrid, method: str = "trapezoid") -> DensityGrid:
    """
    (a ⋆ b)(t) = ∫ a(t − x) b(x) dx on the Minkowski sum of the supports.

    "trapezoid" applies the trapezoidal rule on each overlap; "riemann" is the
    plain step·Σ sum, which is exactly associative.
    """
    a._check_step(b)
    step = a.step
    full = np.convolve(a.values, b.values) * step
    if method == "trapezoid":
        k = np.arange(len(full))
        lo = np.maximum(0, k - len(b.values) + 1)
        hi = np.minimum(len(a.values) - 1, k)
        full -= 0.5 * step * (a.values[lo] * b.values[k - lo] + a.values[hi] * b.values[k - hi])
    elif method != "riemann":
        raise InputException(f"Unknown convolution method: {method}")
    return DensityGrid(a.offset + b.offset, step, full)


def delta_grid(at: float, step: float) -> DensityGrid:
    """Unit-mass spike at the grid point nearest to `at`, as a triangle one step wide on each side."""
    center = int(round(at / step))
    return DensityGrid(center - 1, step, np.array([0.0, 1.0 / step, 0.0]))


class DensityKind(ABC):
    """A density family sampled onto a grid."""

    name: str

    def __init__(self, **params):
        self.params = params
        self.validate()

    @abstractmethod
    def validate(self) -> None:
        pass

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        pass

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        pass

    def to_grid(self, step: float) -> DensityGrid:
        """
        Sample onto the grid covering the support and rescale to unit mass.

        Raises:
            NumericException: if the sampled mass is off from 1 by more than the
                configured tolerance, i.e. the density is not normalized or the
                step is too coarse for its support
        """
        lo, hi = self.support
        first = int(floor(lo / step + STEP_RTOL))
        last = int(ceil(hi / step - STEP_RTOL))
        x = (first + np.arange(last - first + 1)) * step
        grid = DensityGrid(first, step, self.evaluate(x))
        mass = grid.integral()
        tolerance = get_settings().random.mass_tolerance
        if abs(mass - 1.0) > tolerance:
            raise NumericException(
                f"{self.name} density has mass {mass:.6g} on a grid of step {step:g}, off from 1 by more than {tolerance:g}"
            )
        return grid.normalized()


class Uniform(DensityKind):
    name = "uniform"

    def validate(self) -> None:
        if set(self.params) != {"a", "b"} or not self.params["a"] < self.params["b"]:
            raise InputException(f"uniform needs parameters a < b, got {self.params}")

    @property
    def support(self) -> Tuple[float, float]:
        return float(self.params["a"]), float(self.params["b"])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        a, b = self.support
        tol = STEP_RTOL * max(1.0, abs(b))
        inside = (x >= a - tol) & (x <= b + tol)
        return np.where(inside, 1.0 / (b - a), 0.0)


class Triangular(DensityKind):
    name = "triangular"

    def validate(self) -> None:
        p = self.params
        if set(p) != {"a", "c", "b"} or not (p["a"] <= p["c"] <= p["b"] and p["a"] < p["b"]):
            raise InputException(f"triangular needs parameters a ≤ c ≤ b with a < b, got {p}")

    @property
    def support(self) -> Tuple[float, float]:
        return float(self.params["a"]), float(self.params["b"])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        a, b = self.support
        c = float(self.params["c"])
        peak = 2.0 / (b - a)
        return np.interp(x, [a, c, b], [0.0 if c > a else peak, peak, 0.0 if c < b else peak], left=0.0, right=0.0)


class PiecewiseLinear(DensityKind):
    name = "table"

    def validate(self) -> None:
        p = self.params
        if set(p) != {"x", "y"}:
            raise InputException(f"table needs parameters x and y, got {sorted(p)}")
        x, y = np.asarray(p["x"], dtype=float), np.asarray(p["y"], dtype=float)
        if len(x) < 2 or len(x) != len(y) or np.any(np.diff(x) <= 0) or np.any(y < 0):
            raise InputException("table needs increasing x and nonnegative y of equal length ≥ 2")

    @property
    def support(self) -> Tuple[float, float]:
        x = self.params["x"]
        return float(x[0]), float(x[-1])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self.params["x"], self.params["y"], left=0.0, right=0.0)


DENSITY_KINDS: Dict[str, Type[DensityKind]] = {
    cls.name: cls for cls in (Uniform, Triangular, PiecewiseLinear)
}


class DensityFactory:
    @staticmethod
    def create(kind: str, params: Dict) -> DensityKind:
        if kind not in DENSITY_KINDS:
            raise InputException(f"Unknown density kind: {kind}. Known kinds: {sorted(DENSITY_KINDS)}")
        return DENSITY_KINDS[kind](**params)


def cumulative_convolution_check(a: DensityGrid, b: DensityGrid, samples: Sequence[float]) -> float:
    """
    Largest gap between F_{a⋆b} and F_a ⋆ b at sample points inside the combined support.

    Both sides are the distribution function of X + Y.
    """
    lhs = convolve(a, b).cumulative_at(samples)
    cumulative_a = DensityGrid(a.offset, a.step, a.cumulative())
    # F_a is 1 past its support; extend it so the convolution sees the plateau
    pad = len(b.values)
    extended = DensityGrid(
        a.offset, a.step, np.concatenate([cumulative_a.values, np.full(pad, cumulative_a.values[-1])])
    )
    rhs = convolve(extended, b)(samples)
    return float(np.max(np.abs(lhs - rhs)))
