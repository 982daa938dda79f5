# quotatope/domain/random_complex.py

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from quotatope.domain.densities import DensityFactory, DensityGrid, DensityKind, convolve
from quotatope.domain.exceptions import CapacityException, InputException
from quotatope.domain.mobius import MobiusSieve, chi_logprime, logprime_bound
from quotatope.domain.quota import shell_face_counts_batch
from quotatope.utils.config import get_settings
from quotatope.utils.logger import get_logger
from quotatope.utils.parallel import parallel_map

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class RandomQuotaSpec:
    """
    X_0 = m fixed and independent X_1..X_N with compactly supported densities on [m, ∞).
    """
    m: float
    densities: Tuple[DensityKind, ...]
    q_grid: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.m <= 0:
            raise InputException("Minimal weight m must be positive")
        if not self.densities:
            raise InputException("At least one random weight is required")
        for k, density in enumerate(self.densities):
            lo, _ = density.support
            if lo < self.m - 1e-12:
                raise InputException(f"Density {k} ({density.name}) starts at {lo}, below m = {self.m}")
        object.__setattr__(self, "densities", tuple(self.densities))
        object.__setattr__(self, "q_grid", tuple(float(q) for q in self.q_grid))

    @classmethod
    def from_descriptors(cls, m: float, descriptors: Sequence[Dict], q_grid: Sequence[float] = ()) -> "RandomQuotaSpec":
        """Build from [{kind, params}, …] descriptors."""
        return cls(m, tuple(DensityFactory.create(d["kind"], d.get("params", {})) for d in descriptors), tuple(q_grid))

    @property
    def size(self) -> int:
        return len(self.densities)

    @property
    def step(self) -> float:
        return get_settings().random.grid_step_factor * self.m

    def grids(self) -> List[DensityGrid]:
        return [d.to_grid(self.step) for d in self.densities]

    def max_support(self) -> float:
        return max(d.support[1] for d in self.densities)


def chain_convolve(a: DensityGrid, b: DensityGrid) -> DensityGrid:
    """
    One step of f_J ⋆ f_k on half-ended grids.

    The plain rule on half-ended factors is the trapezoid rule up to the two corner
    samples, and it stays bilinear under zero padding, so sums of terms with
    different supports convolve exactly like the terms one by one.
    """
    return convolve(a, b, method="riemann")


class SubsetConvolutions:
    """f_J for index sets J, built by extending smaller sets one density at a time."""

    def __init__(self, grids: Sequence[DensityGrid]):
        self.grids = list(grids)
        self.half_ended = [g.half_ends() for g in self.grids]
        self._chains: Dict[FrozenSet[int], DensityGrid] = {}

    def _chain(self, subset: FrozenSet[int]) -> DensityGrid:
        if subset in self._chains:
            return self._chains[subset]
        last = max(subset)
        if len(subset) == 1:
            grid = self.half_ended[last]
        else:
            grid = chain_convolve(self._chain(subset - {last}), self.half_ended[last])
        self._chains[subset] = grid
        return grid

    def __getitem__(self, subset: FrozenSet[int]) -> DensityGrid:
        if len(subset) == 1:
            (k,) = subset
            return self.grids[k]
        return self._chain(subset)


def _check_walk(n: int) -> None:
    limit = get_settings().random.subset_walk_limit
    if n > limit:
        raise CapacityException(f"Walking 2^{n} index sets exceeds the limit 2^{limit}; use the product recursion")


def expected_homology(spec: RandomQuotaSpec, j: int, qs: Sequence[float]) -> np.ndarray:
    """
    E[dim H̄_{j−1}(X[q])] = Σ_{|J|=j} ∫_{q−m}^{q} f_J at each q.
    """
    if not 1 <= j <= spec.size:
        raise InputException(f"j must lie in 1..{spec.size}, got {j}")
    _check_walk(spec.size)
    qs = np.asarray(qs, dtype=float)
    convolutions = SubsetConvolutions(spec.grids())
    total = np.zeros_like(qs)
    for subset in combinations(range(spec.size), j):
        total += convolutions[frozenset(subset)].window_integral(qs, spec.m)
    return total


def _empty_term(qs: np.ndarray, m: float) -> np.ndarray:
    # the empty index set contributes 1 exactly when X[q] is empty, 0 < q ≤ m
    return ((qs > 0) & (qs <= m)).astype(float)


def expected_euler(spec: RandomQuotaSpec, qs: Sequence[float], method: str = "auto") -> np.ndarray:
    """
    1 − E[χ(X[q])] = Σ_{J} (−1)^{|J|} ∫_{q−m}^{q} f_J, the empty set included.

    Args:
        method: "subset" walks every index set, "product" expands ∏(δ − f_i)
            one factor at a time, "auto" walks subsets when allowed
    """
    qs = np.asarray(qs, dtype=float)
    if method == "auto":
        method = "subset" if spec.size <= get_settings().random.subset_walk_limit else "product"
    curve = _empty_term(qs, spec.m)
    grids = spec.grids()
    if method == "subset":
        _check_walk(spec.size)
        convolutions = SubsetConvolutions(grids)
        for size in range(1, spec.size + 1):
            sign = -1.0 if size % 2 else 1.0
            for subset in combinations(range(spec.size), size):
                curve += sign * convolutions[frozenset(subset)].window_integral(qs, spec.m)
        return curve
    if method == "product":
        # ∏(δ − f_i) = δ − Σ f_i + higher; chain is the running product minus δ
        chain: Optional[DensityGrid] = None
        higher: Optional[DensityGrid] = None
        for f in grids:
            curve -= f.window_integral(qs, spec.m)
            half = f.half_ends()
            if chain is None:
                chain = -half
                continue
            term = -chain_convolve(chain, half)
            higher = term if higher is None else higher + term
            chain = chain - half + term
        if higher is not None:
            curve += higher.window_integral(qs, spec.m)
        return curve
    raise InputException(f"Unknown expected_euler method: {method}")


def sample_weights(grid: DensityGrid, rng: np.random.Generator, size: int) -> np.ndarray:
    """Inverse-CDF draws from a density grid."""
    cumulative = grid.cumulative()
    cumulative = cumulative / cumulative[-1]
    rising = np.concatenate([[True], np.diff(cumulative) > 0])
    return np.interp(rng.random(size), cumulative[rising], grid.points[rising])


@dataclass
class MonteCarloResult:
    """
    Per quota: mean and standard error of dim H̄_{j−1} (columns j = 1..N) and of χ.

    max_homology_dimension is the largest j − 1 with a nonzero count in any trial;
    complex_dimension is the largest face size minus one seen in any trial (−1 when
    every sample is empty).
    """
    q: np.ndarray
    trials: int
    seed: int
    homology_mean: np.ndarray
    homology_stderr: np.ndarray
    chi_mean: np.ndarray
    chi_stderr: np.ndarray
    max_homology_dimension: np.ndarray = field(default=None)
    complex_dimension: np.ndarray = field(default=None)

    def interval(self, z: float = 3.0) -> Tuple[np.ndarray, np.ndarray]:
        """mean ± z·σ/√trials for the homology means."""
        return self.homology_mean - z * self.homology_stderr, self.homology_mean + z * self.homology_stderr


def _run_block(spec: RandomQuotaSpec, grids: List[DensityGrid], qs: np.ndarray,
               seed_seq: np.random.SeedSequence, size: int) -> Tuple[np.ndarray, ...]:
    rng = np.random.default_rng(seed_seq)
    samples = np.column_stack([sample_weights(g, rng, size) for g in grids])
    n = spec.size
    h_sum = np.zeros((len(qs), n))
    h_sq = np.zeros((len(qs), n))
    chi_sum = np.zeros(len(qs))
    chi_sq = np.zeros(len(qs))
    top = np.full(len(qs), -1)
    widest = np.full(len(qs), -1)
    # a largest face takes the lightest vertices first
    prefix = np.cumsum(np.sort(np.column_stack([np.full(size, spec.m), samples]), axis=1), axis=1)
    signs = np.array([(-1) ** j for j in range(n)])
    for k, q in enumerate(qs):
        counts = shell_face_counts_batch(samples, spec.m, q)
        h_sum[k] += counts.sum(axis=0)
        h_sq[k] += (counts.astype(float) ** 2).sum(axis=0)
        chi = (1 + counts @ signs) if q > spec.m else np.zeros(size, dtype=np.int64)
        chi_sum[k] += chi.sum()
        chi_sq[k] += (chi.astype(float) ** 2).sum()
        populated = np.nonzero(counts.sum(axis=0))[0]
        top[k] = int(populated.max()) if len(populated) else -1
        widest[k] = int((prefix < q).sum(axis=1).max()) - 1
    return h_sum, h_sq, chi_sum, chi_sq, top, widest


def monte_carlo(spec: RandomQuotaSpec, trials: int, seed: int, qs: Optional[Sequence[float]] = None,
                workers: Optional[int] = None) -> MonteCarloResult:
    """
    Sample X[q] `trials` times and average its shell-face counts.

    Trials are split into fixed blocks, each with its own child of SeedSequence(seed),
    so the output does not depend on the worker count.
    """
    if trials < 1:
        raise InputException("trials must be at least 1")
    qs = np.asarray(qs if qs is not None else spec.q_grid, dtype=float)
    if qs.size == 0:
        raise InputException("No quotas to sample at")
    _check_walk(spec.size)
    block = get_settings().random.monte_carlo_block
    sizes = [min(block, trials - start) for start in range(0, trials, block)]
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    grids = spec.grids()
    logger.info(f"Monte Carlo: {trials} trials of {spec.size} weights in {len(sizes)} blocks, seed {seed}")

    blocks = parallel_map(lambda args: _run_block(spec, grids, qs, *args), list(zip(children, sizes)), workers)

    h_sum = sum(b[0] for b in blocks)
    h_sq = sum(b[1] for b in blocks)
    chi_sum = sum(b[2] for b in blocks)
    chi_sq = sum(b[3] for b in blocks)
    top = np.max(np.stack([b[4] for b in blocks]), axis=0)
    widest = np.max(np.stack([b[5] for b in blocks]), axis=0)

    h_mean = h_sum / trials
    chi_mean = chi_sum / trials
    h_var = np.maximum(h_sq / trials - h_mean ** 2, 0.0)
    chi_var = np.maximum(chi_sq / trials - chi_mean ** 2, 0.0)
    return MonteCarloResult(
        q=qs,
        trials=trials,
        seed=seed,
        homology_mean=h_mean,
        homology_stderr=np.sqrt(h_var / trials),
        chi_mean=chi_mean,
        chi_stderr=np.sqrt(chi_var / trials),
        max_homology_dimension=top,
        complex_dimension=widest,
    )


@dataclass(frozen=True)
class MertensIdentity:
    """Σ_{1 ≤ n < e^q} μ(n) three ways: Mertens sum, 1 − χ(LogPrime(q)), square-free walk."""
    q: float
    n: int
    lhs: int
    via_chi: int
    enumerated: Optional[int]

    @property
    def holds(self) -> bool:
        return self.lhs == self.via_chi and (self.enumerated is None or self.enumerated == self.lhs)


def _squarefree_mobius_sum(n: int, primes: Sequence[int]) -> int:
    """Σ μ(k) for 1 ≤ k ≤ n by walking products of distinct primes."""
    total = 0
    stack = [(0, 1, 1)]
    while stack:
        start, product, sign = stack.pop()
        total += sign
        for idx in range(start, len(primes)):
            grown = product * primes[idx]
            if grown > n:
                break
            stack.append((idx + 1, grown, -sign))
    return total


def logprime_mertens_identity(q: float, sieve: MobiusSieve, enumeration_bound: int = 100_000) -> MertensIdentity:
    """
    The left side Σ_{1 ≤ n < e^q} μ(n) computed exactly and compared with 1 − χ(LogPrime(q)).

    When e^q is at most enumeration_bound, the sum is also rebuilt from the subsets
    of primes whose logarithms sum below q.
    """
    n = logprime_bound(q)
    if n > sieve.n_max:
        raise CapacityException(f"e^{q} exceeds the sieve bound {sieve.n_max}")
    lhs = int(sieve.mu[1:n + 1].sum(dtype=np.int64))
    via_chi = 1 - chi_logprime(q, sieve)
    enumerated = None
    if n <= enumeration_bound:
        primes = [int(p) for p in sieve.primes if p <= n]
        enumerated = _squarefree_mobius_sum(n, primes)
    return MertensIdentity(q=q, n=n, lhs=lhs, via_chi=via_chi, enumerated=enumerated)
