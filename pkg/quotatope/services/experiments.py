# quotatope/services/experiments.py

from math import log
from pathlib import Path
from typing import List
import json

import numpy as np

from quotatope.domain.divisors import Parity, classify_range, divisor_profile, perfect_scan
from quotatope.domain.exceptions import InputException
from quotatope.domain.mobius import chi_prime, chi_prime_sweep, default_sieve, mobius_sieve, rh_diagnostic
from quotatope.domain.power_series import (
    WeightMultiset,
    chi_from_product,
    count_complex_chi,
    lehmer_check,
    partition_numbers,
    tau_values,
)
from quotatope.domain.random_complex import RandomQuotaSpec, expected_euler, expected_homology, monte_carlo
from quotatope.domain.sequences import (
    SequenceKind,
    SequenceSpec,
    SlopeTransform,
    count_table,
    homology_table,
    ratio_series,
    slope_fit,
)
from quotatope.infrastructure.interfaces import Dataset
from quotatope.schemas.requests import (
    DivisorRequest,
    EulerRequest,
    LogPrimeRequest,
    RandomRequest,
    RandomSpecFile,
    SeqRequest,
    SeriesRequest,
)
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)

SLOPE_TRANSFORMS = {
    SequenceKind.PRIMES: SlopeTransform.PRIME,
    SequenceKind.SQUARES: SlopeTransform.SQUARE,
    SequenceKind.CUBES: SlopeTransform.CUBE,
}


def sequence_datasets(request: SeqRequest) -> List[Dataset]:
    """s_i, h_i, S_i, H_i and S_i_ave per (q, i), plus least-squares slopes per i."""
    kind = SequenceKind(request.kind)
    spec = SequenceSpec.build(kind, request.q_max)
    if request.q_max <= spec.v1:
        raise InputException(f"q_max must exceed v1 = {spec.v1}")
    table = count_table(spec, request.q_max, request.i_max)
    homology = homology_table(table)
    ratios = ratio_series(table, homology)

    rows = []
    for q in range(spec.v1 + 1, request.q_max + 1):
        for i in range(request.i_max + 1):
            rows.append([
                q, i, int(table.s[i, q]), int(homology.h[i, q]),
                ratios.S[i, q], ratios.H[i, q], ratios.S_ave[i, q],
            ])
    values = Dataset(f"seq_{kind.value}", ["q", "i", "s_i", "h_i", "S_i", "H_i", "S_i_ave"], rows)

    slopes = Dataset(f"slopes_{kind.value}", ["i", "slope", "intercept", "residual", "points"])
    for i in range(request.i_max + 1):
        try:
            fit = slope_fit(table, i, SLOPE_TRANSFORMS[kind], request.fit_q_max)
        except InputException as e:
            logger.warning(f"No slope for i={i}: {str(e)}")
            continue
        slopes.rows.append([i, fit.slope, fit.intercept, fit.residual, fit.points])
    return [values, slopes]


def euler_dataset(request: EulerRequest) -> List[Dataset]:
    """χ(Prime(q)) for 3 ≤ q ≤ q_max."""
    if request.method == "dp":
        chi = chi_prime_sweep(request.q_max)
        rows = [[q, int(chi[q])] for q in range(3, request.q_max + 1)]
    else:
        rows = [[q, chi_prime(q, method="enumerate")] for q in range(3, request.q_max + 1)]
    return [Dataset("euler", ["q", "chi"], rows)]


def logprime_datasets(request: LogPrimeRequest) -> List[Dataset]:
    """Scatter of ln|χ(LogPrime(q))| and the envelope summary."""
    if request.n_max is not None:
        sieve = mobius_sieve(request.n_max)
    else:
        sieve = default_sieve(full_range=request.full_range)
    q_hi = request.q_hi if request.q_hi is not None else log(sieve.n_max + 1)
    if q_hi <= request.q_lo:
        raise InputException(f"q_hi = {q_hi} must exceed q_lo = {request.q_lo}")
    diagnostic = rh_diagnostic(sieve, request.q_lo, q_hi, request.samples,
                               slope=request.slope, anchor=request.anchor)
    scatter = Dataset(
        "logprime",
        ["q", "ln_abs_chi"],
        [[float(q), float(v)] for q, v in zip(diagnostic.q, diagnostic.ln_abs_chi)],
    )
    summary = Dataset(
        "logprime_summary",
        ["samples", "skipped_zero", "anchor", "slope", "intercept", "fraction_below", "holdout_fraction_below"],
        [[request.samples, diagnostic.skipped_zero, diagnostic.anchor, diagnostic.slope, diagnostic.intercept,
          diagnostic.fraction_below, diagnostic.holdout_fraction_below]],
    )
    return [scatter, summary]


def divisor_datasets(request: DivisorRequest) -> List[Dataset]:
    """Non-contractible Div(n) over the range, or every n with all_n."""
    columns = ["n", "tau", "classification", "top_dim", "perfect_gap", "sphere_counts"]
    dataset = Dataset("divisor", columns)
    parity = Parity(request.parity)

    def row(profile):
        counts = profile.signature.as_dict() if profile.signature is not None else None
        encoded = json.dumps({str(k): v for k, v in counts.items()}, separators=(",", ":")) if counts is not None else None
        return [profile.n, profile.tau, profile.classification.value, profile.top_dim, profile.perfect_gap, encoded]

    if request.all_n:
        for n, _, _ in classify_range(request.n_min, request.n_max):
            if parity.admits(n):
                dataset.rows.append(row(divisor_profile(n, with_signature=request.signatures)))
    else:
        for profile in perfect_scan(request.n_min, request.n_max, parity, with_signature=request.signatures):
            dataset.rows.append(row(profile))
    return [dataset]


def series_datasets(request: SeriesRequest) -> List[Dataset]:
    """Coefficient tables for the generating-function examples."""
    degree = request.degree
    if request.example == "count":
        chi = count_complex_chi(degree, copies=request.copies)
        return [Dataset(f"count_{request.copies}", ["q", "chi_q"], [[q, int(chi[q])] for q in range(2, degree + 1)])]
    if request.example == "prime":
        chi = chi_from_product(WeightMultiset.primes(degree), degree)
        return [Dataset("prime", ["q", "chi_q"], [[q, int(chi[q])] for q in range(3, degree + 1)])]
    if request.example == "partitions":
        p = partition_numbers(degree)
        return [Dataset("partitions", ["n", "p_n"], [[n, int(p[n])] for n in range(1, degree + 1)])]
    if request.example == "tau":
        tau = tau_values(degree)
        return [Dataset("tau", ["n", "tau_n"], [[n, int(tau[n])] for n in range(1, degree + 1)])]
    report = lehmer_check(degree)
    return [
        Dataset("tau", ["n", "tau_n"], [[n, int(report.tau[n])] for n in range(1, degree + 1)]),
        Dataset("count_24", ["q", "chi_q"], [[q, int(report.chi[q])] for q in range(2, degree + 1)]),
        Dataset("lehmer_counterexamples", ["m"], [[m] for m in report.counterexamples]),
    ]


def load_random_spec(path: Path) -> RandomSpecFile:
    try:
        return RandomSpecFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputException(f"Spec file not found: {path}")


def random_datasets(request: RandomRequest) -> List[Dataset]:
    """Expected homology and χ curves beside Monte Carlo means on the spec file's quota grid."""
    spec_file = load_random_spec(request.spec_file)
    spec = RandomQuotaSpec.from_descriptors(
        spec_file.m, [d.model_dump() for d in spec_file.densities], spec_file.q_grid
    )
    trials = request.trials or spec_file.trials
    seed = request.seed if request.seed is not None else spec_file.seed
    qs = np.asarray(spec.q_grid)

    result = monte_carlo(spec, trials, seed, qs)
    homology = Dataset("random", ["q", "j", "expected", "empirical_mean", "stderr"])
    for j in range(1, spec.size + 1):
        expected = expected_homology(spec, j, qs)
        for k, q in enumerate(qs):
            homology.rows.append([float(q), j, float(expected[k]),
                                  float(result.homology_mean[k, j - 1]), float(result.homology_stderr[k, j - 1])])
    homology.rows.sort(key=lambda r: (r[0], r[1]))

    curve = expected_euler(spec, qs, method=request.method)
    euler = Dataset(
        "random_euler",
        ["q", "expected_chi", "empirical_mean", "stderr", "complex_dimension"],
        [[float(q), float(1 - curve[k]), float(result.chi_mean[k]), float(result.chi_stderr[k]),
          int(result.complex_dimension[k])]
         for k, q in enumerate(qs)],
    )
    return [homology, euler]
