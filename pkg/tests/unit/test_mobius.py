# tests/unit/test_mobius.py

from itertools import combinations
from math import log

import numpy as np
import pytest
from sympy.ntheory import mobius

from quotatope.domain.exceptions import CapacityException, InputException
from quotatope.domain.mobius import (
    chi_logprime,
    chi_logprime_many,
    chi_prime,
    chi_prime_sweep,
    default_sieve,
    logprime_bound,
    mertens,
    mertens_l_series_check,
    mobius_sieve,
    prime_sieve,
    rh_diagnostic,
)
from quotatope.domain.quota import ScalarQuotaSystem, euler_characteristic

pytestmark = pytest.mark.unit


class TestSieves:
    def test_prime_sieve(self):
        primes, mask = prime_sieve(30)
        assert primes.tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        assert mask[29] and not mask[27]

    def test_tiny_prime_sieve(self):
        primes, _ = prime_sieve(1)
        assert len(primes) == 0

    @pytest.mark.parametrize("n,expected", [(1, 1), (2, -1), (4, 0), (6, 1), (30, -1), (12, 0)])
    def test_mobius_values(self, sieve_100k, n, expected):
        assert sieve_100k[n] == expected

    def test_matches_sympy(self):
        sieve = mobius_sieve(2000)
        assert [sieve[n] for n in range(1, 2001)] == [int(mobius(n)) for n in range(1, 2001)]

    def test_index_outside_sieve(self):
        sieve = mobius_sieve(10)
        with pytest.raises(CapacityException):
            sieve[11]
        with pytest.raises(CapacityException):
            sieve[0]

    def test_invalid_bound(self):
        with pytest.raises(InputException):
            mobius_sieve(0)

    def test_mertens_values(self, sieve_100k):
        series = mertens(sieve_100k)
        assert [series[n] for n in range(0, 11)] == [0, 1, 0, -1, -1, -2, -1, -2, -2, -2, -1]

    def test_default_sieve_uses_settings(self, monkeypatch):
        monkeypatch.setenv("QUOTATOPE_SIEVE__DEFAULT_BOUND", "500")
        assert default_sieve().n_max == 500


class TestChiPrime:
    @pytest.mark.parametrize("q,expected", [(0, 0), (2, 0), (3, 1), (6, 2)])
    def test_small_quotas(self, q, expected):
        assert chi_prime(q) == expected

    def test_methods_agree(self, sieve_100k):
        for q in range(3, 45):
            assert chi_prime(q, method="enumerate", sieve=sieve_100k) == chi_prime(q)

    def test_enumerate_without_sieve(self):
        assert chi_prime(30, method="enumerate") == chi_prime(30)

    def test_unknown_method(self):
        with pytest.raises(InputException):
            chi_prime(10, method="fourier")

    def test_matches_core_euler_characteristic(self):
        primes = [int(p) for p in prime_sieve(200)[0]]
        for q in range(3, 150):
            assert chi_prime(q) == euler_characteristic(ScalarQuotaSystem.of(primes, q))

    def test_sweep_matches_pointwise(self):
        sweep = chi_prime_sweep(120)
        assert len(sweep) == 121
        assert [int(sweep[q]) for q in range(121)] == [chi_prime(q) for q in range(121)]

    def test_direct_mobius_sum(self):
        # −Σ μ(n) over square-free n ≥ 2 with prime-factor sum below q
        q = 25
        primes = [int(p) for p in prime_sieve(q - 1)[0]]
        total = 0
        for size in range(1, len(primes) + 1):
            for subset in combinations(primes, size):
                if sum(subset) < q:
                    total += (-1) ** size
        assert chi_prime(q) == -total


class TestLogPrime:
    @pytest.mark.parametrize("q,expected", [(log(6), 5), (log(2), 1), (0.5, 1), (log(11) + 1e-9, 11)])
    def test_bound(self, q, expected):
        assert logprime_bound(q) == expected

    def test_bound_needs_positive_quota(self):
        with pytest.raises(InputException):
            logprime_bound(0)

    @pytest.mark.parametrize("q,expected", [(log(2), 0), (log(6), 3), (log(11), 2)])
    def test_chi_logprime(self, sieve_100k, q, expected):
        assert chi_logprime(q, sieve_100k) == expected

    def test_beyond_sieve(self):
        with pytest.raises(CapacityException):
            chi_logprime(log(50), mobius_sieve(20))

    def test_many_matches_single(self, sieve_100k):
        qs = np.linspace(0.3, 11.0, 400)
        many = chi_logprime_many(qs, sieve_100k)
        assert many.tolist() == [chi_logprime(q, sieve_100k) for q in qs]

    def test_many_beyond_sieve(self):
        with pytest.raises(CapacityException):
            chi_logprime_many([2.0, 20.0], mobius_sieve(100))

    def test_many_rejects_nonpositive(self, sieve_100k):
        with pytest.raises(InputException):
            chi_logprime_many([1.0, 0.0], sieve_100k)


class TestDiagnostics:
    def test_rh_envelope(self, sieve_100k):
        diagnostic = rh_diagnostic(sieve_100k, 3.0, 11.5, samples=2000)
        assert len(diagnostic.q) + diagnostic.skipped_zero == 2000
        assert diagnostic.slope == 0.55
        assert 0.0 < diagnostic.fraction_below <= 1.0
        assert np.all(np.isfinite(diagnostic.ln_abs_chi))

    def test_rh_anchored_at_first_sample(self, sieve_100k):
        diagnostic = rh_diagnostic(sieve_100k, 3.0, 11.5, samples=500)
        assert diagnostic.anchor == "first"
        first = diagnostic.ln_abs_chi[0] - diagnostic.slope * diagnostic.q[0]
        assert diagnostic.intercept == pytest.approx(first, abs=1e-12)
        assert 0.0 <= diagnostic.holdout_fraction_below <= 1.0

    def test_rh_calibrated_anchor(self, sieve_100k):
        diagnostic = rh_diagnostic(sieve_100k, 3.0, 11.5, samples=500, anchor="calibrated")
        residual = diagnostic.ln_abs_chi - diagnostic.slope * diagnostic.q
        split = len(diagnostic.q) // 2
        assert diagnostic.intercept == pytest.approx(residual[:split].max(), abs=1e-12)
        assert np.all(residual[:split] <= diagnostic.intercept + 1e-12)

    def test_rh_unknown_anchor(self, sieve_100k):
        with pytest.raises(InputException):
            rh_diagnostic(sieve_100k, 3.0, 11.5, anchor="last")

    @pytest.mark.parametrize("q_lo,q_hi", [(5.0, 3.0), (0.0, 3.0), (2.0, 2.0)])
    def test_rh_invalid_range(self, sieve_100k, q_lo, q_hi):
        with pytest.raises(InputException):
            rh_diagnostic(sieve_100k, q_lo, q_hi)

    def test_rh_beyond_sieve(self):
        with pytest.raises(CapacityException):
            rh_diagnostic(mobius_sieve(1000), 3.0, 12.0, samples=50)

    def test_l_series_partial_sums_coincide(self):
        direct, via_chi = mertens_l_series_check(mobius_sieve(600), s=2, terms=500)
        assert direct == via_chi
        assert float(direct) == pytest.approx(6 / np.pi ** 2, abs=5e-3)

    def test_l_series_capacity(self):
        with pytest.raises(CapacityException):
            mertens_l_series_check(mobius_sieve(100), terms=100)
