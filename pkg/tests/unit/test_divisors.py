# tests/unit/test_divisors.py

import pytest
from sympy import divisor_count, divisor_sigma

from quotatope.domain.divisors import (
    Classification,
    Parity,
    classify_range,
    divisor_profile,
    divisor_sieve,
    divisor_system,
    divisors,
    mersenne_perfect_numbers,
    perfect_scan,
)
from quotatope.domain.exceptions import InputException
from quotatope.domain.quota import bouquet_signature

pytestmark = pytest.mark.unit


class TestDivisorArithmetic:
    def test_divisors(self):
        assert divisors(12) == [1, 2, 3, 4, 6, 12]
        assert divisors(1) == [1]
        assert divisors(49) == [1, 7, 49]

    def test_divisors_of_zero(self):
        with pytest.raises(InputException):
            divisors(0)

    def test_sieve_matches_sympy(self):
        tau, sigma = divisor_sieve(500)
        for n in range(1, 501):
            assert tau[n] == int(divisor_count(n))
            assert sigma[n] == int(divisor_sigma(n))

    def test_system(self):
        sys = divisor_system(6)
        assert [int(w) for w in sys.weights] == [1, 2, 3]
        assert sys.quota == 6

    @pytest.mark.parametrize("n,expected", [
        (8, Classification.DEFICIENT),
        (6, Classification.PERFECT),
        (12, Classification.ABUNDANT),
    ])
    def test_classify_range(self, n, expected):
        classes = {m: cls for m, _, cls in classify_range(2, 30)}
        assert classes[n] is expected

    def test_classify_range_invalid(self):
        with pytest.raises(InputException):
            list(classify_range(10, 10))

    @pytest.mark.parametrize("parity,n,expected", [
        (Parity.ALL, 4, True),
        (Parity.ODD, 4, False),
        (Parity.ODD, 945, True),
        (Parity.EVEN, 945, False),
    ])
    def test_parity(self, parity, n, expected):
        assert parity.admits(n) is expected


class TestDivisorProfile:
    def test_perfect_six(self):
        profile = divisor_profile(6)
        assert profile.is_perfect
        assert profile.signature.as_dict() == {1: 1}
        assert profile.top_dim == 1
        assert profile.perfect_gap == 0

    def test_deficient_is_contractible(self):
        profile = divisor_profile(8)
        assert profile.is_contractible
        assert profile.perfect_gap is None
        assert profile.signature.is_contractible

    def test_abundant_twelve(self):
        profile = divisor_profile(12)
        assert profile.classification is Classification.ABUNDANT
        assert profile.signature.as_dict() == {2: 1}
        assert profile.perfect_gap == 1

    def test_abundant_without_signature(self):
        profile = divisor_profile(12, with_signature=False)
        assert profile.signature is None
        assert profile.top_dim == 2

    def test_odd_abundant_945(self):
        profile = divisor_profile(945)
        assert not profile.is_contractible
        assert profile.classification is Classification.ABUNDANT

    def test_gap_of_12285(self):
        assert divisor_profile(12285).perfect_gap == 2

    def test_n_below_two(self):
        with pytest.raises(InputException):
            divisor_profile(1)

    def test_signature_matches_core(self):
        for n in range(2, 301):
            profile = divisor_profile(n)
            assert profile.signature.as_dict() == bouquet_signature(divisor_system(n)).as_dict()

    def test_top_dimension_shortcut(self):
        for n in range(2, 400):
            assert divisor_profile(n, with_signature=False).top_dim == divisor_profile(n).top_dim

    def test_falls_back_to_top_dimension(self, monkeypatch):
        monkeypatch.setenv("QUOTATOPE_DP_CELL_LIMIT", "3")
        profile = divisor_profile(12)
        assert profile.signature is None
        assert profile.top_dim == 2


class TestPerfectScan:
    def test_gap_zero_exactly_at_perfect_numbers(self):
        profiles = list(perfect_scan(2, 10_000, with_signature=False, workers=1))
        assert [p.n for p in profiles if p.perfect_gap == 0] == [6, 28, 496, 8128]
        assert all(p.perfect_gap >= 0 for p in profiles)

    def test_results_in_increasing_order(self):
        ns = [p.n for p in perfect_scan(2, 3000, workers=4)]
        assert ns == sorted(ns)
        assert 12 in ns and 6 in ns

    def test_odd_scan_finds_945(self):
        assert [p.n for p in perfect_scan(3, 1000, parity=Parity.ODD)] == [945]

    def test_invalid_range(self):
        with pytest.raises(InputException):
            list(perfect_scan(1, 10))

    def test_mersenne(self):
        assert mersenne_perfect_numbers(10_000) == [(2, 6), (3, 28), (5, 496), (7, 8128)]
