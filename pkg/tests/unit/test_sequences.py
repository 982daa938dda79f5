# tests/unit/test_sequences.py

from fractions import Fraction
from itertools import combinations

import pytest

from quotatope.domain.exceptions import InputException
from quotatope.domain.quota import ScalarQuotaSystem, bouquet_signature
from quotatope.domain.sequences import (
    SequenceKind,
    SequenceSpec,
    SlopeTransform,
    count_table,
    distinct_representations,
    goldbach_scan,
    homology_table,
    odd_even_targets,
    prime_connectivity,
    ratio_series,
    sandwich_bounds,
    slope_fit,
    square_connectivity,
    twin_prime_quotas,
)

pytestmark = pytest.mark.unit


class TestSequenceSpec:
    def test_primes_below_bound(self):
        spec = SequenceSpec.primes(20)
        assert spec.elements == (2, 3, 5, 7, 11, 13, 17, 19)
        assert spec.v1 == 2

    def test_squares_and_cubes(self):
        assert SequenceSpec.squares(20).elements == (1, 4, 9, 16)
        assert SequenceSpec.cubes(30).elements == (1, 8, 27)

    def test_first_hundred_primes_after_two(self):
        spec = SequenceSpec.first_terms(SequenceKind.PRIMES, 100)
        assert len(spec.elements) == 101
        assert spec.elements[-1] == 547
        assert spec.complete_below == 557

    def test_first_squares(self):
        spec = SequenceSpec.first_terms(SequenceKind.SQUARES, 25)
        assert spec.elements[-1] == 26 * 26
        assert spec.complete_below == 27 * 27

    @pytest.mark.parametrize("elements", [[3, 3], [0, 2], []])
    def test_invalid_custom(self, elements):
        with pytest.raises(InputException):
            SequenceSpec.custom(elements)

    def test_build_dispatch(self):
        assert SequenceSpec.build(SequenceKind.SQUARES, 10).elements == (1, 4, 9)
        with pytest.raises(InputException):
            SequenceSpec.build(SequenceKind.CUSTOM, 10)


class TestCountTable:
    @pytest.mark.parametrize("spec,q,expected", [
        (SequenceSpec.primes(20), 8, 3),
        (SequenceSpec.squares(20), 10, 2),
        (SequenceSpec.cubes(20), 9, 1),
    ])
    def test_vertex_counts(self, spec, q, expected):
        assert count_table(spec, 12, 2).value(0, q) == expected

    def test_matches_brute_force(self):
        primes = SequenceSpec.primes(60)
        table = count_table(primes, 60, 3)
        others = primes.elements[1:]
        for q in range(0, 61):
            for i in range(4):
                direct = sum(1 for c in combinations(others, i + 1) if sum(c) < q)
                assert table.value(i, q) == direct

    def test_incomplete_prefix_rejected(self):
        with pytest.raises(InputException):
            count_table(SequenceSpec.primes(20), 30, 2)

    def test_qmax_must_exceed_v1(self):
        with pytest.raises(InputException):
            count_table(SequenceSpec.primes(20), 2, 2)

    def test_value_bounds(self):
        table = count_table(SequenceSpec.primes(20), 10, 1)
        assert table.value(0, -3) == 0
        with pytest.raises(InputException):
            table.value(2, 5)
        with pytest.raises(InputException):
            table.value(0, 11)

    def test_sandwich(self):
        table = count_table(SequenceSpec.primes(200), 200, 4)
        for i in range(5):
            for q in range(1, 201):
                lower, upper = sandwich_bounds(table, i, q)
                assert lower <= table.value(i, q) <= upper


class TestHomologyTable:
    @pytest.fixture
    def prime_homology(self):
        return homology_table(count_table(SequenceSpec.primes(130), 130, 9))

    @pytest.mark.parametrize("q,expected", [(8, 1), (10, 0)])
    def test_prime_h0(self, prime_homology, q, expected):
        assert prime_homology.value(0, q) == expected

    def test_square_h0(self):
        h = homology_table(count_table(SequenceSpec.squares(20), 12, 1))
        assert h.value(0, 5) == 1

    def test_agrees_with_bouquet(self, prime_homology):
        primes = SequenceSpec.primes(130).elements
        for q in range(3, 121):
            signature = bouquet_signature(ScalarQuotaSystem.of(primes, q))
            expected = {i: prime_homology.value(i, q) for i in range(10) if prime_homology.value(i, q)}
            assert signature.as_dict() == expected

    def test_parity_structure(self, prime_homology):
        # h_i counts (i+1)-sets of odd primes summing to the one integer of [q − 2, q) with parity i + 1
        odd_primes = SequenceSpec.primes(130).elements[1:]
        for q in range(3, 121):
            odd, even = odd_even_targets(q)
            parts = [p for p in odd_primes if p < q]
            for i in range(5):
                target = odd if i % 2 == 0 else even
                assert prime_homology.value(i, q) == distinct_representations(target, parts, i + 1), (q, i)

    def test_goldbach_scan_for_pairs(self, prime_homology):
        assert goldbach_scan(prime_homology, 1, 8, 8) == [8]
        assert goldbach_scan(prime_homology, 1, 8, 120) == [8]

    def test_goldbach_scan_out_of_range(self, prime_homology):
        with pytest.raises(InputException):
            goldbach_scan(prime_homology, 1, 8, 500)

    def test_v1_override(self):
        table = count_table(SequenceSpec.primes(20), 12, 1)
        with pytest.raises(InputException):
            homology_table(table, v1=0)


class TestRatioSeries:
    def test_ratios_are_exact(self):
        table = count_table(SequenceSpec.primes(20), 12, 2)
        series = ratio_series(table, homology_table(table))
        assert series.S[0, 4] == Fraction(1)
        assert series.S[1, 4] == Fraction(0)
        assert series.S[0, 3] is None
        # s_0(12) = 4 singletons, s_1(12) = 2 pairs
        assert series.S[1, 12] == Fraction(1, 3)

    def test_running_mean(self):
        table = count_table(SequenceSpec.primes(20), 12, 2)
        series = ratio_series(table, homology_table(table))
        expected = sum(float(series.S[0, k] or 0) for k in range(1, 13)) / 12
        assert series.S_ave[0, 12] == pytest.approx(expected)

    def test_ratios_sum_to_one(self):
        table = count_table(SequenceSpec.squares(300), 300, 6)
        series = ratio_series(table, homology_table(table))
        for q in range(5, 301):
            assert sum(series.S[i, q] for i in range(7)) == 1


class TestSlopeFit:
    def test_needs_two_points(self):
        with pytest.raises(InputException):
            slope_fit(count_table(SequenceSpec.primes(20), 20, 3), 3, SlopeTransform.PRIME)

    def test_square_vertex_slope(self):
        # s_0(q)^2 ≈ q for squares
        table = count_table(SequenceSpec.squares(10_001), 10_000, 0)
        fit = slope_fit(table, 0, SlopeTransform.SQUARE)
        assert fit.slope == pytest.approx(1.0, abs=0.03)
        assert fit.points > 9000


class TestConnectivity:
    @pytest.mark.parametrize("target,parts,size,expected", [
        (10, [3, 5, 7], 2, 1),
        (8, [3, 5], 2, 1),
        (6, [3], 2, 0),
        (15, [3, 5, 7], 3, 1),
    ])
    def test_distinct_representations(self, target, parts, size, expected):
        assert distinct_representations(target, parts, size) == expected

    @pytest.mark.parametrize("q,connected,simply", [
        (6, False, True), (8, False, True), (10, True, False),
        (7, False, True), (9, False, False), (11, True, False), (13, False, False), (15, False, False),
    ])
    def test_prime_connectivity(self, q, connected, simply):
        result = prime_connectivity(q)
        assert (result.connected, result.simply_connected_components) == (connected, simply)

    def test_prime_connectivity_matches_bouquet(self):
        primes = SequenceSpec.primes(90).elements
        for q in range(6, 90):
            counts = bouquet_signature(ScalarQuotaSystem.of(primes, q)).as_dict()
            result = prime_connectivity(q)
            assert result.connected == (counts.get(0, 0) == 0), q
            assert result.simply_connected_components == (counts.get(1, 0) == 0), q

    @pytest.mark.parametrize("q,targets", [(8, (7, 6)), (13, (11, 12))])
    def test_odd_even_targets(self, q, targets):
        assert odd_even_targets(q) == targets

    def test_prime_connectivity_needs_six(self):
        with pytest.raises(InputException):
            prime_connectivity(5)

    def test_twin_primes(self):
        assert twin_prime_quotas(6, 20) == [6, 12, 18]
        assert twin_prime_quotas(5, 13) == [6, 12]

    @pytest.mark.parametrize("q,connected,simply", [(5, False, False), (6, True, True), (14, True, False), (3, True, True)])
    def test_square_connectivity(self, q, connected, simply):
        result = square_connectivity(q)
        assert (result.connected, result.simply_connected_components) == (connected, simply)
