# tests/unit/test_homology.py

import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quotatope.domain.exceptions import CapacityException, InputException
from quotatope.domain.homology import (
    BettiProfile,
    ExplicitComplex,
    betti_numbers,
    boundary_matrix,
    boundary_ranks,
    dump_boundary_csv,
    enumerate_complex,
)
from quotatope.domain.quota import (
    EMPTY_COMPLEX,
    Face,
    ScalarQuotaSystem,
    bouquet_signature,
    euler_characteristic,
)

pytestmark = pytest.mark.unit


class TestExplicitComplex:
    def test_from_facets_closes_downward(self):
        c = ExplicitComplex.from_facets([Face.of(0, 1, 2)], 3)
        assert c.face_counts() == {0: 3, 1: 3, 2: 1}
        assert c.dimension == 2
        assert c.euler_characteristic() == 1

    def test_missing_subface_rejected(self):
        with pytest.raises(InputException):
            ExplicitComplex(frozenset({(0, 1), (0,)}), 2)

    def test_vertex_out_of_range(self):
        with pytest.raises(InputException):
            ExplicitComplex(frozenset({(3,)}), 2)

    def test_empty_complex(self):
        c = ExplicitComplex(frozenset(), 3)
        assert c.is_empty
        assert c.dimension == -1


class TestEnumerateComplex:
    def test_triangle_boundary(self, triangle_boundary):
        c = enumerate_complex(triangle_boundary)
        assert c.faces == frozenset({(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)})

    def test_full_simplex(self):
        c = enumerate_complex(ScalarQuotaSystem.of([2, 3, 5], 11))
        assert (0, 1, 2) in c.faces
        assert len(c.faces) == 7

    def test_capacity_limit(self, monkeypatch):
        monkeypatch.setenv("QUOTATOPE_ENUMERATION_LIMIT", "4")
        with pytest.raises(CapacityException):
            enumerate_complex(ScalarQuotaSystem.of([1, 1, 1, 1, 1], 3))


class TestBettiNumbers:
    def test_circle(self, triangle_boundary):
        betti = betti_numbers(enumerate_complex(triangle_boundary))
        assert betti.as_dict() == {1: 1}
        assert betti[0] == 0

    def test_contractible(self):
        assert betti_numbers(enumerate_complex(ScalarQuotaSystem.of([2, 3, 5], 11))).as_dict() == {}

    def test_two_points(self, two_three_five_seven):
        betti = betti_numbers(enumerate_complex(two_three_five_seven))
        assert betti.as_dict() == {0: 1}
        assert betti.euler_characteristic() == 2

    def test_hollow_tetrahedron(self):
        facets = [Face(f) for f in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]]
        assert betti_numbers(ExplicitComplex.from_facets(facets, 4)).as_dict() == {2: 1}

    def test_wedge_of_two_circles(self):
        facets = [Face(f) for f in [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)]]
        assert betti_numbers(ExplicitComplex.from_facets(facets, 5)).as_dict() == {1: 2}

    def test_empty_complex_rejected(self):
        with pytest.raises(InputException):
            betti_numbers(ExplicitComplex(frozenset(), 2))

    def test_ranks_of_full_simplex(self):
        ranks = boundary_ranks(ExplicitComplex.from_facets([Face.of(0, 1, 2, 3)], 4))
        assert ranks == {0: 1, 1: 3, 2: 3, 3: 1}

    def test_profile_drops_zeros(self):
        assert BettiProfile({0: 0, 2: 1}).reduced_betti == ((2, 1),)

    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.integers(min_value=1, max_value=12), min_size=2, max_size=8),
        st.integers(min_value=2, max_value=40),
    )
    def test_betti_agrees_with_bouquet(self, weights, quota):
        sys = ScalarQuotaSystem.of(weights, quota)
        signature = bouquet_signature(sys)
        c = enumerate_complex(sys)
        if signature is EMPTY_COMPLEX:
            assert c.is_empty
            return
        betti = betti_numbers(c)
        assert betti.as_dict() == signature.as_dict()
        assert c.euler_characteristic() == euler_characteristic(sys)


class TestBoundaryMatrix:
    def test_boundary_of_boundary_vanishes(self):
        c = ExplicitComplex.from_facets([Face.of(0, 1, 2, 3)], 4)
        for d in (2, 3):
            assert not np.any(boundary_matrix(c, d - 1) @ boundary_matrix(c, d))

    def test_edge_signs(self):
        c = ExplicitComplex.from_facets([Face.of(0, 1)], 2)
        assert boundary_matrix(c, 1).tolist() == [[-1], [1]]

    def test_dimension_zero_rejected(self):
        with pytest.raises(InputException):
            boundary_matrix(ExplicitComplex.from_facets([Face.of(0)], 1), 0)

    def test_dump_boundary_csv(self, tmp_path, triangle_boundary):
        paths = dump_boundary_csv(enumerate_complex(triangle_boundary), tmp_path)
        assert [p.name for p in paths] == ["boundary_1.csv"]
        with open(paths[0], newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["", "0-1", "0-2", "1-2"]
        assert [r[0] for r in rows[1:]] == ["0", "1", "2"]
